#include "cruot/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cruot {

namespace {

// Fisher-Yates with an explicit modulo draw so the permutation depends only
// on the seed, not on the standard library's distribution internals.
void seeded_shuffle(std::vector<Index>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

SubsampleOutput subsample(const PointCloud& cloud,
                          const SubsampleScheme& scheme) {
  if (!cloud.has_labels()) {
    throw MissingLabels("subsample: cloud has no labels");
  }
  auto rate_of = [&](const std::string& label) {
    auto it = scheme.per_label_rates.find(label);
    const double r = it == scheme.per_label_rates.end() ? scheme.default_rate
                                                        : it->second;
    if (std::isnan(r) || r < 0.0 || r > 1.0) {
      throw InvalidRate("subsample: rate for label '" + label +
                        "' outside [0, 1]");
    }
    return r;
  };

  // Group indices by label, keeping the grouping order deterministic by
  // using the sorted label set.
  std::map<std::string, std::vector<Index>> by_label;
  for (Index i = 0; i < cloud.size(); ++i) {
    by_label[cloud.labels[static_cast<std::size_t>(i)]].push_back(i);
  }

  std::mt19937_64 rng(scheme.seed);
  std::vector<Index> kept;
  for (auto& [label, idxs] : by_label) {
    const double rate = rate_of(label);
    const auto n_keep = static_cast<std::size_t>(
        std::llround(rate * static_cast<double>(idxs.size())));
    seeded_shuffle(idxs, rng);
    for (std::size_t k = 0; k < n_keep && k < idxs.size(); ++k) {
      kept.push_back(idxs[k]);
    }
  }
  if (kept.empty()) {
    throw EmptyDataset("subsample: no points kept");
  }
  std::sort(kept.begin(), kept.end());

  Matrix pts(static_cast<Index>(kept.size()), cloud.dim());
  std::vector<std::string> lbls;
  lbls.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    pts.row(static_cast<Index>(k)) = cloud.points.row(kept[k]);
    lbls.push_back(cloud.labels[static_cast<std::size_t>(kept[k])]);
  }
  SubsampleOutput out;
  out.cloud = PointCloud(std::move(pts), std::move(lbls), cloud.name);
  out.measure = DiscreteMeasure::uniform(static_cast<Index>(kept.size()));
  out.kept_indices = std::move(kept);
  return out;
}

std::vector<std::string> knn_predict(
    const Matrix& queries, const Matrix& train_points,
    const std::vector<std::string>& train_labels, int k) {
  if (queries.cols() != train_points.cols()) {
    throw DimensionMismatch("knn_predict: dimension mismatch");
  }
  if (static_cast<Index>(train_labels.size()) != train_points.rows()) {
    throw MissingLabels("knn_predict: one label per training point required");
  }
  if (k < 1 || k > train_points.rows()) {
    throw KTooLarge("knn_predict: k must lie in [1, n_train]");
  }

  const Index m = train_points.rows();
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));

  std::vector<std::pair<double, Index>> order(static_cast<std::size_t>(m));
  for (Index qi = 0; qi < queries.rows(); ++qi) {
    const Vector d2 = (train_points.rowwise() - queries.row(qi))
                          .rowwise()
                          .squaredNorm();
    for (Index j = 0; j < m; ++j) {
      order[static_cast<std::size_t>(j)] = {d2[j], j};
    }
    // (distance, index) pairs order identically under squared distance.
    std::partial_sort(order.begin(), order.begin() + k, order.end());

    // Votes plus, per label, its closest representative among the k.
    std::map<std::string, int> votes;
    std::map<std::string, std::pair<double, Index>> best_rep;
    for (int t = 0; t < k; ++t) {
      const auto& [dist, idx] = order[static_cast<std::size_t>(t)];
      const std::string& lbl = train_labels[static_cast<std::size_t>(idx)];
      votes[lbl] += 1;
      auto it = best_rep.find(lbl);
      if (it == best_rep.end() || std::pair(dist, idx) < it->second) {
        best_rep[lbl] = {dist, idx};
      }
    }
    int max_votes = 0;
    for (const auto& [lbl, v] : votes) max_votes = std::max(max_votes, v);
    // std::map iterates labels in lexicographic order, which supplies the
    // final tie-break for free.
    const std::string* winner = nullptr;
    std::pair<double, Index> winner_rep{0.0, 0};
    for (const auto& [lbl, v] : votes) {
      if (v != max_votes) continue;
      const auto rep = best_rep[lbl];
      if (winner == nullptr || rep < winner_rep) {
        winner = &lbl;
        winner_rep = rep;
      }
    }
    out.push_back(*winner);
  }
  return out;
}

EvalReport label_transfer_accuracy(const PointCloud& aligned_source,
                                   const PointCloud& target, int k) {
  if (!aligned_source.has_labels() || !target.has_labels()) {
    throw MissingLabels("label_transfer_accuracy: both clouds need labels");
  }
  const auto predicted =
      knn_predict(aligned_source.points, target.points, target.labels, k);

  EvalReport report;
  report.k = k;
  report.n_evaluated = aligned_source.size();
  std::map<std::string, Index> correct;
  for (Index i = 0; i < aligned_source.size(); ++i) {
    const std::string& truth = aligned_source.labels[static_cast<std::size_t>(i)];
    report.per_label_count[truth] += 1;
    if (predicted[static_cast<std::size_t>(i)] == truth) correct[truth] += 1;
  }
  Index total_correct = 0;
  for (const auto& [lbl, cnt] : report.per_label_count) {
    const Index c = correct.count(lbl) ? correct[lbl] : 0;
    report.per_label_accuracy[lbl] =
        static_cast<double>(c) / static_cast<double>(cnt);
    total_correct += c;
  }
  report.label_transfer_accuracy =
      static_cast<double>(total_correct) /
      static_cast<double>(aligned_source.size());
  return report;
}

double transported_mass(const CouplingMatrix& plan) {
  return plan.total_mass();
}

}  // namespace cruot
