#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cruot/evaluation.hpp"

using namespace cruot;

namespace {

PointCloud labeled_cloud(Index n, Index d, const std::vector<std::string>& lbl,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix pts(n, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < n; ++i) pts(i, j) = u(rng);
  return PointCloud(std::move(pts), lbl);
}

}  // namespace

TEST_CASE("rate one keeps every point in original order") {
  std::vector<std::string> lbl{"a", "b", "a", "b", "a"};
  const PointCloud cloud = labeled_cloud(5, 2, lbl, 3);
  SubsampleScheme scheme;
  scheme.seed = 42;
  const SubsampleOutput out = subsample(cloud, scheme);
  CHECK(out.cloud.size() == 5);
  CHECK(out.kept_indices == std::vector<Index>{0, 1, 2, 3, 4});
  CHECK((out.cloud.points - cloud.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.cloud.labels == lbl);
  for (Index i = 0; i < 5; ++i) {
    CHECK(out.measure.weights[i] == doctest::Approx(0.2).epsilon(1e-15));
  }
}

TEST_CASE("per-label counts follow the rounded rates") {
  std::vector<std::string> lbl;
  for (int i = 0; i < 10; ++i) lbl.push_back("a");
  for (int i = 0; i < 5; ++i) lbl.push_back("b");
  const PointCloud cloud = labeled_cloud(15, 2, lbl, 5);

  SubsampleScheme scheme;
  scheme.default_rate = 0.3;
  scheme.seed = 7;
  const SubsampleOutput out = subsample(cloud, scheme);
  Index na = 0, nb = 0;
  for (const auto& s : out.cloud.labels) (s == "a" ? na : nb) += 1;
  CHECK(na == 3);  // round(0.3 * 10)
  CHECK(nb == 2);  // round(0.3 * 5) = round(1.5)
  CHECK(std::is_sorted(out.kept_indices.begin(), out.kept_indices.end()));

  SubsampleScheme uneven;
  uneven.default_rate = 1.0;
  uneven.per_label_rates["a"] = 0.5;
  const SubsampleOutput out2 = subsample(cloud, uneven);
  na = nb = 0;
  for (const auto& s : out2.cloud.labels) (s == "a" ? na : nb) += 1;
  CHECK(na == 5);
  CHECK(nb == 5);
}

TEST_CASE("subsampling is seed-deterministic") {
  std::vector<std::string> lbl(40, "x");
  const PointCloud cloud = labeled_cloud(40, 3, lbl, 11);
  SubsampleScheme scheme;
  scheme.default_rate = 0.4;
  scheme.seed = 123;
  const SubsampleOutput a = subsample(cloud, scheme);
  const SubsampleOutput b = subsample(cloud, scheme);
  CHECK(a.kept_indices == b.kept_indices);

  scheme.seed = 124;
  const SubsampleOutput c = subsample(cloud, scheme);
  CHECK(a.kept_indices != c.kept_indices);
}

TEST_CASE("subsample rejects bad rates and unlabeled clouds") {
  std::vector<std::string> lbl{"a", "a"};
  const PointCloud cloud = labeled_cloud(2, 2, lbl, 1);
  SubsampleScheme scheme;
  scheme.default_rate = 1.5;
  CHECK_THROWS_AS(subsample(cloud, scheme), InvalidRate);
  scheme.default_rate = 1.0;
  scheme.per_label_rates["a"] = -0.1;
  CHECK_THROWS_AS(subsample(cloud, scheme), InvalidRate);

  Matrix pts(2, 2);
  pts << 0, 0, 1, 1;
  CHECK_THROWS_AS(subsample(PointCloud(pts), SubsampleScheme{}),
                  MissingLabels);
}

TEST_CASE("knn votes and tie rules are deterministic") {
  Matrix train(3, 1);
  train << 0.0, 1.0, 2.0;
  std::vector<std::string> lbl{"a", "b", "b"};
  Matrix q(1, 1);

  q << 0.9;
  CHECK(knn_predict(q, train, lbl, 1) == std::vector<std::string>{"b"});
  CHECK(knn_predict(q, train, lbl, 3) == std::vector<std::string>{"b"});

  // Vote tie at k=2: "a" holds the closer representative.
  q << 0.4;
  CHECK(knn_predict(q, train, lbl, 2) == std::vector<std::string>{"a"});

  // Exact distance tie prefers the lower training index.
  q << 0.5;
  CHECK(knn_predict(q, train, lbl, 1) == std::vector<std::string>{"a"});

  // Representative distances also tie; lower index carries label "a".
  Matrix train2(2, 1);
  train2 << 0.0, 1.0;
  std::vector<std::string> lbl2{"b", "a"};
  q << 0.5;
  CHECK(knn_predict(q, train2, lbl2, 2) == std::vector<std::string>{"b"});

  CHECK_THROWS_AS(knn_predict(q, train, lbl, 4), KTooLarge);
  CHECK_THROWS_AS(knn_predict(q, train, lbl, 0), KTooLarge);
}

TEST_CASE("knn predictions survive rigid motions") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix train(20, 2), q(7, 2);
  std::vector<std::string> lbl;
  for (Index i = 0; i < 20; ++i) {
    train(i, 0) = u(rng);
    train(i, 1) = u(rng);
    lbl.push_back(i % 2 == 0 ? "even" : "odd");
  }
  for (Index i = 0; i < 7; ++i) {
    q(i, 0) = u(rng);
    q(i, 1) = u(rng);
  }
  const double th = 0.6;
  Matrix rot(2, 2);
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Eigen::RowVector2d shift(2.5, -1.0);
  const Matrix train_m = (train * rot.transpose()).rowwise() + shift;
  const Matrix q_m = (q * rot.transpose()).rowwise() + shift;
  CHECK(knn_predict(q, train, lbl, 3) == knn_predict(q_m, train_m, lbl, 3));
}

TEST_CASE("label transfer accuracy on coincident and mislabeled clouds") {
  std::vector<std::string> lbl{"a", "b", "c", "a"};
  const PointCloud target = labeled_cloud(4, 2, lbl, 19);

  PointCloud aligned = target;
  const EvalReport perfect = label_transfer_accuracy(aligned, target, 1);
  CHECK(perfect.label_transfer_accuracy == doctest::Approx(1.0));
  CHECK(perfect.n_evaluated == 4);
  CHECK(perfect.k == 1);
  CHECK(perfect.per_label_accuracy.at("a") == doctest::Approx(1.0));

  aligned.labels = {"b", "a", "a", "c"};  // all wrong
  const EvalReport zero = label_transfer_accuracy(aligned, target, 1);
  CHECK(zero.label_transfer_accuracy == doctest::Approx(0.0));
}

TEST_CASE("per-label accuracies average back to the overall rate") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> pick(0, 2);
  const std::vector<std::string> names{"a", "b", "c"};
  std::vector<std::string> src_lbl, tgt_lbl;
  for (int i = 0; i < 30; ++i) src_lbl.push_back(names[pick(rng)]);
  for (int i = 0; i < 25; ++i) tgt_lbl.push_back(names[pick(rng)]);
  const PointCloud aligned = labeled_cloud(30, 3, src_lbl, 29);
  const PointCloud target = labeled_cloud(25, 3, tgt_lbl, 31);

  const EvalReport rep = label_transfer_accuracy(aligned, target, 5);
  double weighted = 0.0;
  Index total = 0;
  for (const auto& [name, acc] : rep.per_label_accuracy) {
    const Index cnt = rep.per_label_count.at(name);
    weighted += acc * static_cast<double>(cnt);
    total += cnt;
  }
  CHECK(total == rep.n_evaluated);
  CHECK(weighted / static_cast<double>(total) ==
        doctest::Approx(rep.label_transfer_accuracy).epsilon(1e-12));
}

TEST_CASE("transported mass is the plan total") {
  Matrix p(2, 3);
  p << 0.1, 0.2, 0.3, 0.0, 0.15, 0.25;
  CHECK(transported_mass(CouplingMatrix(p)) == doctest::Approx(1.0));
  CHECK(transported_mass(CouplingMatrix(Matrix::Zero(2, 2))) == 0.0);
}
