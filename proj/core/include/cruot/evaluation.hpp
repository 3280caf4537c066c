#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cruot/types.hpp"

namespace cruot {

// Per-label keep rates for seeded subsampling. Labels absent from the map
// fall back to default_rate. Rates live in [0, 1]; the kept count per label
// is round(rate * count), at least 0.
struct SubsampleScheme {
  std::map<std::string, double> per_label_rates;
  double default_rate = 1.0;
  std::uint64_t seed = 0;
};

struct EvalReport {
  double label_transfer_accuracy = 0.0;
  int k = 0;
  Index n_evaluated = 0;
  std::map<std::string, double> per_label_accuracy;
  std::map<std::string, Index> per_label_count;
};

// Applies the scheme to a labeled cloud. Within each label the kept subset
// is chosen by a seeded shuffle; kept indices are returned in ascending
// order, so rate 1.0 reproduces the input exactly. Weights are reset to
// uniform over the kept points. Returns the kept original indices too.
struct SubsampleOutput {
  PointCloud cloud;
  DiscreteMeasure measure;
  std::vector<Index> kept_indices;
};
SubsampleOutput subsample(const PointCloud& cloud,
                          const SubsampleScheme& scheme);

// Brute-force k-nearest-neighbor labels for each query row, using Euclidean
// distance in the shared space. Ties are deterministic: equal distances
// prefer the lower training index; vote ties prefer the tied label whose
// nearest representative among the k neighbors is closest (then lower
// index), and finally lexicographic label order.
std::vector<std::string> knn_predict(const Matrix& queries,
                                     const Matrix& train_points,
                                     const std::vector<std::string>& train_labels,
                                     int k);

// Fraction of aligned source points whose k-NN label in the target equals
// their own label, with per-label breakdown.
EvalReport label_transfer_accuracy(const PointCloud& aligned_source,
                                   const PointCloud& target, int k);

// Total mass of the plan, sum_ij P_ij.
double transported_mass(const CouplingMatrix& plan);

}  // namespace cruot
