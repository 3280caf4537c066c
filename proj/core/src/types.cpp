#include "cruot/types.hpp"

#include <cmath>
#include <iostream>

namespace cruot {

namespace {

void check_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) {
    throw NonFiniteEntry(what + " contains a non-finite entry");
  }
}

}  // namespace

PointCloud::PointCloud(Matrix pts, std::vector<std::string> lbls,
                       std::string nm)
    : points(std::move(pts)), labels(std::move(lbls)), name(std::move(nm)) {
  if (points.rows() == 0 || points.cols() == 0) {
    throw EmptyDataset("point cloud '" + name + "' has no points");
  }
  check_finite(points, "point cloud '" + name + "'");
  if (!labels.empty() && static_cast<Index>(labels.size()) != points.rows()) {
    throw DimensionMismatch("point cloud '" + name + "': " +
                            std::to_string(labels.size()) + " labels for " +
                            std::to_string(points.rows()) + " points");
  }
}

DiscreteMeasure::DiscreteMeasure(Vector w) : weights(std::move(w)) {
  if (weights.size() == 0) {
    throw EmptyDataset("measure has no atoms");
  }
  if (!weights.allFinite()) {
    throw NonFiniteEntry("measure weights contain a non-finite entry");
  }
  if ((weights.array() <= 0.0).any()) {
    throw NonPositiveWeight("measure weights must be strictly positive");
  }
}

DiscreteMeasure DiscreteMeasure::uniform(Index n) {
  if (n <= 0) {
    throw EmptyDataset("uniform measure needs at least one atom");
  }
  return DiscreteMeasure(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

std::pair<PointCloud, DiscreteMeasure> drop_zero_atoms(const PointCloud& cloud,
                                                       const Vector& weights) {
  if (weights.size() != cloud.size()) {
    throw DimensionMismatch("weights do not match cloud size");
  }
  if (!weights.allFinite()) {
    throw NonFiniteEntry("weights contain a non-finite entry");
  }
  if ((weights.array() < 0.0).any()) {
    throw NonPositiveWeight("weights must be nonnegative");
  }
  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(weights.size()));
  for (Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) keep.push_back(i);
  }
  if (keep.empty()) {
    throw NonPositiveWeight("all atoms have zero weight");
  }
  if (static_cast<Index>(keep.size()) == cloud.size()) {
    return {cloud, DiscreteMeasure(weights)};
  }
  std::cerr << "warning: dropping "
            << cloud.size() - static_cast<Index>(keep.size())
            << " zero-weight atoms from '" << cloud.name << "'\n";
  Matrix pts(static_cast<Index>(keep.size()), cloud.dim());
  Vector w(static_cast<Index>(keep.size()));
  std::vector<std::string> lbls;
  if (cloud.has_labels()) lbls.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    pts.row(static_cast<Index>(k)) = cloud.points.row(keep[k]);
    w[static_cast<Index>(k)] = weights[keep[k]];
    if (cloud.has_labels()) lbls.push_back(cloud.labels[static_cast<std::size_t>(keep[k])]);
  }
  return {PointCloud(std::move(pts), std::move(lbls), cloud.name),
          DiscreteMeasure(std::move(w))};
}

EntropySpec EntropySpec::scaled_kl(double lambda) {
  if (std::isnan(lambda) || lambda <= 0.0) {
    throw NegativeArgument("scaled KL weight must be positive");
  }
  if (std::isinf(lambda)) {
    return balanced();
  }
  return {EntropyKind::ScaledKL, lambda};
}

CouplingMatrix::CouplingMatrix(Matrix p) : entries(std::move(p)) {
  if (entries.rows() == 0 || entries.cols() == 0) {
    throw EmptyDataset("coupling matrix is empty");
  }
  if (!entries.allFinite()) {
    throw NonFiniteEntry("coupling matrix contains a non-finite entry");
  }
  if ((entries.array() < 0.0).any()) {
    throw NegativeArgument("coupling matrix entries must be nonnegative");
  }
}

LinearCostMap::LinearCostMap(Matrix m, double r)
    : matrix(std::move(m)), radius(r) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw EmptyDataset("cost map matrix is empty");
  }
  if (!matrix.allFinite()) {
    throw NonFiniteEntry("cost map matrix contains a non-finite entry");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw NegativeArgument("cost map radius must be positive and finite");
  }
  if (matrix.norm() > radius + kRadiusSlack) {
    throw NegativeArgument("cost map norm " + std::to_string(matrix.norm()) +
                           " exceeds radius " + std::to_string(radius));
  }
}

void SolveConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw NegativeArgument("epsilon must be positive and finite");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw NegativeArgument("radius must be positive and finite");
  }
  if (max_outer_iters < 1 || max_sinkhorn_iters < 1) {
    throw NegativeArgument("iteration caps must be at least 1");
  }
  if (sinkhorn_tol < 0.0 || outer_tol < 0.0) {
    throw NegativeArgument("tolerances must be nonnegative");
  }
}

void validate(const PointCloud& cloud, const DiscreteMeasure& measure) {
  if (cloud.size() != measure.size()) {
    throw DimensionMismatch("cloud has " + std::to_string(cloud.size()) +
                            " points but measure has " +
                            std::to_string(measure.size()) + " atoms");
  }
  if (!cloud.points.allFinite()) {
    throw NonFiniteEntry("point cloud contains a non-finite entry");
  }
  if (!measure.weights.allFinite()) {
    throw NonFiniteEntry("measure weights contain a non-finite entry");
  }
  if ((measure.weights.array() <= 0.0).any()) {
    throw NonPositiveWeight("measure weights must be strictly positive");
  }
}

}  // namespace cruot
