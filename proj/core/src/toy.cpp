#include "cruot/toy.hpp"

#include <cmath>
#include <random>

namespace cruot {

namespace {

// Explicit transforms over raw 53-bit uniforms keep the streams identical
// across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

double gaussian(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Uniform draw from a solid axis-aligned ellipsoid: direction from a
// normalized Gaussian, radius from U^(1/d).
template <int Dim>
Eigen::Matrix<double, Dim, 1> solid_ellipsoid(std::mt19937_64& rng,
                                              const double (&center)[Dim],
                                              const double (&axes)[Dim]) {
  Eigen::Matrix<double, Dim, 1> g;
  for (int d = 0; d < Dim; ++d) g[d] = gaussian(rng);
  const double norm = g.norm();
  if (norm == 0.0) g[0] = 1.0;
  g /= g.norm();
  const double radius = std::pow(uniform01(rng), 1.0 / Dim);
  Eigen::Matrix<double, Dim, 1> out;
  for (int d = 0; d < Dim; ++d) out[d] = center[d] + axes[d] * radius * g[d];
  return out;
}

}  // namespace

Dataset generate_toy_source(const ToyOptions& opts) {
  if (opts.n_source < 1) {
    throw EmptyDataset("toy source needs at least one point");
  }
  std::mt19937_64 rng(opts.seed ^ 0x736f757263653364ULL);
  const double s = kToyScale;
  const double center_a[3] = {s, 0.0, 0.0};
  const double center_b[3] = {-s, 0.7 * s, 0.0};
  const double axes[3] = {0.5 * s, 0.3 * s, 0.2 * s};

  Matrix pts(opts.n_source, 3);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(opts.n_source));
  for (Index i = 0; i < opts.n_source; ++i) {
    const bool first = uniform01(rng) < 0.5;
    const auto p = first ? solid_ellipsoid<3>(rng, center_a, axes)
                         : solid_ellipsoid<3>(rng, center_b, axes);
    pts.row(i) = p.transpose();
    labels.push_back(first ? "blob_a" : "blob_b");
  }
  Dataset ds;
  ds.cloud = PointCloud(std::move(pts), std::move(labels), "toy_source");
  ds.measure = DiscreteMeasure::uniform(opts.n_source);
  return ds;
}

Dataset generate_toy_target(const ToyOptions& opts) {
  if (opts.n_target < 1) {
    throw EmptyDataset("toy target needs at least one point");
  }
  std::mt19937_64 rng(opts.seed ^ 0x7461726765743264ULL);
  const double s = kToyScale;
  const double ellipse_center[2] = {s, 0.0};
  const double ellipse_axes[2] = {0.5 * s, 0.25 * s};
  const double square_center[2] = {-s, 0.7 * s};
  const double half_side = 0.25 * s;

  Matrix pts(opts.n_target, 2);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(opts.n_target));
  for (Index i = 0; i < opts.n_target; ++i) {
    if (uniform01(rng) < kToyEllipseWeight) {
      pts.row(i) =
          solid_ellipsoid<2>(rng, ellipse_center, ellipse_axes).transpose();
      labels.push_back("ellipse");
    } else {
      pts(i, 0) = square_center[0] + half_side * (2.0 * uniform01(rng) - 1.0);
      pts(i, 1) = square_center[1] + half_side * (2.0 * uniform01(rng) - 1.0);
      labels.push_back("square");
    }
  }
  Dataset ds;
  ds.cloud = PointCloud(std::move(pts), std::move(labels), "toy_target");
  ds.measure = DiscreteMeasure::uniform(opts.n_target);
  return ds;
}

}  // namespace cruot
