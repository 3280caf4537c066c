#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cruot/errors.hpp"

namespace cruot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// A set of points in R^d, rows are points. Labels are optional; when present
// there is exactly one per point. Treated as immutable after construction.
struct PointCloud {
  Matrix points;                    // n x d
  std::vector<std::string> labels;  // empty, or size n
  std::string name;

  PointCloud() = default;
  PointCloud(Matrix pts, std::vector<std::string> lbls = {},
             std::string name = {});

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  bool has_labels() const { return !labels.empty(); }
};

// Strictly positive atom weights. Total mass is derived, never stored.
struct DiscreteMeasure {
  Vector weights;

  DiscreteMeasure() = default;
  explicit DiscreteMeasure(Vector w);

  Index size() const { return weights.size(); }
  double total_mass() const { return weights.sum(); }

  static DiscreteMeasure uniform(Index n);
};

// Drops atoms with zero weight from a (cloud, weights) pair. Negative or
// non-finite weights are still rejected. Emits a stderr warning when atoms
// are removed so silent shrinkage is visible in logs.
std::pair<PointCloud, DiscreteMeasure> drop_zero_atoms(const PointCloud& cloud,
                                                       const Vector& weights);

// Marginal penalty selector: exact marginal equality, or a KL divergence
// scaled by lambda. lambda = +inf is normalized to Balanced at construction.
enum class EntropyKind { Balanced, ScaledKL };

struct EntropySpec {
  EntropyKind kind = EntropyKind::Balanced;
  double lambda = std::numeric_limits<double>::infinity();

  static EntropySpec balanced() { return {EntropyKind::Balanced, std::numeric_limits<double>::infinity()}; }
  static EntropySpec scaled_kl(double lambda);

  bool is_balanced() const { return kind == EntropyKind::Balanced; }
};

// Tolerance used when a Balanced spec checks marginal equality: entries must
// agree to this relative precision, else the penalty is +inf.
inline constexpr double kBalancedMarginalRtol = 1e-9;

// Nonnegative finite transport plan between two discrete measures.
struct CouplingMatrix {
  Matrix entries;  // n x m

  CouplingMatrix() = default;
  explicit CouplingMatrix(Matrix p);

  Index rows() const { return entries.rows(); }
  Index cols() const { return entries.cols(); }
  Vector row_marginal() const { return entries.rowwise().sum(); }
  Vector col_marginal() const { return entries.colwise().sum(); }
  double total_mass() const { return entries.sum(); }
};

// Frobenius-norm slack admitted when checking a map against its radius;
// covers rounding in the projection M = r C / |C|_F.
inline constexpr double kRadiusSlack = 1e-12;

// Linear map y ~ Mx defining the interaction cost -<Mx, y>, constrained to
// the Frobenius ball of the given radius.
struct LinearCostMap {
  Matrix matrix;  // q x p
  double radius = 1.0;

  LinearCostMap() = default;
  LinearCostMap(Matrix m, double radius);

  Index target_dim() const { return matrix.rows(); }
  Index source_dim() const { return matrix.cols(); }
  double frobenius_norm() const { return matrix.norm(); }
};

enum class MInit { ProductCoupling, Zero, Seeded };

struct SolveConfig {
  double epsilon = 5e-3;
  EntropySpec entropy1 = EntropySpec::balanced();
  EntropySpec entropy2 = EntropySpec::balanced();
  double radius = 1.0;
  int max_outer_iters = 200;
  int max_sinkhorn_iters = 2000;
  double sinkhorn_tol = 1e-9;
  double outer_tol = 1e-7;
  MInit m_init = MInit::ProductCoupling;
  std::uint64_t m_init_seed = 0;
  bool standardize = false;

  void validate() const;
};

struct SolveResult {
  LinearCostMap cost_map;
  CouplingMatrix plan;
  std::vector<double> objective_trace;  // one entry per outer iteration
  bool converged = false;
  int outer_iters_used = 0;
  std::pair<double, double> marginal_residuals{0.0, 0.0};
};

// Checks that a cloud and a measure describe the same atoms. Re-validates
// entries so that hand-assembled structs are caught too.
void validate(const PointCloud& cloud, const DiscreteMeasure& measure);

}  // namespace cruot
