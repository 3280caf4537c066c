#pragma once

#include <vector>

#include "cruot/sinkhorn.hpp"
#include "cruot/types.hpp"

namespace cruot {

// Second moment of the plan across the two clouds:
// C(P) = sum_ij P_ij y_j x_i^T, a (target_dim x source_dim) matrix.
Matrix cross_correlation(const CouplingMatrix& plan, const PointCloud& source,
                         const PointCloud& target);

// Exact maximizer of <M, corr>_F over the Frobenius ball of the given
// radius: r * corr / |corr|_F, or the zero map when |corr|_F is below
// kMUpdateZeroThreshold.
LinearCostMap m_update(const Matrix& corr, double radius);

inline constexpr double kMUpdateZeroThreshold = 1e-14;

// Full objective J(P, M) = -sum_ij <M x_i, y_j> P_ij
//   + D_phi1(P 1 || a) + D_phi2(P^T 1 || b) + eps KL(P || a (x) b).
double objective(const CouplingMatrix& plan, const LinearCostMap& map,
                 const PointCloud& source, const DiscreteMeasure& a,
                 const PointCloud& target, const DiscreteMeasure& b,
                 const EntropySpec& entropy1, const EntropySpec& entropy2,
                 double epsilon);

// Interaction cost matrix C_ij = -<M x_i, y_j>.
Matrix interaction_cost(const LinearCostMap& map, const PointCloud& source,
                        const PointCloud& target);

// Block-coordinate descent: alternates the plan block (damped Sinkhorn on the
// current interaction cost, potentials warm-started across iterations) with
// the closed-form map block. The trace records the objective after each map
// update; the loop stops when successive trace values agree to outer_tol
// relative precision or the iteration cap is reached.
SolveResult solve_cruot(const PointCloud& source, const DiscreteMeasure& a,
                        const PointCloud& target, const DiscreteMeasure& b,
                        const SolveConfig& config);

// Same alternation but starting from an explicit map instead of the one
// selected by config.m_init. Used to chain solves, e.g. across an epsilon
// grid.
SolveResult solve_cruot_with_init(const PointCloud& source,
                                  const DiscreteMeasure& a,
                                  const PointCloud& target,
                                  const DiscreteMeasure& b,
                                  const SolveConfig& config,
                                  const LinearCostMap& init_map);

// Runs solve_cruot at each epsilon (descending recommended), warm-starting
// the map from the previous solution. Returns (epsilon, stripped objective)
// pairs where the stripped objective is J minus eps * KL(P || a (x) b).
std::vector<std::pair<double, double>> epsilon_sweep(
    const PointCloud& source, const DiscreteMeasure& a,
    const PointCloud& target, const DiscreteMeasure& b,
    const SolveConfig& base_config, const std::vector<double>& epsilons);

}  // namespace cruot
