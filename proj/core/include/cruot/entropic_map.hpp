#pragma once

#include "cruot/types.hpp"

namespace cruot {

// Barycentric transport map built from a solved coupling. Maps a source point
// x to a softmax-weighted average of target points,
//   T(x) = sum_j y_j w_j(x) / sum_j w_j(x),
//   w_j(x) = b_j exp((g_j + <Mx, y_j>) / eps_map),
// where g is the second dual potential of a balanced entropic transport
// problem between the pushforward of the source marginal under M and the
// target marginal, under cost -<y', y>. Only g is stored; the map is
// invariant to rescaling the stored weights and to additive shifts of g.
struct EntropicMapModel {
  LinearCostMap cost_map;
  Matrix target_points;    // m x q
  Vector target_weights;   // m, the plan's column marginal, rescaled
  Vector potential;        // m, dual potential g
  double epsilon_map = 5e-3;

  Index target_dim() const { return target_points.cols(); }
};

// Fits the map for a solved pair (plan, cost_map). The inner balanced
// transport problem runs at epsilon_map with the given tolerance and
// iteration cap. Throws DegenerateMarginal when a plan marginal carries
// no usable mass.
EntropicMapModel fit_map(const CouplingMatrix& plan,
                         const LinearCostMap& cost_map,
                         const PointCloud& source, const PointCloud& target,
                         double epsilon_map, double tol = 1e-9,
                         int max_iters = 20000);

// Evaluates the fitted map at one source point (length p). The result lies
// in the convex hull of the target points.
Vector evaluate_map(const EntropicMapModel& model, const Vector& x);

// Maps every source point, producing an n x q cloud that carries the source
// labels through unchanged.
PointCloud align(const EntropicMapModel& model, const PointCloud& source);

}  // namespace cruot
