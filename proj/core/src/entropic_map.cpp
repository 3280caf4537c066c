#include "cruot/entropic_map.hpp"

#include <cmath>

#include "cruot/sinkhorn.hpp"

namespace cruot {

EntropicMapModel fit_map(const CouplingMatrix& plan,
                         const LinearCostMap& cost_map,
                         const PointCloud& source, const PointCloud& target,
                         double epsilon_map, double tol, int max_iters) {
  if (plan.rows() != source.size() || plan.cols() != target.size()) {
    throw DimensionMismatch("fit_map: plan does not match clouds");
  }
  if (cost_map.source_dim() != source.dim() ||
      cost_map.target_dim() != target.dim()) {
    throw DimensionMismatch("fit_map: cost map does not match clouds");
  }
  if (!(epsilon_map > 0.0) || !std::isfinite(epsilon_map)) {
    throw NegativeArgument("fit_map: epsilon_map must be positive and finite");
  }

  Vector row_m = plan.row_marginal();
  Vector col_m = plan.col_marginal();
  const double mass_r = row_m.sum();
  const double mass_c = col_m.sum();
  if (!(mass_r > 1e-300) || !(mass_c > 1e-300)) {
    throw DegenerateMarginal("fit_map: plan marginal carries no usable mass");
  }
  // Unit-mass rescaling; both marginals share the plan's total mass, and the
  // map itself is invariant to this, so it is purely for conditioning.
  row_m /= mass_r;
  col_m /= mass_c;

  // Atoms whose marginal weight underflowed to zero cannot enter the inner
  // balanced problem; they also contribute nothing to the map, so they are
  // dropped from it.
  std::vector<Index> rows, cols;
  for (Index i = 0; i < row_m.size(); ++i)
    if (row_m[i] > 0.0) rows.push_back(i);
  for (Index j = 0; j < col_m.size(); ++j)
    if (col_m[j] > 0.0) cols.push_back(j);
  const Index nr = static_cast<Index>(rows.size());
  const Index nc = static_cast<Index>(cols.size());

  // Pushforward of the source marginal under the map: atoms M x_i.
  const Matrix pushed = source.points * cost_map.matrix.transpose();  // n x q
  Matrix z(nr, pushed.cols());
  Vector rw(nr);
  for (Index k = 0; k < nr; ++k) {
    z.row(k) = pushed.row(rows[static_cast<std::size_t>(k)]);
    rw[k] = row_m[rows[static_cast<std::size_t>(k)]];
  }
  Matrix yt(nc, target.dim());
  Vector cw(nc);
  for (Index k = 0; k < nc; ++k) {
    yt.row(k) = target.points.row(cols[static_cast<std::size_t>(k)]);
    cw[k] = col_m[cols[static_cast<std::size_t>(k)]];
  }
  // Dropped atoms leave the kept masses slightly unequal; the balanced inner
  // problem needs them to match, and the map ignores the rescaling.
  rw /= rw.sum();
  cw /= cw.sum();

  const Matrix inner_cost = -z * yt.transpose();  // nr x nc

  auto res = solve_uot(inner_cost, DiscreteMeasure(rw), DiscreteMeasure(cw),
                       EntropySpec::balanced(), EntropySpec::balanced(),
                       epsilon_map, tol, max_iters);

  EntropicMapModel model;
  model.cost_map = cost_map;
  model.target_points = std::move(yt);
  model.target_weights = std::move(cw);
  model.potential = res.state.g;
  model.epsilon_map = epsilon_map;
  return model;
}

Vector evaluate_map(const EntropicMapModel& model, const Vector& x) {
  if (x.size() != model.cost_map.source_dim()) {
    throw DimensionMismatch("evaluate_map: point has wrong dimension");
  }
  const Vector mx = model.cost_map.matrix * x;  // q
  // log w_j = log b_j + (g_j + <Mx, y_j>) / eps; softmax with max shift.
  Vector logw = model.target_weights.array().log() +
                ((model.potential + model.target_points * mx).array() /
                 model.epsilon_map);
  const double shift = logw.maxCoeff();
  Vector w = (logw.array() - shift).exp();
  return model.target_points.transpose() * w / w.sum();
}

PointCloud align(const EntropicMapModel& model, const PointCloud& source) {
  if (source.dim() != model.cost_map.source_dim()) {
    throw DimensionMismatch("align: cloud has wrong dimension");
  }
  Matrix out(source.size(), model.target_dim());
  for (Index i = 0; i < source.size(); ++i) {
    out.row(i) = evaluate_map(model, source.points.row(i)).transpose();
  }
  return PointCloud(std::move(out), source.labels,
                    source.name.empty() ? "aligned" : source.name + "_aligned");
}

}  // namespace cruot
