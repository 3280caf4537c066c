#include "cruot/bcd.hpp"

#include <cmath>
#include <random>

#include "cruot/divergence.hpp"

namespace cruot {

namespace {

// Deterministic unit-Frobenius-norm matrix for seeded starts and for the
// fallback when the product-coupling correlation vanishes (centered data).
Matrix seeded_direction(Index q, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix m(q, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < q; ++i) {
      // Box-Muller on explicit 53-bit uniforms; avoids distribution objects
      // whose streams differ across standard libraries.
      const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
      const double u2 = static_cast<double>(rng() >> 11) * 0x1p-53;
      m(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
  }
  if (m.norm() == 0.0) m(0, 0) = 1.0;  // astronomically unlikely
  return m / m.norm();
}

LinearCostMap initial_map(const PointCloud& source, const DiscreteMeasure& a,
                          const PointCloud& target, const DiscreteMeasure& b,
                          const SolveConfig& cfg) {
  const Index p = source.dim();
  const Index q = target.dim();
  switch (cfg.m_init) {
    case MInit::Zero:
      return LinearCostMap(Matrix::Zero(q, p), cfg.radius);
    case MInit::Seeded:
      return LinearCostMap(cfg.radius * seeded_direction(q, p, cfg.m_init_seed),
                           cfg.radius);
    case MInit::ProductCoupling: {
      const Matrix product = a.weights * b.weights.transpose() / b.total_mass();
      const Matrix corr =
          cross_correlation(CouplingMatrix(product), source, target);
      // Centered clouds make this correlation vanish exactly, and a zero map
      // is a fixed point of the alternation. Fall back to a deterministic
      // direction so the solver can leave it.
      const double scale =
          std::max({1.0, source.points.cwiseAbs().maxCoeff(),
                    target.points.cwiseAbs().maxCoeff()});
      if (corr.norm() <= 1e-12 * scale * scale * a.total_mass()) {
        return LinearCostMap(
            cfg.radius * seeded_direction(q, p, cfg.m_init_seed), cfg.radius);
      }
      return m_update(corr, cfg.radius);
    }
  }
  throw ConfigError("unknown m_init");
}

// Cold starts at small epsilon converge slowly; running a few halving stages
// from a coarse epsilon and carrying the potentials over gets the first plan
// block into the contraction region cheaply. Fixed points are unchanged: the
// plan block is strictly convex, so only the path depends on the start.
SinkhornState annealed_first_state(const Matrix& cost,
                                   const DiscreteMeasure& a,
                                   const DiscreteMeasure& b,
                                   const SolveConfig& cfg) {
  SinkhornState st;
  st.f = Vector::Zero(a.size());
  st.g = Vector::Zero(b.size());
  const double span = cost.maxCoeff() - cost.minCoeff();
  double eps = span / 8.0;
  if (!(eps > cfg.epsilon)) return st;
  std::vector<double> stages;
  while (eps > cfg.epsilon && stages.size() < 40) {
    stages.push_back(eps);
    eps *= 0.5;
  }
  for (double stage_eps : stages) {
    auto r = solve_uot(cost, a, b, cfg.entropy1, cfg.entropy2, stage_eps,
                       std::max(cfg.sinkhorn_tol, 1e-6),
                       cfg.max_sinkhorn_iters, &st);
    st = std::move(r.state);
  }
  st.converged = false;
  return st;
}

}  // namespace

Matrix cross_correlation(const CouplingMatrix& plan, const PointCloud& source,
                         const PointCloud& target) {
  if (plan.rows() != source.size() || plan.cols() != target.size()) {
    throw DimensionMismatch("cross_correlation: plan does not match clouds");
  }
  // sum_ij P_ij y_j x_i^T = Y^T P^T X
  return target.points.transpose() * plan.entries.transpose() * source.points;
}

LinearCostMap m_update(const Matrix& corr, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw NegativeArgument("m_update: radius must be positive and finite");
  }
  const double norm = corr.norm();
  if (norm <= kMUpdateZeroThreshold) {
    return LinearCostMap(Matrix::Zero(corr.rows(), corr.cols()), radius);
  }
  return LinearCostMap(radius / norm * corr, radius);
}

Matrix interaction_cost(const LinearCostMap& map, const PointCloud& source,
                        const PointCloud& target) {
  if (map.source_dim() != source.dim() || map.target_dim() != target.dim()) {
    throw DimensionMismatch("interaction_cost: map does not match clouds");
  }
  // C_ij = -x_i^T M^T y_j
  return -source.points * map.matrix.transpose() * target.points.transpose();
}

double objective(const CouplingMatrix& plan, const LinearCostMap& map,
                 const PointCloud& source, const DiscreteMeasure& a,
                 const PointCloud& target, const DiscreteMeasure& b,
                 const EntropySpec& entropy1, const EntropySpec& entropy2,
                 double epsilon) {
  validate(source, a);
  validate(target, b);
  const Matrix cost = interaction_cost(map, source, target);
  return uot_objective(cost, plan, a, b, entropy1, entropy2, epsilon);
}

SolveResult solve_cruot_with_init(const PointCloud& source,
                                  const DiscreteMeasure& a,
                                  const PointCloud& target,
                                  const DiscreteMeasure& b,
                                  const SolveConfig& config,
                                  const LinearCostMap& init_map) {
  config.validate();
  validate(source, a);
  validate(target, b);
  if (init_map.source_dim() != source.dim() ||
      init_map.target_dim() != target.dim()) {
    throw DimensionMismatch("solve_cruot: initial map does not match clouds");
  }

  LinearCostMap map = init_map;
  SolveResult result;
  result.objective_trace.reserve(
      static_cast<std::size_t>(config.max_outer_iters));

  SinkhornState state;
  bool have_state = false;
  CouplingMatrix plan;
  double prev_obj = std::numeric_limits<double>::infinity();
  bool sinkhorn_ok = false;
  bool outer_ok = false;

  for (int it = 1; it <= config.max_outer_iters; ++it) {
    const Matrix cost = interaction_cost(map, source, target);
    if (!have_state) {
      state = annealed_first_state(cost, a, b, config);
      have_state = true;
    }
    auto uot = solve_uot(cost, a, b, config.entropy1, config.entropy2,
                         config.epsilon, config.sinkhorn_tol,
                         config.max_sinkhorn_iters, &state);
    state = std::move(uot.state);
    sinkhorn_ok = state.converged;
    plan = std::move(uot.plan);

    map = m_update(cross_correlation(plan, source, target), config.radius);
    const double obj =
        objective(plan, map, source, a, target, b, config.entropy1,
                  config.entropy2, config.epsilon);
    result.objective_trace.push_back(obj);
    result.outer_iters_used = it;
    if (it > 1 && std::isfinite(obj) && std::isfinite(prev_obj) &&
        std::abs(obj - prev_obj) <=
            config.outer_tol * (1.0 + std::abs(prev_obj))) {
      outer_ok = true;
      break;
    }
    prev_obj = obj;
  }

  result.converged = outer_ok && sinkhorn_ok;
  result.cost_map = std::move(map);
  result.plan = std::move(plan);
  result.marginal_residuals = marginal_residual(result.plan, a, b);
  return result;
}

SolveResult solve_cruot(const PointCloud& source, const DiscreteMeasure& a,
                        const PointCloud& target, const DiscreteMeasure& b,
                        const SolveConfig& config) {
  config.validate();
  validate(source, a);
  validate(target, b);
  return solve_cruot_with_init(source, a, target, b, config,
                               initial_map(source, a, target, b, config));
}

std::vector<std::pair<double, double>> epsilon_sweep(
    const PointCloud& source, const DiscreteMeasure& a,
    const PointCloud& target, const DiscreteMeasure& b,
    const SolveConfig& base_config, const std::vector<double>& epsilons) {
  std::vector<std::pair<double, double>> out;
  out.reserve(epsilons.size());
  SolveConfig cfg = base_config;
  LinearCostMap carry;
  bool have_carry = false;
  for (double eps : epsilons) {
    cfg.epsilon = eps;
    SolveResult res =
        have_carry ? solve_cruot_with_init(source, a, target, b, cfg, carry)
                   : solve_cruot(source, a, target, b, cfg);
    const double ent =
        cfg.epsilon * kl_plan(res.plan.entries, a.weights, b.weights);
    const double full =
        objective(res.plan, res.cost_map, source, a, target, b, cfg.entropy1,
                  cfg.entropy2, cfg.epsilon);
    out.emplace_back(cfg.epsilon, full - ent);
    carry = res.cost_map;
    have_carry = true;
  }
  return out;
}

}  // namespace cruot
