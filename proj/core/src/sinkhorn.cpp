#include "cruot/sinkhorn.hpp"

#include <cmath>

#include "cruot/divergence.hpp"

namespace cruot {

namespace {

double damping(const EntropySpec& spec, double epsilon) {
  if (spec.is_balanced()) return 1.0;
  return spec.lambda / (spec.lambda + epsilon);
}

// pot_new_i = -damp * eps * log sum_j w_j exp((pot_j - costcol_j(i)) / eps),
// evaluated with max subtraction. cols(i) must be the cost slice seen from
// index i as a contiguous vector.
void half_update(const Matrix& cost_cols, const Vector& logw,
                 const Vector& other_pot, double damp, double eps,
                 Vector& out) {
  const Index n = cost_cols.cols();
  Vector t(cost_cols.rows());
  for (Index i = 0; i < n; ++i) {
    t = (other_pot - cost_cols.col(i)) / eps + logw;
    const double m = t.maxCoeff();
    const double lse = m + std::log((t.array() - m).exp().sum());
    out[i] = -damp * eps * lse;
  }
}

}  // namespace

UotResult solve_uot(const Matrix& cost, const DiscreteMeasure& a,
                    const DiscreteMeasure& b, const EntropySpec& entropy1,
                    const EntropySpec& entropy2, double epsilon, double tol,
                    int max_iters, const SinkhornState* warm_start) {
  const Index n = a.size();
  const Index m = b.size();
  if (cost.rows() != n || cost.cols() != m) {
    throw DimensionMismatch("solve_uot: cost shape does not match weights");
  }
  if (!cost.allFinite()) {
    throw NonFiniteEntry("solve_uot: cost contains a non-finite entry");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw NegativeArgument("solve_uot: epsilon must be positive and finite");
  }
  if (max_iters < 1) {
    throw NegativeArgument("solve_uot: max_iters must be at least 1");
  }

  const double d1 = damping(entropy1, epsilon);
  const double d2 = damping(entropy2, epsilon);
  const Vector loga = a.weights.array().log();
  const Vector logb = b.weights.array().log();

  SinkhornState st;
  if (warm_start != nullptr) {
    if (warm_start->f.size() != n || warm_start->g.size() != m) {
      throw DimensionMismatch("solve_uot: warm start has wrong shape");
    }
    st.f = warm_start->f;
    st.g = warm_start->g;
  } else {
    st.f = Vector::Zero(n);
    st.g = Vector::Zero(m);
  }

  // Column views of the cost as seen from each side; the transpose is
  // materialized once so both halves of a sweep stream contiguous memory.
  const Matrix cost_t = cost.transpose();

  Vector f_new(n), g_new(m);
  for (int it = 1; it <= max_iters; ++it) {
    half_update(cost_t, logb, st.g, d1, epsilon, f_new);
    half_update(cost, loga, f_new, d2, epsilon, g_new);
    const double delta = std::max(
        (f_new - st.f).cwiseAbs().maxCoeff(),
        (g_new - st.g).cwiseAbs().maxCoeff());
    st.f.swap(f_new);
    st.g.swap(g_new);
    st.iters = it;
    st.potential_delta = delta;
    if (!st.f.allFinite() || !st.g.allFinite()) {
      throw NumericalOverflow("solve_uot: potential left the finite range");
    }
    if (delta < tol) {
      st.converged = true;
      break;
    }
  }

  Matrix plan =
      ((st.f.replicate(1, m) + st.g.transpose().replicate(n, 1) - cost) /
       epsilon)
          .array()
          .exp();
  plan.array().colwise() *= a.weights.array();
  plan.array().rowwise() *= b.weights.transpose().array();
  if (!plan.allFinite()) {
    throw NumericalOverflow("solve_uot: plan entry left the finite range");
  }
  return {CouplingMatrix(std::move(plan)), std::move(st)};
}

std::pair<double, double> marginal_residual(const CouplingMatrix& plan,
                                            const DiscreteMeasure& a,
                                            const DiscreteMeasure& b) {
  if (plan.rows() != a.size() || plan.cols() != b.size()) {
    throw DimensionMismatch("marginal_residual: shape mismatch");
  }
  const double ra =
      (plan.row_marginal() - a.weights).cwiseAbs().sum() / a.total_mass();
  const double rb =
      (plan.col_marginal() - b.weights).cwiseAbs().sum() / b.total_mass();
  return {ra, rb};
}

double uot_objective(const Matrix& cost, const CouplingMatrix& plan,
                     const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const EntropySpec& entropy1, const EntropySpec& entropy2,
                     double epsilon) {
  if (cost.rows() != plan.rows() || cost.cols() != plan.cols()) {
    throw DimensionMismatch("uot_objective: cost and plan differ in shape");
  }
  const double linear = (cost.array() * plan.entries.array()).sum();
  const double pen1 = phi_penalty(entropy1, plan.row_marginal(), a.weights);
  const double pen2 = phi_penalty(entropy2, plan.col_marginal(), b.weights);
  const double ent = epsilon * kl_plan(plan.entries, a.weights, b.weights);
  return linear + pen1 + pen2 + ent;
}

}  // namespace cruot
