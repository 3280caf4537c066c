#pragma once

#include <utility>

#include "cruot/types.hpp"

namespace cruot {

// Dual potentials of the entropic unbalanced transport problem. The plan is
// recovered as P_ij = a_i b_j exp((f_i + g_j - C_ij) / eps).
struct SinkhornState {
  Vector f;  // size n
  Vector g;  // size m
  int iters = 0;
  double potential_delta = 0.0;  // sup-norm change in the last sweep
  bool converged = false;
};

struct UotResult {
  CouplingMatrix plan;
  SinkhornState state;
};

// Solves min_P <C,P> + D_phi1(P 1 || a) + D_phi2(P^T 1 || b) + eps KL(P||a(x)b)
// by damped log-domain Sinkhorn sweeps. Each sweep updates f then g via a
// softmin; the damping factor is lambda/(lambda+eps) for ScaledKL and 1 for
// Balanced. Stops when the sup-norm change of (f, g) drops below tol; hitting
// max_iters first leaves state.converged false but still returns the plan.
// warm_start, when given, seeds the potentials (shape-checked).
// Throws NumericalOverflow if a potential leaves the finite range.
UotResult solve_uot(const Matrix& cost, const DiscreteMeasure& a,
                    const DiscreteMeasure& b, const EntropySpec& entropy1,
                    const EntropySpec& entropy2, double epsilon, double tol,
                    int max_iters, const SinkhornState* warm_start = nullptr);

// L1 distances of the plan marginals from (a, b), each relative to the
// corresponding total mass.
std::pair<double, double> marginal_residual(const CouplingMatrix& plan,
                                            const DiscreteMeasure& a,
                                            const DiscreteMeasure& b);

// Primal objective of the problem solved by solve_uot, evaluated at an
// arbitrary plan. Balanced penalties use the tolerance-based equality check.
double uot_objective(const Matrix& cost, const CouplingMatrix& plan,
                     const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const EntropySpec& entropy1, const EntropySpec& entropy2,
                     double epsilon);

}  // namespace cruot
