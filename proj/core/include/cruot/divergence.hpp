#pragma once

#include "cruot/types.hpp"

namespace cruot {

// Pointwise KL entropy function: x log x - x + 1, with phi_kl(0) = 1.
double phi_kl(double x);

// KL divergence between nonnegative vectors, sum_i q_i phi_kl(p_i / q_i).
// Returns +inf when p puts mass where q has none. Vectors may differ from
// probability vectors; masses need not match.
double kl_divergence(const Vector& p, const Vector& q);

// Marginal penalty D_phi(p || q) under the given spec. Balanced specs return
// 0 when the vectors agree entrywise to kBalancedMarginalRtol relative
// precision and +inf otherwise; ScaledKL returns lambda * kl_divergence.
double phi_penalty(const EntropySpec& spec, const Vector& p, const Vector& q);

// KL divergence of a plan against the product measure a (x) b:
// sum_ij [P_ij log(P_ij / (a_i b_j)) - P_ij + a_i b_j].
double kl_plan(const Matrix& plan, const Vector& a, const Vector& b);

}  // namespace cruot
