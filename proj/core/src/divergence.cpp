#include "cruot/divergence.hpp"

#include <cmath>
#include <limits>

namespace cruot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double phi_kl(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw NegativeArgument("phi_kl is only defined for x >= 0");
  }
  if (x == 0.0) return 1.0;
  return x * std::log(x) - x + 1.0;
}

double kl_divergence(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw DimensionMismatch("kl_divergence: vectors differ in length");
  }
  if (!p.allFinite() || !q.allFinite()) {
    throw NonFiniteEntry("kl_divergence: non-finite entry");
  }
  if ((p.array() < 0.0).any() || (q.array() < 0.0).any()) {
    throw NegativeArgument("kl_divergence: entries must be nonnegative");
  }
  double total = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    const double pi = p[i], qi = q[i];
    if (pi == 0.0) {
      total += qi;  // q_i * phi_kl(0)
    } else if (qi == 0.0) {
      return kInf;  // absolute continuity fails
    } else {
      total += pi * std::log(pi / qi) - pi + qi;
    }
  }
  return total;
}

double phi_penalty(const EntropySpec& spec, const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw DimensionMismatch("phi_penalty: vectors differ in length");
  }
  if (spec.is_balanced()) {
    for (Index i = 0; i < p.size(); ++i) {
      const double scale = std::max(std::abs(p[i]), std::abs(q[i]));
      // Tiny absolute floor so exact zeros compare equal to denormals.
      if (std::abs(p[i] - q[i]) > kBalancedMarginalRtol * scale + 1e-300) {
        return kInf;
      }
    }
    return 0.0;
  }
  return spec.lambda * kl_divergence(p, q);
}

double kl_plan(const Matrix& plan, const Vector& a, const Vector& b) {
  if (plan.rows() != a.size() || plan.cols() != b.size()) {
    throw DimensionMismatch("kl_plan: plan shape does not match weights");
  }
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any()) {
    throw NonPositiveWeight("kl_plan: reference weights must be positive");
  }
  double total = 0.0;
  for (Index j = 0; j < plan.cols(); ++j) {
    for (Index i = 0; i < plan.rows(); ++i) {
      const double ref = a[i] * b[j];
      const double pij = plan(i, j);
      if (pij == 0.0) {
        total += ref;
      } else {
        total += pij * std::log(pij / ref) - pij + ref;
      }
    }
  }
  return total;
}

}  // namespace cruot
