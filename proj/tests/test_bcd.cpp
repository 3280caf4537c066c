#include <doctest.h>

#include <cmath>
#include <random>

#include "cruot/bcd.hpp"
#include "cruot/divergence.hpp"

using namespace cruot;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, Index n, Index d, double shift) {
  std::normal_distribution<double> g(shift, 0.4);
  Matrix pts(n, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < n; ++i) pts(i, j) = g(rng);
  return PointCloud(std::move(pts));
}

Matrix triple_loop_correlation(const Matrix& plan, const Matrix& x,
                               const Matrix& y) {
  Matrix corr = Matrix::Zero(y.cols(), x.cols());
  for (Index i = 0; i < plan.rows(); ++i)
    for (Index j = 0; j < plan.cols(); ++j)
      corr += plan(i, j) * y.row(j).transpose() * x.row(i);
  return corr;
}

// Reduced functional: the objective with the map block maximized out,
// G(P) = -r |C(P)|_F + penalties + eps KL(P || a (x) b).
double reduced_functional(const CouplingMatrix& plan, const PointCloud& source,
                          const DiscreteMeasure& a, const PointCloud& target,
                          const DiscreteMeasure& b, const EntropySpec& e1,
                          const EntropySpec& e2, double radius, double eps) {
  const Matrix corr = cross_correlation(plan, source, target);
  return -radius * corr.norm() +
         phi_penalty(e1, plan.row_marginal(), a.weights) +
         phi_penalty(e2, plan.col_marginal(), b.weights) +
         eps * kl_plan(plan.entries, a.weights, b.weights);
}

}  // namespace

TEST_CASE("cross_correlation single atom frozen value") {
  Matrix x(1, 2), y(1, 2), p(1, 1);
  x << 1, 2;
  y << 3, 4;
  p << 1;
  const Matrix corr =
      cross_correlation(CouplingMatrix(p), PointCloud(x), PointCloud(y));
  // y x^T = [[3, 6], [4, 8]]
  CHECK(corr(0, 0) == 3.0);
  CHECK(corr(0, 1) == 6.0);
  CHECK(corr(1, 0) == 4.0);
  CHECK(corr(1, 1) == 8.0);

  const Matrix zero = cross_correlation(CouplingMatrix(Matrix::Zero(1, 1)),
                                        PointCloud(x), PointCloud(y));
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cross_correlation matches the triple loop") {
  std::mt19937_64 rng(53);
  const PointCloud x = random_cloud(rng, 4, 3, 0.5);
  const PointCloud y = random_cloud(rng, 5, 2, -0.2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix p(4, 5);
  for (Index j = 0; j < 5; ++j)
    for (Index i = 0; i < 4; ++i) p(i, j) = u(rng);
  const Matrix corr = cross_correlation(CouplingMatrix(p), x, y);
  const Matrix ref = triple_loop_correlation(p, x.points, y.points);
  CHECK((corr - ref).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(corr.rows() == 2);
  CHECK(corr.cols() == 3);
}

TEST_CASE("m_update scales to the sphere") {
  Matrix corr(2, 2);
  corr << 3, 0, 0, 4;  // frobenius norm 5
  const LinearCostMap m = m_update(corr, 2.0);
  CHECK(m.matrix(0, 0) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(m.matrix(1, 1) == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(m.frobenius_norm() == doctest::Approx(2.0).epsilon(1e-13));

  const LinearCostMap z = m_update(Matrix::Zero(3, 2), 1.0);
  CHECK(z.frobenius_norm() == 0.0);
  // Below the zero threshold the map collapses to zero too.
  const LinearCostMap tiny = m_update(Matrix::Constant(2, 2, 1e-16), 1.0);
  CHECK(tiny.frobenius_norm() == 0.0);
}

TEST_CASE("m_update maximizes the inner product over the ball") {
  std::mt19937_64 rng(59);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Matrix corr(3, 4);
    for (Index j = 0; j < 4; ++j)
      for (Index i = 0; i < 3; ++i) corr(i, j) = g(rng);
    const double r = 0.5 + 2.0 * std::abs(g(rng));
    const LinearCostMap m = m_update(corr, r);
    const double best = (corr.array() * m.matrix.array()).sum();
    CHECK(best ==
          doctest::Approx(r * corr.norm()).epsilon(1e-12));
    for (int s = 0; s < 50; ++s) {
      Matrix b(3, 4);
      for (Index j = 0; j < 4; ++j)
        for (Index i = 0; i < 3; ++i) b(i, j) = g(rng);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      b *= r * u01(rng) / b.norm();
      CHECK((corr.array() * b.array()).sum() <= best + 1e-10);
    }
  }
}

TEST_CASE("objective frozen values") {
  std::mt19937_64 rng(61);
  const PointCloud x = random_cloud(rng, 3, 2, 0.3);
  const PointCloud y = random_cloud(rng, 4, 2, 0.1);
  const DiscreteMeasure a = DiscreteMeasure::uniform(3);
  const DiscreteMeasure b = DiscreteMeasure::uniform(4);
  const auto kl = EntropySpec::scaled_kl(0.7);
  const LinearCostMap zero_map(Matrix::Zero(2, 2), 1.0);

  // Zero plan: 2 lambda + eps for unit masses.
  const double at_zero =
      objective(CouplingMatrix(Matrix::Zero(3, 4)), zero_map, x, a, y, b, kl,
                kl, 0.05);
  CHECK(at_zero == doctest::Approx(2 * 0.7 + 0.05).epsilon(1e-13));

  // Product plan with zero map: every term vanishes.
  const Matrix prod = a.weights * b.weights.transpose();
  const double at_prod =
      objective(CouplingMatrix(prod), zero_map, x, a, y, b, kl, kl, 0.05);
  CHECK(at_prod == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("objective matches term-by-term reference") {
  std::mt19937_64 rng(67);
  const PointCloud x = random_cloud(rng, 3, 2, 0.4);
  const PointCloud y = random_cloud(rng, 2, 2, -0.3);
  const DiscreteMeasure a = DiscreteMeasure::uniform(3);
  const DiscreteMeasure b = DiscreteMeasure::uniform(2);
  std::uniform_real_distribution<double> u(0.01, 0.5);
  Matrix p(3, 2);
  for (Index j = 0; j < 2; ++j)
    for (Index i = 0; i < 3; ++i) p(i, j) = u(rng);
  Matrix mm(2, 2);
  mm << 0.3, -0.4, 0.1, 0.2;
  const LinearCostMap map(mm, 1.0);
  const auto e1 = EntropySpec::scaled_kl(0.9);
  const auto e2 = EntropySpec::scaled_kl(1.7);
  const double eps = 0.07;

  double linear = 0.0;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j)
      linear -= p(i, j) * (mm * x.points.row(i).transpose())
                              .dot(y.points.row(j).transpose());
  const double ref = linear +
                     0.9 * kl_divergence(p.rowwise().sum(), a.weights) +
                     1.7 * kl_divergence(p.colwise().sum().transpose(),
                                         b.weights) +
                     eps * kl_plan(p, a.weights, b.weights);
  const double got =
      objective(CouplingMatrix(p), map, x, a, y, b, e1, e2, eps);
  CHECK(got == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("solve_cruot single pair saturates the radius and descends") {
  Matrix xp(1, 1), yp(1, 1);
  xp << 2.0;
  yp << 1.5;
  const PointCloud x(xp), y(yp);
  const DiscreteMeasure one(Vector::Ones(1));
  SolveConfig cfg;
  cfg.epsilon = 0.5;
  cfg.entropy1 = EntropySpec::scaled_kl(1.0);
  cfg.entropy2 = EntropySpec::scaled_kl(1.0);
  cfg.radius = 1.0;
  cfg.sinkhorn_tol = 1e-14;
  cfg.max_sinkhorn_iters = 10000;
  cfg.outer_tol = 1e-12;
  const SolveResult res = solve_cruot(x, one, y, one, cfg);
  CHECK(res.converged);
  CHECK(res.cost_map.frobenius_norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 1; k < res.objective_trace.size(); ++k) {
    CHECK(res.objective_trace[k] <= res.objective_trace[k - 1] + 1e-9);
  }
  // At the fixed point the objective equals the reduced functional.
  const double g = reduced_functional(res.plan, x, one, y, one, cfg.entropy1,
                                      cfg.entropy2, cfg.radius, cfg.epsilon);
  CHECK(res.objective_trace.back() ==
        doctest::Approx(g).epsilon(1e-10));
}

TEST_CASE("balanced four-point run matches the reduced functional") {
  std::mt19937_64 rng(71);
  const PointCloud x = random_cloud(rng, 4, 2, 0.8);
  const PointCloud y = random_cloud(rng, 4, 2, 0.6);
  const DiscreteMeasure a = DiscreteMeasure::uniform(4);
  const DiscreteMeasure b = DiscreteMeasure::uniform(4);
  SolveConfig cfg;
  cfg.epsilon = 0.1;
  cfg.entropy1 = EntropySpec::balanced();
  cfg.entropy2 = EntropySpec::balanced();
  cfg.sinkhorn_tol = 1e-13;
  cfg.max_sinkhorn_iters = 100000;
  cfg.outer_tol = 1e-10;
  const SolveResult res = solve_cruot(x, a, y, b, cfg);
  const double j = res.objective_trace.back();
  REQUIRE(std::isfinite(j));
  const double g = reduced_functional(res.plan, x, a, y, b, cfg.entropy1,
                                      cfg.entropy2, cfg.radius, cfg.epsilon);
  CHECK(std::abs(j - g) <= 1e-8 * std::max(1.0, std::abs(g)));
}

TEST_CASE("descent across entropy specs on seeded instances") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    std::mt19937_64 rng(seed);
    const PointCloud x = random_cloud(rng, 12, 3, 0.5);
    const PointCloud y = random_cloud(rng, 10, 2, 0.4);
    const DiscreteMeasure a = DiscreteMeasure::uniform(12);
    const DiscreteMeasure b = DiscreteMeasure::uniform(10);
    for (double lambda : {0.5, 1.0, std::numeric_limits<double>::infinity()}) {
      SolveConfig cfg;
      cfg.epsilon = 0.1;
      cfg.entropy1 = EntropySpec::scaled_kl(lambda);
      cfg.entropy2 = EntropySpec::scaled_kl(lambda);
      cfg.sinkhorn_tol = 1e-13;
      cfg.max_sinkhorn_iters = 100000;
      cfg.outer_tol = 1e-10;
      cfg.max_outer_iters = 100;
      const SolveResult res = solve_cruot(x, a, y, b, cfg);
      REQUIRE(!res.objective_trace.empty());
      for (std::size_t k = 1; k < res.objective_trace.size(); ++k) {
        CHECK(res.objective_trace[k] <= res.objective_trace[k - 1] + 1e-9);
      }
    }
  }
}

TEST_CASE("final map maximizes against the final correlation") {
  std::mt19937_64 rng(73);
  const PointCloud x = random_cloud(rng, 9, 3, 0.6);
  const PointCloud y = random_cloud(rng, 8, 2, 0.5);
  const DiscreteMeasure a = DiscreteMeasure::uniform(9);
  const DiscreteMeasure b = DiscreteMeasure::uniform(8);
  SolveConfig cfg;
  cfg.epsilon = 0.1;
  cfg.entropy1 = EntropySpec::scaled_kl(1.0);
  cfg.entropy2 = EntropySpec::scaled_kl(1.0);
  cfg.sinkhorn_tol = 1e-12;
  cfg.max_sinkhorn_iters = 50000;
  const SolveResult res = solve_cruot(x, a, y, b, cfg);
  const Matrix corr = cross_correlation(res.plan, x, y);
  const double at_m = (corr.array() * res.cost_map.matrix.array()).sum();
  CHECK(at_m == doctest::Approx(cfg.radius * corr.norm()).epsilon(1e-10));
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    Matrix bmat(2, 3);
    for (Index j = 0; j < 3; ++j)
      for (Index i = 0; i < 2; ++i) bmat(i, j) = g(rng);
    bmat *= cfg.radius * u01(rng) / bmat.norm();
    CHECK((corr.array() * bmat.array()).sum() <= at_m + 1e-10);
  }
}

TEST_CASE("rotating the target rotates the map and keeps the plan") {
  std::mt19937_64 rng(79);
  const PointCloud x = random_cloud(rng, 8, 3, 0.7);
  const PointCloud y = random_cloud(rng, 8, 2, 0.5);
  const DiscreteMeasure a = DiscreteMeasure::uniform(8);
  const DiscreteMeasure b = DiscreteMeasure::uniform(8);
  SolveConfig cfg;
  cfg.epsilon = 0.1;
  cfg.entropy1 = EntropySpec::scaled_kl(1.0);
  cfg.entropy2 = EntropySpec::scaled_kl(1.0);
  cfg.sinkhorn_tol = 1e-13;
  cfg.max_sinkhorn_iters = 100000;
  cfg.outer_tol = 1e-10;

  Matrix rot(2, 2);
  const double th = 0.7;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const PointCloud y_rot(y.points * rot.transpose());

  const SolveResult base = solve_cruot(x, a, y, b, cfg);
  const SolveResult rotated = solve_cruot(x, a, y_rot, b, cfg);
  CHECK((rotated.plan.entries - base.plan.entries).cwiseAbs().maxCoeff() <
        1e-8);
  CHECK((rotated.cost_map.matrix - rot * base.cost_map.matrix)
            .cwiseAbs()
            .maxCoeff() < 1e-8);
}

TEST_CASE("zero init on centered data stays at the product fixed point") {
  std::mt19937_64 rng(83);
  PointCloud x = random_cloud(rng, 6, 2, 0.0);
  PointCloud y = random_cloud(rng, 5, 2, 0.0);
  // Center exactly.
  x.points.rowwise() -= x.points.colwise().mean();
  y.points.rowwise() -= y.points.colwise().mean();
  const DiscreteMeasure a = DiscreteMeasure::uniform(6);
  const DiscreteMeasure b = DiscreteMeasure::uniform(5);
  SolveConfig cfg;
  cfg.epsilon = 0.1;
  cfg.entropy1 = EntropySpec::balanced();
  cfg.entropy2 = EntropySpec::balanced();
  cfg.m_init = MInit::Zero;
  cfg.sinkhorn_tol = 1e-13;
  cfg.max_sinkhorn_iters = 10000;
  const SolveResult res = solve_cruot(x, a, y, b, cfg);
  CHECK(res.cost_map.frobenius_norm() == 0.0);
  const Matrix prod = a.weights * b.weights.transpose();
  CHECK((res.plan.entries - prod).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("product init escapes the degenerate start on centered data") {
  // With centered clouds the product-coupling correlation vanishes; the
  // fallback direction must let the solver reach a saturated map.
  std::mt19937_64 rng(89);
  PointCloud x = random_cloud(rng, 10, 3, 0.0);
  x.points.rowwise() -= x.points.colwise().mean();
  Matrix truth(2, 3);
  truth << 0.6, -0.2, 0.1, 0.3, 0.5, -0.4;
  PointCloud y(x.points * truth.transpose());
  const DiscreteMeasure a = DiscreteMeasure::uniform(10);
  const DiscreteMeasure b = DiscreteMeasure::uniform(10);
  SolveConfig cfg;
  cfg.epsilon = 0.05;
  cfg.entropy1 = EntropySpec::scaled_kl(1.0);
  cfg.entropy2 = EntropySpec::scaled_kl(1.0);
  cfg.sinkhorn_tol = 1e-12;
  cfg.max_sinkhorn_iters = 50000;
  const SolveResult res = solve_cruot(x, a, y, b, cfg);
  CHECK(res.cost_map.frobenius_norm() ==
        doctest::Approx(cfg.radius).epsilon(1e-10));
  CHECK(res.objective_trace.back() < -1e-3);
}

TEST_CASE("epsilon sweep returns stripped values per epsilon") {
  std::mt19937_64 rng(97);
  const PointCloud x = random_cloud(rng, 8, 2, 0.5);
  const PointCloud y = random_cloud(rng, 7, 2, 0.4);
  const DiscreteMeasure a = DiscreteMeasure::uniform(8);
  const DiscreteMeasure b = DiscreteMeasure::uniform(7);
  SolveConfig cfg;
  cfg.entropy1 = EntropySpec::scaled_kl(1.0);
  cfg.entropy2 = EntropySpec::scaled_kl(1.0);
  cfg.sinkhorn_tol = 1e-12;
  cfg.max_sinkhorn_iters = 50000;

  cfg.epsilon = 0.2;
  const SolveResult direct = solve_cruot(x, a, y, b, cfg);
  const double direct_stripped =
      direct.objective_trace.back() -
      0.2 * kl_plan(direct.plan.entries, a.weights, b.weights);

  const auto single = epsilon_sweep(x, a, y, b, cfg, {0.2});
  REQUIRE(single.size() == 1);
  CHECK(single[0].first == 0.2);
  CHECK(single[0].second == doctest::Approx(direct_stripped).epsilon(1e-9));

  const auto sweep = epsilon_sweep(x, a, y, b, cfg, {0.4, 0.2, 0.1});
  REQUIRE(sweep.size() == 3);
  for (const auto& [eps, val] : sweep) CHECK(std::isfinite(val));
}
