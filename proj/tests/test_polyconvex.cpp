#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tnconf/polyconvex.hpp"

using namespace tnconf;

namespace {

std::map<MultiIndex, Rat> random_alpha(Rng& rng, std::size_t n, std::size_t m) {
  std::map<MultiIndex, Rat> alpha;
  for (const auto& z : all_minor_indices(n, m))
    if (rng.coin()) alpha[z] = rng.rational_in(0, 2);
  return alpha;
}

Eigen::MatrixXd random_real(Rng& rng, std::size_t n, std::size_t m, double radius) {
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
  return x * (rng.uniform(0.1, radius) / x.norm());
}

// cof(X)ᵀ for 2×2 X written out by hand.
RatMatrix cof_t_2x2(const RatMatrix& x) { return RatMatrix{{x(1, 1), -x(1, 0)}, {-x(0, 1), x(0, 0)}}; }

// Sum of the coordinates of Φ: affine, so convex but not strictly.
class LinearMinorsG : public MinorFunction {
 public:
  bool exact() const override { return true; }
  Rat value(const RatVector& p) const override {
    Rat s = 0;
    for (const auto& x : p) s += x;
    return s;
  }
  RatVector gradient(const RatVector& p) const override { return RatVector(p.size(), Rat(1)); }
  double value(const RealVector& p) const override {
    double s = 0;
    for (double x : p) s += x;
    return s;
  }
  RealVector gradient(const RealVector& p) const override { return RealVector(p.size(), 1.0); }
};

}  // namespace

TEST_CASE("phi") {
  RatMatrix x{{1, 2}, {3, 4}};
  CHECK(phi(x) == RatVector{Rat(1), Rat(2), Rat(3), Rat(4), Rat(-2)});
  CHECK(phi(oracle::t5_points()[1]).size() == 8 + 6);
  CHECK(phi_size(4, 2) == 14);
  CHECK(phi_size(3, 3) == 9 + 9 + 1);
  CHECK(is_zero(phi(RatMatrix::zero(3, 2))));
}

TEST_CASE("gradients in exact mode") {
  Rng rng(41);
  auto quad = PolyconvexEnergy::quadratic(3, 2);
  RatMatrix x = rng.matrix(3, 2);
  CHECK(grad_f(quad, x) == x);
  CHECK(quad.value(x) == frobenius_sq(x) / 2);

  std::map<MultiIndex, Rat> alpha{{MultiIndex{{0, 1}, {0, 1}}, Rat(1, 2)}};
  auto e = PolyconvexEnergy::quad_minors(2, 2, Rat(1, 2), alpha);
  for (int trial = 0; trial < 50; ++trial) {
    RatMatrix y = rng.matrix(2, 2);
    CHECK(e.value(y) == frobenius_sq(y) / 2 + det(y) * det(y) / 2);
    CHECK(grad_f(e, y) == y + det(y) * cof_t_2x2(y));
  }
}

TEST_CASE("property: gradients match finite differences") {
  Rng rng(42);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 2}}) {
    std::vector<PolyconvexEnergy> energies{PolyconvexEnergy::quadratic(n, m),
                                           PolyconvexEnergy::quad_minors(n, m, Rat(1, 10), random_alpha(rng, n, m)),
                                           PolyconvexEnergy::area(n, m)};
    for (const auto& e : energies) {
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd x = random_real(rng, n, m, 2.0);
        Eigen::MatrixXd fd = oracle::fd_gradient([&](const Eigen::MatrixXd& y) { return e.value(y); }, x);
        CHECK(oracle::rel_err(e.gradient(x), fd) < 1e-7);
      }
    }
  }
}

TEST_CASE("float and exact evaluation agree") {
  Rng rng(43);
  auto e = PolyconvexEnergy::quad_minors(3, 3, Rat(1, 3), random_alpha(rng, 3, 3));
  RatMatrix x = rng.matrix(3, 3);
  Eigen::MatrixXd xr = to_real(x);
  CHECK(e.value(xr) == doctest::Approx(e.value(x).get_d()).epsilon(1e-12));
  CHECK(oracle::rel_err(e.gradient(xr), to_real(e.gradient(x))) < 1e-12);
}

TEST_CASE("energy construction errors") {
  CHECK_THROWS_AS(PolyconvexEnergy::quad_minors(2, 2, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(PolyconvexEnergy::quad_minors(2, 2, 1, {{MultiIndex{{0, 1}, {0, 1}}, Rat(-1)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PolyconvexEnergy::quad_minors(2, 2, 1, {{MultiIndex{{0}, {0}}, Rat(1)}}), std::out_of_range);
  auto area = PolyconvexEnergy::area(2, 2);
  CHECK_FALSE(area.exact());
  CHECK_THROWS_AS(area.value(RatMatrix::identity(2)), std::domain_error);
  CHECK_THROWS_AS(PolyconvexEnergy::quadratic(2, 2).value(RatMatrix(3, 2)), ShapeError);
}

TEST_CASE("inclusion points") {
  auto quad = PolyconvexEnergy::quadratic(4, 2);
  RatMatrix z1 = oracle::t5_points()[0];
  InclusionPoint p = inclusion_point(quad, z1);
  CHECK(frobenius_sq(z1) == 1208);
  CHECK(p.c == 604);
  CHECK(p.Y == z1);
  CHECK(p.Z == z1.transpose() * z1 - Rat(604) * RatMatrix::identity(2));

  Rng rng(44);
  auto e = PolyconvexEnergy::quad_minors(3, 2, Rat(1, 4), random_alpha(rng, 3, 2));
  InclusionPoint zero = inclusion_point(e, RatMatrix::zero(3, 2));
  CHECK(zero.Y.is_zero());
  CHECK(zero.Z == -zero.c * RatMatrix::identity(2));
  for (int trial = 0; trial < 50; ++trial) {
    InclusionPoint q = inclusion_point(e, rng.matrix(3, 2));
    CHECK(q.Z + q.c * RatMatrix::identity(2) == q.X.transpose() * q.Y);
    CHECK(trace(q.Z) == dot(q.X, q.Y) - 2 * q.c);
  }
}

TEST_CASE("strict gap") {
  auto quad = PolyconvexEnergy::quadratic(4, 2);
  auto z = oracle::t5_points();
  CHECK(strict_gap(quad, z[0], z[1]) == frobenius_sq(z[1] - z[0]) / 2);
  CHECK(strict_gap(quad, z[0], z[1]) > 0);
  CHECK_THROWS_AS(strict_gap(quad, z[0], z[0]), std::invalid_argument);

  auto linear = PolyconvexEnergy::custom(2, 2, std::make_shared<LinearMinorsG>());
  Rng rng(45);
  CHECK(strict_gap(linear, rng.matrix(2, 2), rng.matrix(2, 2) + RatMatrix::identity(2)) == 0);
}

TEST_CASE("pairwise inequality residual") {
  auto quad = PolyconvexEnergy::quadratic(4, 2);
  TNPointSet pts{oracle::t5_points()};
  CHECK(finalemdim_residual(quad, pts, 0, 1) == -frobenius_sq(pts.X[1] - pts.X[0]) / 2);
  CHECK_THROWS_AS(finalemdim_residual(quad, pts, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(finalemdim_residual(quad, pts, 0, 7), std::out_of_range);
}

TEST_CASE("property: pairwise residual matches a term-by-term 2x2 assembly") {
  Rng rng(46);
  for (int trial = 0; trial < 200; ++trial) {
    Rat eps = rng.rational_in(0, 2), a = rng.rational_in(0, 3);
    auto e = PolyconvexEnergy::quad_minors(2, 2, eps, {{MultiIndex{{0, 1}, {0, 1}}, a}});
    TNPointSet pts{{rng.matrix(2, 2), rng.matrix(2, 2)}};
    if (pts.X[0] == pts.X[1]) continue;
    const RatMatrix& xi = pts.X[0];
    const RatMatrix& xj = pts.X[1];
    auto f = [&](const RatMatrix& x) -> Rat { return eps * frobenius_sq(x) + a * det(x) * det(x); };
    RatMatrix yi = Rat(2) * eps * xi + Rat(2) * a * det(xi) * cof_t_2x2(xi);
    Rat d = 2 * a * det(xi);
    Rat expected = f(xi) - f(xj) + dot(yi, xj - xi) - d * (dot(cof_t_2x2(xi), xj - xi) - det(xj) + det(xi));
    Rat got = finalemdim_residual(e, pts, 0, 1);
    CHECK(got == expected);
    CHECK(got == -strict_gap(e, xi, xj));
    CHECK(got < 0);
  }
}

TEST_CASE("fzero identity") {
  auto cfg = oracle::t5_config();
  for (const auto& z : multi_indices(4, 2, 2)) CHECK(is_zero(fzero_identity(cfg, z)));

  RatMatrix p{{1, 2}, {3, 5}, {7, 11}};
  TNConfig flat{p, {RatMatrix::zero(3, 2), RatMatrix::zero(3, 2), RatMatrix::zero(3, 2)},
                {Rat(2), Rat(3), Rat(5, 2)}};
  for (const auto& z : all_minor_indices(3, 2)) CHECK(is_zero(fzero_identity(flat, z)));

  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    TNConfig c = random_tn_config(rng, 3, 3, static_cast<std::size_t>(rng.integer(3, 6)));
    for (const auto& z : all_minor_indices(3, 3)) CHECK(is_zero(fzero_identity(c, z)));
  }
}

TEST_CASE("nu on the five-point configuration") {
  auto quad = PolyconvexEnergy::quadratic(4, 2);
  auto cfg = oracle::t5_config();
  auto pts = oracle::t5_points();
  RatVector c;
  for (const auto& x : pts) c.push_back(frobenius_sq(x) / 2);
  CHECK(c == RatVector{Rat(604), Rat(125), Rat(1131), Rat(5422), Rat(1115)});
  CHECK(dot(pts[0], cfg.C[0]) == 604);

  // i = 1: t^1 = λ, so ν_1 = Σλ_j c_j − c_1 + 2⟨Y_1, C_1⟩
  Rat expected = dot(oracle::t5_lambda(), c) - c[0] + 2 * dot(pts[0], cfg.C[0]);
  CHECK(expected == Rat(85318, 31));

  RatVector nu = nu_vector(quad, cfg);
  CHECK(nu[0] == Rat(85318, 31));
  for (const auto& v : nu) CHECK(v > 0);
}

TEST_CASE("nu scales quadratically") {
  auto quad = PolyconvexEnergy::quadratic(4, 2);
  auto cfg = oracle::t5_config();
  Rat s(3, 5);
  TNConfig scaled = cfg;
  scaled.P = s * cfg.P;
  for (auto& c : scaled.C) c = s * c;
  RatVector a = nu_vector(quad, cfg), b = nu_vector(quad, scaled);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == s * s * a[i]);
}

TEST_CASE("property: nu positive and equal to the weighted pairwise residuals") {
  Rng rng(48);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.integer(2, 3)), m = static_cast<std::size_t>(rng.integer(2, 3));
    TNConfig cfg = random_tn_config(rng, n, m, static_cast<std::size_t>(rng.integer(2, 5)));
    auto pts = points_from_config(cfg);
    auto tv = t_vectors(defining_vector_from_ks(cfg.k));
    for (const auto& e : {PolyconvexEnergy::quadratic(n, m),
                          PolyconvexEnergy::quad_minors(n, m, rng.rational_in(0, 1), random_alpha(rng, n, m))}) {
      RatVector nu = nu_vector(e, cfg);
      for (std::size_t i = 0; i < cfg.N(); ++i) {
        CHECK(nu[i] > 0);
        Rat weighted = 0;
        for (std::size_t j = 0; j < cfg.N(); ++j) {
          if (j == i) continue;
          Rat r = finalemdim_residual(e, pts, i, j);
          CHECK(r < 0);
          weighted += tv.t[i][j] * r;
        }
        CHECK(weighted == -nu[i]);
      }
    }
  }
}

TEST_CASE("sampled convexity") {
  Rng rng(49);
  auto quad = PolyconvexEnergy::quadratic(2, 2);
  ConvexitySample s = sample_strict_convexity(quad.g(), phi_size(2, 2), rng, 2000);
  CHECK(s.passed());
  CHECK(s.samples == 2000);
  CHECK(s.min_gap > 0);

  auto linear = std::make_shared<LinearMinorsG>();
  CHECK_FALSE(sample_strict_convexity(*linear, 5, rng, 100).passed());
  ConvexitySample report;
  CHECK_THROWS_AS(checked_custom(2, 2, linear, rng, &report), std::invalid_argument);
  CHECK(report.failures > 0);
  CHECK(std::abs(report.min_gap) < 1e-12);

  auto convex = std::make_shared<CustomMinorFunction>(
      [](const RealVector& p) {
        double s = 0;
        for (double x : p) s += x * x + std::exp(x);
        return s;
      },
      [](const RealVector& p) {
        RealVector g(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) g[i] = 2 * p[i] + std::exp(p[i]);
        return g;
      });
  auto e = checked_custom(2, 2, convex, rng, &report);
  CHECK(report.passed());
  CHECK_FALSE(e.exact());
  CHECK(e.family() == EnergyFamily::custom);
  Eigen::MatrixXd x = random_real(rng, 2, 2, 2.0);
  CHECK(oracle::rel_err(e.gradient(x), oracle::fd_gradient([&](const Eigen::MatrixXd& y) { return e.value(y); }, x)) <
        1e-7);
}
