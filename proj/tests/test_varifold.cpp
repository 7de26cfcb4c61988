#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tnconf/varifold.hpp"

using namespace tnconf;

namespace {

Mat random_matrix(Rng& rng, Eigen::Index n, Eigen::Index m, double norm) {
  Mat g(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = rng.normal();
  return (norm / g.norm()) * g;
}

Mat block_diag_id(Eigen::Index m, Eigen::Index n) {
  Mat p = Mat::Zero(m + n, m + n);
  p.topLeftCorner(m, m).setIdentity();
  return p;
}

std::vector<PolyconvexEnergy> float_families(Rng& rng, std::size_t n, std::size_t m) {
  std::map<MultiIndex, Rat> alpha;
  for (const auto& z : all_minor_indices(n, m)) alpha[z] = rng.rational_in(0, 2);
  return {PolyconvexEnergy::area(n, m), PolyconvexEnergy::quadratic(n, m),
          PolyconvexEnergy::quad_minors(n, m, Rat(1, 5), alpha)};
}

const std::pair<std::size_t, std::size_t> kShapes[] = {{1, 1}, {2, 2}, {3, 2}, {2, 3}, {4, 2}};

}  // namespace

TEST_CASE("chart h") {
  GrassmannPoint p0 = chart_h(Mat::Zero(3, 2));
  CHECK((p0.matrix() - block_diag_id(2, 3)).norm() < 1e-15);
  GrassmannPoint p1 = chart_h(Mat::Constant(1, 1, 1.0));
  CHECK((p1.matrix() - Mat::Constant(2, 2, 0.5)).norm() < 1e-15);

  Rng rng(61);
  for (auto [n, m] : kShapes) {
    for (int trial = 0; trial < 200; ++trial) {
      Mat x = random_matrix(rng, n, m, std::exp(rng.uniform(-3, std::log(1e3))));
      const Mat p = chart_h(x).matrix();
      CHECK((p * p - p).norm() < 1e-10);
      CHECK((p - p.transpose()).norm() < 1e-10);
      CHECK(std::abs(p.trace() - static_cast<double>(m)) < 1e-10);
      Mat s = chart_S(x);
      Mat mx = graph_basis(x);
      CHECK((mx * s * mx.transpose() - p).norm() < 1e-10);
    }
  }
}

TEST_CASE("Grassmann points are validated") {
  CHECK_THROWS_AS(GrassmannPoint(Mat::Identity(3, 3), 2), std::invalid_argument);
  Mat not_symmetric = block_diag_id(1, 1);
  not_symmetric(0, 1) = 1;
  CHECK_THROWS_AS(GrassmannPoint(not_symmetric, 1), std::invalid_argument);
  CHECK_THROWS_AS(GrassmannPoint(2 * block_diag_id(1, 1), 1), std::invalid_argument);
  CHECK_NOTHROW(GrassmannPoint(block_diag_id(2, 2), 2));

  Mat basis(3, 1);
  basis << 1, 2, 2;
  GrassmannPoint p = GrassmannPoint::from_basis(basis);
  CHECK((p.matrix() - basis * basis.transpose() / 9.0).norm() < 1e-14);
}

TEST_CASE("chart inverse") {
  CHECK(chart_h_inverse(GrassmannPoint(block_diag_id(2, 3), 2)).norm() == 0);

  Rng rng(62);
  for (auto [n, m] : kShapes) {
    for (int trial = 0; trial < 200; ++trial) {
      Mat x = random_matrix(rng, n, m, rng.uniform(0, 3));
      CHECK((chart_h_inverse(chart_h(x)) - x).norm() < 1e-10);
    }
  }

  Mat vertical = Mat::Zero(2, 2);
  vertical(1, 1) = 1;
  GrassmannPoint v(vertical, 1);
  CHECK_FALSE(v.in_chart());
  CHECK_THROWS_AS(chart_h_inverse(v), OutOfChartError);
  CHECK_THROWS_AS(d_h_inverse(v, Mat::Zero(2, 2)), OutOfChartError);
}

TEST_CASE("differential of the chart inverse") {
  Rng rng(63);
  for (auto [n, m] : kShapes) {
    const auto k = static_cast<Eigen::Index>(n + m);
    for (int trial = 0; trial < 30; ++trial) {
      Mat x = random_matrix(rng, n, m, rng.uniform(0.1, 2));
      GrassmannPoint p = chart_h(x);
      CHECK(d_h_inverse(p, Mat::Zero(k, k)).norm() == 0);
      Mat l = random_matrix(rng, k, k, 1.0);
      Mat h = tangent_from(p, l);
      Mat analytic = d_h_inverse(p, h);
      CHECK(oracle::rel_err(analytic, d_h_inverse_fd(p, l)) < 1e-6);
      const Mat& pm = p.matrix();
      CHECK(d_h_inverse_linear(p, pm * l * pm).norm() < 1e-9);
      CHECK(d_h_inverse_linear(p, pm * l.transpose() * pm).norm() < 1e-9);
      CHECK_THROWS_AS(d_h_inverse(p, l + l.transpose()), std::invalid_argument);
    }
  }
}

TEST_CASE("tangent curves start at P with velocity P⊥LP + (P⊥LP)ᵀ") {
  Rng rng(64);
  Mat x = random_matrix(rng, 2, 2, 1.0);
  GrassmannPoint p = chart_h(x);
  Mat l = random_matrix(rng, 4, 4, 1.0);
  CHECK((tangent_curve(p, l, 0).matrix() - p.matrix()).norm() < 1e-12);
  const double t = 1e-5;
  Mat velocity = (tangent_curve(p, l, t).matrix() - tangent_curve(p, l, -t).matrix()) / (2 * t);
  CHECK(oracle::rel_err(velocity, tangent_from(p, l)) < 1e-8);
}

TEST_CASE("area element by two formulas") {
  CHECK(area_cb(Mat::Zero(3, 2)) == 1.0);
  CHECK(area_cb(Mat::Identity(2, 2)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(area_det(Mat::Identity(2, 2)) == doctest::Approx(2.0).epsilon(1e-15));

  Rng rng(65);
  for (int trial = 0; trial < 200; ++trial) {
    RatMatrix xr = rng.matrix(4, 2);
    double exact = std::sqrt(oracle::cauchy_binet_sum(xr).get_d());
    Mat x = to_real(xr);
    CHECK(std::abs(area_cb(x) - exact) / exact < 1e-13);
    CHECK(std::abs(area_det(x) - exact) / exact < 1e-13);
  }
  for (auto [n, m] : kShapes) {
    for (int trial = 0; trial < 500; ++trial) {
      Mat x = random_matrix(rng, n, m, rng.uniform(0, 1e3));
      CHECK(std::abs(area_cb(x) - area_det(x)) / area_det(x) < 1e-12);
    }
  }
}

TEST_CASE("area gradient") {
  Rng rng(66);
  for (auto [n, m] : kShapes) {
    for (int trial = 0; trial < 50; ++trial) {
      Mat x = random_matrix(rng, n, m, rng.uniform(0.1, 2));
      Mat fd = oracle::fd_gradient([](const Mat& y) { return area_cb(y); }, x);
      CHECK(oracle::rel_err(d_area(x), fd) < 1e-7);
    }
  }
}

TEST_CASE("fields A and B") {
  auto area = PolyconvexEnergy::area(3, 2);
  FieldsAB z = fields_AB(area, Mat::Zero(3, 2));
  CHECK(z.A.norm() == 0);
  CHECK((z.B - Mat::Identity(2, 2)).norm() < 1e-15);
  CHECK((v_field(area, Mat::Zero(3, 2)) - block_diag_id(2, 3)).norm() < 1e-15);

  Rng rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    Mat x = random_matrix(rng, 3, 2, rng.uniform(0.1, 2));
    FieldsAB ab = fields_AB(area, x);
    CHECK(oracle::rel_err(ab.A, d_area(x)) < 1e-12);
    CHECK(oracle::rel_err(ab.A, oracle::fd_gradient([&](const Mat& y) { return area.value(y); }, x)) < 1e-7);
    CHECK(oracle::rel_err(ab.B, area.value(x) * Mat::Identity(2, 2) - x.transpose() * ab.A) < 1e-14);

    Mat v = area_cb(x) * v_field(area, x);
    CHECK(oracle::rel_err(v.topLeftCorner(2, 2), ab.B) < 1e-13);
    CHECK(oracle::rel_err(v.topRightCorner(2, 3), ab.B * x.transpose()) < 1e-13);
    CHECK(oracle::rel_err(v.bottomLeftCorner(3, 2), ab.A) < 1e-13);
    CHECK(oracle::rel_err(v.bottomRightCorner(3, 3), ab.A * x.transpose()) < 1e-13);
  }
}

TEST_CASE("integrand pair") {
  Rng rng(68);
  for (const auto& e : float_families(rng, 2, 3)) {
    IntegrandPair pair(e);
    for (int trial = 0; trial < 50; ++trial) {
      Mat x = random_matrix(rng, 2, 3, rng.uniform(0, 2));
      CHECK(std::abs(pair.psi(chart_h(x)) * area_cb(x) - e.value(x)) <= 1e-12 * (1 + std::abs(e.value(x))));
    }
  }
  IntegrandPair area(PolyconvexEnergy::area(2, 2));
  GrassmannPoint p = chart_h(random_matrix(rng, 2, 2, 1.5));
  CHECK(std::abs(area.psi(p) - 1) < 1e-14);
  CHECK((b_psi(area, p) - p.matrix()).norm() < 1e-12);
}

TEST_CASE("B_Psi reproduces its pairing") {
  Rng rng(69);
  IntegrandPair pair(float_families(rng, 3, 2)[2]);
  GrassmannPoint p = chart_h(random_matrix(rng, 3, 2, 1.2));
  Mat b = b_psi(pair, p);
  for (int trial = 0; trial < 50; ++trial) {
    Mat l = random_matrix(rng, 5, 5, 1.0);
    double direct = b_psi_pairing(pair, p, l);
    CHECK(std::abs((b.array() * l.array()).sum() - direct) <= 1e-12 * (1 + std::abs(direct)));
  }
}

TEST_CASE("property: B_Psi(h(X)) equals V_f(X)") {
  Rng rng(70);
  for (auto [n, m] : kShapes) {
    for (const auto& e : float_families(rng, n, m)) {
      IntegrandPair pair(e);
      for (int trial = 0; trial < 60; ++trial) {
        Mat x = random_matrix(rng, n, m, rng.uniform(0, 2));
        Mat v = v_field(e, x);
        CHECK((b_psi(pair, chart_h(x)) - v).norm() / (1 + v.norm()) < 1e-8);
      }
      for (int trial = 0; trial < 5; ++trial) {
        const auto k = static_cast<Eigen::Index>(n + m);
        GrassmannPoint p = chart_h(random_matrix(rng, n, m, rng.uniform(0.1, 2)));
        Mat l = random_matrix(rng, k, k, 1.0);
        double a = pair.d_psi(p, tangent_from(p, l));
        CHECK(std::abs(a - pair.d_psi_fd(p, l)) / (1 + std::abs(a)) < 1e-6);
      }
    }
  }
}

TEST_CASE("growth exponents") {
  Rng rng(71);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 3}, {3, 2}}) {
    GrowthFit fit = growth_probe(PolyconvexEnergy::area(n, m), rng);
    CHECK(fit.bound_A == static_cast<double>(std::min(n, m) - 1));
    CHECK(fit.bound_B == static_cast<double>(std::min(n, m - 1)));
    CHECK(fit.passed());
  }
  // ½|X|² is not of the form Ψ·𝒜 with bounded Ψ; its B field grows like |X|².
  GrowthFit quad = growth_probe(PolyconvexEnergy::quadratic(2, 2), rng);
  CHECK(quad.exponent_B == doctest::Approx(2.0).epsilon(0.05));
  CHECK_FALSE(quad.passed());
  CHECK_THROWS_AS(growth_probe(PolyconvexEnergy::area(2, 2), rng, 1), std::invalid_argument);
}

TEST_CASE("graph maps carry analytic derivatives") {
  Rng rng(72);
  for (auto fam : {UFamily::affine, UFamily::polynomial, UFamily::trigonometric}) {
    CHECK(parse_u_family(family_name(fam)) == fam);
    GraphMap u = GraphMap::random(fam, 2, 2, rng);
    Vec x(2);
    x << rng.uniform(0, 1), rng.uniform(0, 1);
    const double h = 1e-5;
    Mat fd(2, 2);
    Vec lap = Vec::Zero(2);
    for (Eigen::Index j = 0; j < 2; ++j) {
      Vec a = x, b = x;
      a(j) += h;
      b(j) -= h;
      fd.col(j) = (u.value(a) - u.value(b)) / (2 * h);
      const double h2 = 1e-4;
      Vec a2 = x, b2 = x;
      a2(j) += h2;
      b2(j) -= h2;
      lap += (u.value(a2) - 2 * u.value(x) + u.value(b2)) / (h2 * h2);
    }
    CHECK(oracle::rel_err(u.jacobian(x), fd) < 1e-8);
    CHECK((u.laplacian(x) - lap).norm() < 1e-4 * (1 + lap.norm()));
  }
  CHECK_THROWS_AS(parse_u_family("cubic"), std::invalid_argument);
}

TEST_CASE("bump fields") {
  CHECK_THROWS_AS(BumpField(2, Vec::Zero(2), Mat::Zero(2, 2), 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(BumpField(2, Vec::Zero(2), Mat::Zero(2, 2), 0.6, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(BumpField(2, Vec::Zero(2), Mat::Zero(2, 2), 0.25, 0.75, 1), std::invalid_argument);
  CHECK_THROWS_AS(BumpField(2, Vec::Zero(3), Mat::Zero(2, 2)), ShapeError);

  Rng rng(73);
  BumpField g = BumpField::random(2, 4, 4, rng);
  Vec mid = Vec::Constant(2, 0.5);
  CHECK(g.bump(mid) == doctest::Approx(1.0));
  Vec outside(2);
  outside << 0.1, 0.5;
  CHECK(g.bump(outside) == 0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec z(4);
    for (Eigen::Index i = 0; i < 4; ++i) z(i) = rng.uniform(0.2, 0.8);
    Mat fd(4, 4);
    for (Eigen::Index j = 0; j < 4; ++j) {
      Vec a = z, b = z;
      a(j) += 1e-6;
      b(j) -= 1e-6;
      fd.col(j) = (g.value(a) - g.value(b)) / 2e-6;
    }
    CHECK(oracle::rel_err(g.jacobian(z), fd) < 1e-7);
  }
  BumpField h = BumpField::random(2, 4, 4, rng);
  Vec z = Vec::Constant(4, 0.4);
  CHECK(((g + h).value(z) - g.value(z) - h.value(z)).norm() < 1e-14);
  BumpField other = BumpField::random(2, 4, 4, rng, false, 4);
  CHECK_THROWS_AS(g + other, std::invalid_argument);
}

TEST_CASE("graph samples") {
  Rng rng(74);
  GraphMap u = GraphMap::random(UFamily::polynomial, 2, 2, rng);
  GraphSample s = sample_graph(u, 8);
  CHECK(s.nodes() == 64);
  CHECK(s.weight() == doctest::Approx(1.0 / 64));
  CHECK(s.x.front()(0) == doctest::Approx(1.0 / 16));
  CHECK((s.du[5] - u.jacobian(s.x[5])).norm() == 0);
  CHECK_THROWS_AS(sample_graph(u, 0), std::invalid_argument);
}

TEST_CASE("affine graphs are stationary") {
  Rng rng(75);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {1, 2}}) {
    for (const auto& e : float_families(rng, n, m)) {
      GraphMap u = GraphMap::random(UFamily::affine, n, m, rng);
      GraphSample s = sample_graph(u, 64);
      BumpField g = BumpField::random(m, m + n, m + n, rng, false, 8);
      FirstVariation fv = first_variation_quadrature(IntegrandPair(e), s, g);
      CHECK(std::abs(fv.graph_side) <= 1e-8);
      CHECK(std::abs(fv.varifold_side) <= 1e-8);
      CHECK(fv.residual <= 1e-8);
      Stationarity st = stationarity_residuals(e, s, BumpField::random(m, m, n, rng, false, 8),
                                               BumpField::random(m, m, m, rng, false, 8));
      CHECK(std::abs(st.outer) <= 1e-8);
      CHECK(std::abs(st.inner) <= 1e-8);
    }
  }
}

TEST_CASE("graph and varifold first variations agree pointwise") {
  Rng rng(76);
  for (auto fam : {UFamily::polynomial, UFamily::trigonometric}) {
    for (const auto& e : float_families(rng, 2, 2)) {
      GraphMap u = GraphMap::random(fam, 2, 2, rng);
      GraphSample s = sample_graph(u, 32);
      BumpField g = BumpField::random(2, 4, 4, rng);
      FirstVariation fv = first_variation_quadrature(IntegrandPair(e), s, g);
      CHECK(fv.max_pointwise <= 1e-8);
      CHECK(fv.residual <= 1e-8 * (1 + std::abs(fv.graph_side)));
      CHECK(std::abs(first_variation_graph_side(e, s, g) - fv.graph_side) <= 1e-12 * (1 + std::abs(fv.graph_side)));
    }
  }
  GraphSample s = sample_graph(GraphMap::random(UFamily::affine, 2, 2, rng), 8);
  CHECK_THROWS_AS(first_variation_quadrature(IntegrandPair(PolyconvexEnergy::area(2, 2)), s,
                                             BumpField::random(2, 2, 2, rng)),
                  ShapeError);
}

TEST_CASE("outer variation of the Dirichlet energy integrates by parts") {
  Rng rng(77);
  auto e = PolyconvexEnergy::quadratic(2, 2);
  GraphMap u = GraphMap::random(UFamily::trigonometric, 2, 2, rng, 0.05);
  BumpField v = BumpField::random(2, 2, 2, rng);
  BumpField phi = BumpField::random(2, 2, 2, rng);
  double prev = 0, scale = 0;
  for (std::size_t r : {32, 64, 128}) {
    GraphSample s = sample_graph(u, r);
    double lap = laplacian_pairing(u, s, v);
    double gap = std::abs(stationarity_residuals(e, s, v, phi).outer - lap);
    if (r > 32) CHECK(gap < prev / 3);
    prev = gap;
    scale = std::abs(lap);
  }
  CHECK(prev < 1e-3 * scale);
}

TEST_CASE("stationarity residuals are linear in the test fields") {
  Rng rng(78);
  auto e = PolyconvexEnergy::area(2, 2);
  GraphSample s = sample_graph(GraphMap::random(UFamily::polynomial, 2, 2, rng), 32);
  BumpField v1 = BumpField::random(2, 2, 2, rng), v2 = BumpField::random(2, 2, 2, rng);
  BumpField p1 = BumpField::random(2, 2, 2, rng), p2 = BumpField::random(2, 2, 2, rng);
  Stationarity a = stationarity_residuals(e, s, v1, p1);
  Stationarity b = stationarity_residuals(e, s, v2, p2);
  Stationarity sum = stationarity_residuals(e, s, v1 + v2, p1 + p2);
  CHECK(std::abs(sum.outer - a.outer - b.outer) < 1e-12);
  CHECK(std::abs(sum.inner - a.inner - b.inner) < 1e-12);
}

TEST_CASE("order-two convergence of the first variation quadrature") {
  Rng rng(79);
  auto e = PolyconvexEnergy::area(2, 2);
  GraphMap u = GraphMap::random(UFamily::polynomial, 2, 2, rng);
  BumpField g = BumpField::random(2, 4, 4, rng);
  Convergence c = richardson_study(e, u, g, 64, 256);
  CHECK(c.resolutions == std::vector<std::size_t>{64, 128, 256, 512});
  CHECK(c.ratio >= 3.5);
  CHECK(c.ratio <= 4.5);
  CHECK_THROWS_AS(richardson_study(e, u, g, 64, 128), std::invalid_argument);
}
