#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tnconf/obstruction.hpp"
#include "tnconf/polyconvex.hpp"

using namespace tnconf;

namespace {

GaugeParams random_gauge(Rng& rng, const TNPrimeConfig& cfg) {
  return {rng.matrix(cfg.n(), cfg.m()), rng.matrix(cfg.n(), cfg.m()), rng.rational()};
}

std::vector<WaveConeWitness> witnesses_of(const TNConfig& x) {
  std::vector<WaveConeWitness> w;
  for (const auto& c : x.C) {
    auto f = rank_one_decompose(c);
    w.push_back({f->v, f->u});
  }
  return w;
}

TNConfig zero_base_config(Rng& rng, std::size_t n, std::size_t m, std::size_t N) {
  TNConfig x = random_tn_config(rng, n, m, N);
  x.P = RatMatrix::zero(n, m);
  return x;
}

// ν_i = Σ_j t^i_j c_j − c_i + k_i⟨Y_i, C_i⟩ with Y_i = D_1 + … + k_i D_i.
RatVector nu_oracle(const TNConfig& x, const std::vector<RatMatrix>& d, const RatVector& c) {
  auto tv = t_vectors(defining_vector_from_ks(x.k));
  RatVector nu;
  RatMatrix prefix = RatMatrix::zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.N(); ++i) {
    RatMatrix y = prefix + x.k[i] * d[i];
    nu.push_back(dot(tv.t[i], c) - c[i] + x.k[i] * dot(y, x.C[i]));
    prefix += d[i];
  }
  return nu;
}

Rat min_of(const RatVector& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("identity gauge leaves everything unchanged") {
  Rng rng(51);
  TNPrimeConfig cfg = random_tnprime(rng, 2, 3, 4);
  RatVector c = rng.vector(4);
  GaugeResult g = gauge_normalize(cfg, c, {cfg.base.X, cfg.base.Y, 0});
  CHECK(g.cfg.base == cfg.base);
  CHECK(g.cfg.arms == cfg.arms);
  CHECK(g.c == c);
}

TEST_CASE("property: gauge output satisfies the three identities") {
  Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.integer(2, 3)), m = static_cast<std::size_t>(rng.integer(2, 3));
    TNPrimeConfig cfg = random_tnprime(rng, n, m, static_cast<std::size_t>(rng.integer(2, 5)));
    RatVector c = rng.vector(cfg.N());
    CHECK(gauge_identities(cfg).all_zero());
    GaugeParams gp = random_gauge(rng, cfg);
    GaugeResult g = gauge_normalize(cfg, c, gp);
    CHECK(gauge_identities(g.cfg).all_zero());
    CHECK(g.cfg.base.X == gp.S);
    CHECK(g.cfg.base.Y == gp.T);
    auto before = stacked_points(cfg), after = stacked_points(g.cfg);
    RatMatrix V = cfg.base.Y - gp.T;
    for (std::size_t i = 0; i < cfg.N(); ++i) {
      CHECK(g.cfg.arms[i].X == cfg.arms[i].X);
      CHECK(g.cfg.arms[i].Y == cfg.arms[i].Y);
      CHECK(after[i].X - before[i].X == gp.S - cfg.base.X);
      CHECK(after[i].Y - before[i].Y == gp.T - cfg.base.Y);
      CHECK(g.c[i] == c[i] - dot(before[i].X, V) - gp.a);
    }
    CHECK(verify_tnprime(after, g.cfg).passed() == verify_tnprime(before, cfg).passed());

    GaugeResult norm = gauge_normalize(cfg, c, normalizing_gauge(cfg));
    CHECK(is_normalized(norm.cfg));
    CHECK(norm.cfg.base.X.is_zero());
    CHECK(norm.cfg.base.Y.is_zero());
    CHECK(trace(norm.cfg.base.Z) == 0);
  }
}

TEST_CASE("property: gauges map consistent instances to consistent instances") {
  Rng rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    ConsistentInstance inst = random_consistent_tnprime(rng, 2, 2, static_cast<std::size_t>(rng.integer(2, 4)));
    GaugeResult g = gauge_normalize(inst.cfg, inst.c, random_gauge(rng, inst.cfg));
    CostDerivation d = derive_costs(g.cfg);
    CHECK_FALSE(d.offending);
    CHECK(d.c == g.c);
    Certificate before = certify(inst.cfg, inst.c);
    Certificate after = certify(g.cfg, g.c);
    CHECK(before.ok());
    CHECK(after.ok());
    CHECK_FALSE(after.normalized_input);
    CHECK(after.nu == before.nu);
  }
}

TEST_CASE("r identity") {
  TNPrimeConfig lift = lift_tn(oracle::t5_config());
  RIdentity r = r_identity(lift);
  CHECK(r.all_zero());

  Rng rng(54);
  TNPrimeConfig shifted = random_tnprime(rng, 2, 2, 3);
  CHECK_THROWS_AS(r_identity(shifted), std::invalid_argument);

  for (int trial = 0; trial < 50; ++trial) {
    ConsistentInstance inst = random_consistent_tnprime(rng, 2, 3, static_cast<std::size_t>(rng.integer(2, 5)));
    CHECK(r_identity(inst.cfg).all_zero());
  }
}

TEST_CASE("r identity for two arms by hand") {
  // N = 2 forces D_2 = −D_1, C_2 = −C_1, so Σ_j λ_j X_jᵀY_j = k_1(k_1−1)λ_1 C_1ᵀD_1 + k_2(k_2−1)λ_2 C_1ᵀD_1.
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    ConsistentInstance inst = random_consistent_tnprime(rng, 2, 2, 2);
    const auto& cfg = inst.cfg;
    auto dv = defining_vector_from_ks(cfg.k);
    RatMatrix cd = cfg.arms[0].X.transpose() * cfg.arms[0].Y;
    RatMatrix x1 = cfg.k[0] * cfg.arms[0].X, y1 = cfg.k[0] * cfg.arms[0].Y;
    RatMatrix x2 = cfg.arms[0].X - cfg.k[1] * cfg.arms[0].X, y2 = cfg.arms[0].Y - cfg.k[1] * cfg.arms[0].Y;
    RatMatrix lhs = dv.lambda[0] * (x1.transpose() * y1) + dv.lambda[1] * (x2.transpose() * y2);
    RatMatrix rhs = (cfg.k[0] * (cfg.k[0] - 1) * dv.lambda[0] + cfg.k[1] * (cfg.k[1] - 1) * dv.lambda[1]) * cd;
    CHECK(lhs == rhs);
    CHECK(r_identity(cfg).all_zero());
  }
}

TEST_CASE("consistency of the five-point inclusion points") {
  // Y_i = X_i and Z_i = X_iᵀX_i − c_i id for f = ½|X|²; the arms leave the wave cone.
  TNConfig x = oracle::t5_config();
  RatVector c;
  for (const auto& p : oracle::t5_points()) c.push_back(frobenius_sq(p) / 2);
  TNPrimeConfig cfg = tnprime_from_costs(x, x.C, c, witnesses_of(x));
  ConsistencyReport rep = consistency_and_nu(cfg, c);
  REQUIRE(rep.consistent);
  CHECK(rep.c == c);
  CHECK(rep.nu == nu_vector(PolyconvexEnergy::quadratic(4, 2), x));
  CHECK(rep.nu[0] == Rat(85318, 31));
  CHECK(rep.lambda_c == dot(oracle::t5_lambda(), c));
  CHECK(rep.lambda_c != 0);
  // tr Z_j = |X_j|² − 2c_j vanishes for m = 2
  CHECK(rep.trace_r == 0);
  CHECK(rep.r_residual == -rep.lambda_c * RatMatrix::identity(2));
  CHECK_FALSE(verify_tnprime(stacked_points(cfg), cfg).cone_ok());
  Certificate cert = certify(cfg, c);
  CHECK_FALSE(cert.ok());
}

TEST_CASE("consistency reports offending blocks and costs") {
  TNPrimeConfig lift = lift_tn(oracle::t5_config());
  ConsistencyReport rep = consistency_and_nu(lift);
  REQUIRE(rep.consistent);
  for (const auto& v : rep.nu) CHECK(v == 0);
  for (const auto& v : rep.c) CHECK(v == 0);

  ConsistencyReport wrong_c = consistency_and_nu(lift, RatVector{0, 0, 1, 0, 0});
  CHECK_FALSE(wrong_c.consistent);
  CHECK(wrong_c.offending == std::optional<std::size_t>(2));

  TNPrimeConfig bent = lift;
  bent.arms[0].Z(0, 1) += 1;
  bent.arms[1].Z(0, 1) -= 1;
  ConsistencyReport off = consistency_and_nu(bent);
  CHECK_FALSE(off.consistent);
  CHECK(off.offending == std::optional<std::size_t>(0));
  CHECK(off.detail.find("Z_1") != std::string::npos);
}

TEST_CASE("witness evaluation identity") {
  TNPrimeConfig lift = lift_tn(oracle::t5_config());
  for (const auto& r : finaleq_check(lift, RatVector(5, Rat(0)))) CHECK(is_zero(r));

  Rng rng(56);
  for (int trial = 0; trial < 50; ++trial) {
    ConsistentInstance inst = random_consistent_tnprime(rng, 3, 3, static_cast<std::size_t>(rng.integer(2, 5)));
    for (const auto& r : finaleq_check(inst.cfg, inst.c)) CHECK(is_zero(r));
  }

  // D_1 with D_1 n_1 != 0, rebalanced on D_2
  ConsistentInstance inst = random_consistent_tnprime(rng, 2, 2, 3);
  TNConfig x = inst.cfg.x_config();
  std::vector<RatMatrix> d;
  for (const auto& a : inst.cfg.arms) d.push_back(a.Y);
  RatMatrix bump = RatMatrix::outer({Rat(1), Rat(2)}, inst.cfg.witnesses[0].xi);
  d[0] += bump;
  d[1] -= bump;
  TNPrimeConfig broken = tnprime_from_costs(x, d, inst.c, inst.cfg.witnesses);
  auto fe = finaleq_check(broken, inst.c);
  CHECK_FALSE(is_zero(fe[0]));
  Certificate cert = certify(broken, inst.c);
  CHECK_FALSE(cert.ok());
  CHECK(cert.detail.find("arm 1") != std::string::npos);
}

TEST_CASE("independent set") {
  std::vector<RatVector> same(4, RatVector{Rat(1), Rat(0), Rat(0)});
  CHECK(independent_set(same) == std::vector<std::size_t>{0});
  std::vector<RatVector> basis{{Rat(1), Rat(2), Rat(0)}, {Rat(0), Rat(1), Rat(1)}, {Rat(1), Rat(0), Rat(5)}};
  CHECK(independent_set(basis) == std::vector<std::size_t>{0, 1, 2});
  std::vector<RatVector> planted{{Rat(1), Rat(1)}, {Rat(2), Rat(2)}, {Rat(0), Rat(3)}, {Rat(1), Rat(0)}};
  CHECK(independent_set(planted) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("property: independent set matches the exhaustive first basis") {
  Rng rng(57);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t N = static_cast<std::size_t>(rng.integer(1, 6)), m = static_cast<std::size_t>(rng.integer(2, 4));
    std::vector<RatVector> dirs;
    for (std::size_t i = 0; i < N; ++i) {
      if (i > 0 && rng.integer(0, 2) == 0) {
        // planted dependency on earlier directions
        RatVector v(m, Rat(0));
        for (std::size_t j = 0; j < i; ++j) v = v + rng.rational() * dirs[j];
        if (is_zero(v)) v = dirs[0];
        dirs.push_back(v);
      } else {
        dirs.push_back(rng.nonzero_vector(m, 2, 1));
      }
    }
    auto A = independent_set(dirs);
    CHECK(A == oracle::first_basis(dirs));
    CHECK(A.front() == 0);
    std::vector<RatVector> picked;
    for (auto i : A) picked.push_back(dirs[i]);
    CHECK(oracle::minor_rank(oracle::columns(picked)) == A.size());
    CHECK(oracle::minor_rank(oracle::columns(dirs)) == A.size());
  }
}

TEST_CASE("certificate on the zero lift") {
  TNPrimeConfig lift = lift_tn(oracle::t5_config());
  Certificate cert = certify(lift, RatVector(5, Rat(0)));
  CHECK(cert.ok());
  CHECK(cert.normalized_input);
  CHECK(cert.weighted_sum == 0);
  CHECK(cert.trace_r == 0);
  CHECK(cert.trace_residual == 0);
  CHECK(cert.triangular);
  for (const auto& v : cert.nu) CHECK(v == 0);
  CHECK_FALSE(cert.all_nu_positive());
  CHECK(verdict_name(cert.verdict) == "INFEASIBLE_STRICT_SYSTEM");
}

TEST_CASE("certificate rejects tampering") {
  Rng rng(58);
  ConsistentInstance inst = random_consistent_tnprime(rng, 2, 2, 4);
  REQUIRE(certify(inst.cfg, inst.c).ok());

  TNPrimeConfig tampered = inst.cfg;
  tampered.base.Z(0, 1) += 1;
  Certificate t = certify(tampered, inst.c);
  CHECK_FALSE(t.ok());
  CHECK(verdict_name(t.verdict) == "IDENTITY_VIOLATION");
  CHECK_FALSE(t.detail.empty());

  RatVector c = inst.c;
  c[1] += 1;
  CHECK_FALSE(certify(inst.cfg, c).ok());
  CHECK_THROWS_AS(certify(inst.cfg, RatVector{1}), ShapeError);

  TNPrimeConfig no_witness = inst.cfg;
  no_witness.witnesses.clear();
  CHECK(certify(no_witness, inst.c).ok());
}

TEST_CASE("property: certificates on consistent instances") {
  Rng rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.integer(2, 3)), m = static_cast<std::size_t>(rng.integer(2, 3));
    ConsistentInstance inst = random_consistent_tnprime(rng, n, m, static_cast<std::size_t>(rng.integer(2, 5)));
    CHECK(is_normalized(inst.cfg));
    CHECK(verify_tnprime(stacked_points(inst.cfg), inst.cfg).passed());
    ConsistencyReport rep = consistency_and_nu(inst.cfg, inst.c);
    REQUIRE(rep.consistent);
    CHECK(rep.lambda_c == 0);
    CHECK(rep.trace_r == 0);
    CHECK(rep.r_residual.is_zero());
    Certificate cert = certify(inst.cfg, inst.c);
    REQUIRE(cert.ok());
    CHECK(cert.weighted_sum == 0);
    CHECK(cert.triangular);
    CHECK(min_of(cert.nu) <= 0);
    for (const auto& x : cert.xi) CHECK(x > 0);
    CHECK(cert.A.front() == 0);
  }
}

TEST_CASE("property: forged costs never certify with all nu positive") {
  std::size_t forged_positive = 0, certified = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    Rng rng(seed);
    std::size_t n = static_cast<std::size_t>(rng.integer(2, 3)), m = static_cast<std::size_t>(rng.integer(2, 3));
    std::size_t N = static_cast<std::size_t>(rng.integer(2, 4));
    TNConfig x = zero_base_config(rng, n, m, N);
    auto w = witnesses_of(x);

    std::vector<RatMatrix> d;
    RatMatrix sum = RatMatrix::zero(n, m);
    for (std::size_t i = 0; i + 1 < N; ++i) {
      RatMatrix g = rng.matrix(n, m);
      d.push_back(rng.coin() ? annihilate(g, w[i].xi) : g);
      sum += d.back();
    }
    d.push_back(-sum);

    // Aim for ν = target > 0 by solving the linear system in c when possible.
    RatVector c = rng.vector(N);
    RatVector base = nu_oracle(x, d, RatVector(N, Rat(0)));
    RatMatrix lin(N, N);
    for (std::size_t j = 0; j < N; ++j) {
      RatVector e(N, Rat(0));
      e[j] = 1;
      RatVector col = nu_oracle(x, d, e) - base;
      for (std::size_t i = 0; i < N; ++i) lin(i, j) = col[i];
    }
    RatVector target;
    for (std::size_t i = 0; i < N; ++i) target.push_back(rng.rational_in(0, 5));
    if (auto sol = solve(lin, target - base)) c = *sol;

    RatVector nu = nu_oracle(x, d, c);
    bool positive = min_of(nu) > 0;
    if (positive) ++forged_positive;

    TNPrimeConfig cfg = tnprime_from_costs(x, d, c, w);
    Certificate cert = certify(cfg, c);
    if (cert.ok()) {
      ++certified;
      CHECK(cert.nu == nu);
      CHECK(min_of(cert.nu) <= 0);
    }
    CHECK_FALSE((cert.ok() && cert.all_nu_positive()));
  }
  MESSAGE("forged instances with all nu > 0: " << forged_positive << ", certified: " << certified);
  CHECK(forged_positive > 100);
}
