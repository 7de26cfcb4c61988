#include "tnconf/obstruction.hpp"

#include <algorithm>

namespace tnconf {

namespace {

void require_zero_base(const TNPrimeConfig& cfg, const char* what) {
  if (!cfg.base.X.is_zero() || !cfg.base.Y.is_zero()) {
    throw std::invalid_argument(std::string(what) + ": needs a configuration with P = Q = 0");
  }
}

std::vector<RatVector> witness_directions(const TNPrimeConfig& cfg) {
  if (cfg.witnesses.size() != cfg.N()) throw std::invalid_argument("configuration carries no wave-cone witnesses");
  std::vector<RatVector> dirs;
  for (const auto& w : cfg.witnesses) dirs.push_back(w.xi);
  return dirs;
}

// Σ_i k_i(k_i − 1)λ_i C_iᵀD_i
RatMatrix r_formula(const TNPrimeConfig& cfg, const DefiningVector& dv) {
  RatMatrix out = RatMatrix::zero(cfg.m(), cfg.m());
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    out += (cfg.k[i] * (cfg.k[i] - 1) * dv.lambda[i]) * (cfg.arms[i].X.transpose() * cfg.arms[i].Y);
  }
  return out;
}

std::string one_based(std::size_t i) { return std::to_string(i + 1); }

}  // namespace

GaugeResult gauge_normalize(const TNPrimeConfig& cfg, const RatVector& c, const GaugeParams& gp) {
  cfg.check_shape();
  if (c.size() != cfg.N()) throw ShapeError("gauge: cost vector length differs from arm count");
  if (!gp.S.same_shape(cfg.base.X) || !gp.T.same_shape(cfg.base.Y)) throw ShapeError("gauge: S or T has the wrong shape");
  const RatMatrix& P = cfg.base.X;
  const RatMatrix& Q = cfg.base.Y;
  const RatMatrix id = RatMatrix::identity(cfg.m());
  RatMatrix V = Q - gp.T;
  RatMatrix O = gp.S - P;
  RatMatrix Ot = O.transpose();

  GaugeResult out;
  out.cfg = cfg;
  out.cfg.base.X = gp.S;
  out.cfg.base.Y = gp.T;
  out.cfg.base.Z = cfg.base.Z - P.transpose() * V + Ot * gp.T + (dot(P, V) + gp.a) * id;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    const auto& arm = cfg.arms[i];
    out.cfg.arms[i].Z = arm.Z - arm.X.transpose() * V + dot(arm.X, V) * id + Ot * arm.Y;
  }
  auto pts = stacked_points(cfg);
  for (std::size_t i = 0; i < cfg.N(); ++i) out.c.push_back(c[i] - dot(pts[i].X, V) - gp.a);
  return out;
}

GaugeParams normalizing_gauge(const TNPrimeConfig& cfg) {
  cfg.check_shape();
  GaugeParams gp{RatMatrix::zero(cfg.n(), cfg.m()), RatMatrix::zero(cfg.n(), cfg.m()), Rat(0)};
  const Rat m(static_cast<long>(cfg.m()));
  gp.a = -(trace(cfg.base.Z) + (m - 1) * dot(cfg.base.X, cfg.base.Y)) / m;
  return gp;
}

bool is_normalized(const TNPrimeConfig& cfg) {
  return cfg.base.X.is_zero() && cfg.base.Y.is_zero() && trace(cfg.base.Z) == 0;
}

bool GaugeCheck::all_zero() const {
  return sum_e.is_zero() && std::all_of(combination.begin(), combination.end(), [](const RatMatrix& r) { return r.is_zero(); }) &&
         std::all_of(e_on_witness.begin(), e_on_witness.end(), [](const RatVector& v) { return is_zero(v); });
}

GaugeCheck gauge_identities(const TNPrimeConfig& cfg) {
  auto dirs = witness_directions(cfg);
  auto pts = stacked_points(cfg);
  TVectors tv = t_vectors(defining_vector_from_ks(cfg.k));
  GaugeCheck out;
  out.sum_e = RatMatrix::zero(cfg.m(), cfg.m());
  RatMatrix vertex = cfg.base.Z;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    RatMatrix s = RatMatrix::zero(cfg.m(), cfg.m());
    for (std::size_t j = 0; j < cfg.N(); ++j) s += tv.t[i][j] * pts[j].Z;
    out.combination.push_back(s - vertex);
    out.e_on_witness.push_back(cfg.arms[i].Z.apply(dirs[i]));
    out.sum_e += cfg.arms[i].Z;
    vertex += cfg.arms[i].Z;
  }
  return out;
}

CostDerivation derive_costs(const TNPrimeConfig& cfg) {
  CostDerivation out;
  auto pts = stacked_points(cfg);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    RatMatrix d = pts[i].X.transpose() * pts[i].Y - pts[i].Z;
    Rat ci = d.rows() ? d(0, 0) : Rat(0);
    if (d != ci * RatMatrix::identity(d.rows())) {
      out.offending = i;
      return out;
    }
    out.c.push_back(ci);
  }
  return out;
}

RIdentity r_identity(const TNPrimeConfig& cfg) {
  require_zero_base(cfg, "r_identity");
  DefiningVector dv = defining_vector_from_ks(cfg.k);
  auto pts = stacked_points(cfg);
  RIdentity out;
  out.residual = RatMatrix::zero(cfg.m(), cfg.m());
  out.trace_sum = 0;
  for (std::size_t j = 0; j < cfg.N(); ++j) {
    out.residual += dv.lambda[j] * (pts[j].X.transpose() * pts[j].Y);
    out.trace_sum += dv.lambda[j] * dot(pts[j].X, pts[j].Y);
  }
  out.residual -= r_formula(cfg, dv);
  return out;
}

ConsistencyReport consistency_and_nu(const TNPrimeConfig& cfg, const std::optional<RatVector>& costs) {
  require_zero_base(cfg, "consistency_and_nu");
  ConsistencyReport out;
  CostDerivation derived = derive_costs(cfg);
  if (derived.offending) {
    out.offending = derived.offending;
    out.detail = "Z_" + one_based(*derived.offending) + " is not X^T Y - c id";
    return out;
  }
  out.c = derived.c;
  if (costs) {
    if (costs->size() != cfg.N()) throw ShapeError("cost vector length differs from arm count");
    for (std::size_t i = 0; i < cfg.N(); ++i) {
      if ((*costs)[i] != derived.c[i]) {
        out.offending = i;
        out.detail = "cost c_" + one_based(i) + " = " + to_string((*costs)[i]) + " but Z_" + one_based(i) +
                     " implies " + to_string(derived.c[i]);
        return out;
      }
    }
  }
  out.consistent = true;

  DefiningVector dv = defining_vector_from_ks(cfg.k);
  TVectors tv = t_vectors(dv);
  auto pts = stacked_points(cfg);
  out.xi = tv.xi;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    out.nu.push_back(-(out.c[i] - dot(tv.t[i], out.c) - cfg.k[i] * dot(pts[i].Y, cfg.arms[i].X)));
  }
  out.r_formula = r_formula(cfg, dv);
  out.r_residual = cfg.base.Z - out.r_formula;
  out.lambda_c = dot(dv.lambda, out.c);
  out.trace_r = trace(cfg.base.Z);
  return out;
}

std::vector<RatVector> finaleq_check(const TNPrimeConfig& cfg, const RatVector& c) {
  require_zero_base(cfg, "finaleq_check");
  if (c.size() != cfg.N()) throw ShapeError("cost vector length differs from arm count");
  auto dirs = witness_directions(cfg);
  DefiningVector dv = defining_vector_from_ks(cfg.k);
  TVectors tv = t_vectors(dv);
  auto pts = stacked_points(cfg);

  std::vector<RatVector> out;
  RatMatrix partial = RatMatrix::zero(cfg.m(), cfg.m());  // Σ_{α<i} k_α(k_α − 1)λ_α C_αᵀD_α
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    Rat nu = -(c[i] - dot(tv.t[i], c) - cfg.k[i] * dot(pts[i].Y, cfg.arms[i].X));
    RatVector lhs = (1 / tv.xi[i]) * (cfg.base.Z.apply(dirs[i]) + (dv.mu - 1) * partial.apply(dirs[i]));
    out.push_back(lhs - nu * dirs[i]);
    const auto& arm = cfg.arms[i];
    partial += (cfg.k[i] * (cfg.k[i] - 1) * dv.lambda[i]) * (arm.X.transpose() * arm.Y);
  }
  return out;
}

std::vector<std::size_t> independent_set(const std::vector<RatVector>& dirs) {
  std::vector<std::size_t> A;
  if (dirs.empty()) return A;
  A.push_back(0);
  std::vector<RatVector> span{dirs[0]};
  std::size_t current = rank(RatMatrix::column(dirs[0]));
  for (std::size_t j = 1; j < dirs.size(); ++j) {
    span.push_back(dirs[j]);
    RatMatrix rows(span.size(), dirs[j].size());
    for (std::size_t r = 0; r < span.size(); ++r) {
      for (std::size_t c = 0; c < dirs[j].size(); ++c) rows(r, c) = span[r][c];
    }
    std::size_t next = rank(rows);
    if (next > current) {
      A.push_back(j);
      current = next;
    } else {
      span.pop_back();
    }
  }
  return A;
}

bool Certificate::all_nu_positive() const {
  return !nu.empty() && std::all_of(nu.begin(), nu.end(), [](const Rat& v) { return v > 0; });
}

std::string verdict_name(CertificateVerdict v) {
  return v == CertificateVerdict::infeasible_strict_system ? "INFEASIBLE_STRICT_SYSTEM" : "IDENTITY_VIOLATION";
}

namespace {

// Pairwise orthogonal (unnormalized) basis of the orthogonal complement of span(vs).
std::vector<RatVector> orthogonal_completion(const std::vector<RatVector>& vs, std::size_t m) {
  RatMatrix rows(vs.size(), m);
  for (std::size_t r = 0; r < vs.size(); ++r) {
    for (std::size_t c = 0; c < m; ++c) rows(r, c) = vs[r][c];
  }
  std::vector<RatVector> gammas;
  for (auto v : nullspace(rows)) {
    for (const auto& g : gammas) v = v - (dot(v, g) / dot(g, g)) * g;
    gammas.push_back(std::move(v));
  }
  return gammas;
}

Certificate violation(Certificate cert, std::string detail) {
  cert.verdict = CertificateVerdict::identity_violation;
  cert.detail = std::move(detail);
  return cert;
}

}  // namespace

Certificate certify(const TNPrimeConfig& input, const std::optional<RatVector>& costs) {
  input.check_shape();
  Certificate cert;
  TNPrimeConfig cfg = input;
  if (cfg.witnesses.empty()) {
    for (std::size_t i = 0; i < cfg.N(); ++i) {
      auto found = wave_cone_membership(cfg.arms[i]);
      if (!found.witness) return violation(cert, "arm " + one_based(i) + " is outside the wave cone: " + found.reason);
      cfg.witnesses.push_back(*found.witness);
    }
  }

  TNPrimeVerdict tv = verify_tnprime(stacked_points(cfg), cfg);
  if (!tv.passed()) {
    if (auto i = tv.first_cone_failure()) return violation(cert, "arm " + one_based(*i) + " fails the wave-cone condition");
    if (!tv.closing_x_ok() || !tv.closing_y_ok() || !tv.closing_z_ok()) return violation(cert, "arms do not sum to zero");
    if (!tv.k_ok()) return violation(cert, "some k_i is not above 1");
    if (!tv.stacked_distinct) return violation(cert, "stacked points are not distinct");
    return violation(cert, "configuration fails verification");
  }

  CostDerivation derived = derive_costs(cfg);
  if (derived.offending) {
    return violation(cert, "Z_" + one_based(*derived.offending) + " is not X^T Y - c id");
  }
  RatVector c = derived.c;
  if (costs) {
    if (costs->size() != cfg.N()) throw ShapeError("cost vector length differs from arm count");
    for (std::size_t i = 0; i < cfg.N(); ++i) {
      if ((*costs)[i] != c[i]) {
        return violation(cert, "cost c_" + one_based(i) + " disagrees with Z_" + one_based(i));
      }
    }
  }

  cert.normalized_input = is_normalized(cfg);
  if (!cert.normalized_input) {
    GaugeResult g = gauge_normalize(cfg, c, normalizing_gauge(cfg));
    cfg = std::move(g.cfg);
    c = std::move(g.c);
  }

  ConsistencyReport rep = consistency_and_nu(cfg, c);
  if (!rep.consistent) return violation(cert, rep.detail);
  cert.xi = rep.xi;
  cert.nu = rep.nu;
  cert.c = c;
  cert.trace_r = rep.trace_r;

  if (!r_identity(cfg).all_zero()) return violation(cert, "quadratic sum identity fails");
  if (rep.lambda_c != 0) return violation(cert, "weighted cost sum is " + to_string(rep.lambda_c));
  if (rep.trace_r != 0) return violation(cert, "tr R is " + to_string(rep.trace_r));
  if (!rep.r_residual.is_zero()) return violation(cert, "R differs from the weighted arm products");
  auto fe = finaleq_check(cfg, c);
  for (std::size_t i = 0; i < fe.size(); ++i) {
    if (!is_zero(fe[i])) return violation(cert, "witness evaluation identity fails at " + one_based(i));
  }

  std::vector<RatVector> dirs = witness_directions(cfg);
  cert.A = independent_set(dirs);
  const std::size_t m = cfg.m();
  std::vector<RatVector> ns;
  for (auto s : cert.A) ns.push_back(dirs[s]);
  cert.basis = ns;
  for (auto& g : orthogonal_completion(ns, m)) cert.basis.push_back(std::move(g));

  RatMatrix B(m, m);
  for (std::size_t col = 0; col < m; ++col) {
    for (std::size_t row = 0; row < m; ++row) B(row, col) = cert.basis[col][row];
  }
  cert.representation = inverse(B) * cfg.base.Z * B;

  const std::size_t dim_s = cert.A.size();
  cert.triangular = true;
  cert.weighted_sum = 0;
  for (std::size_t col = 0; col < m; ++col) {
    for (std::size_t row = 0; row < m; ++row) {
      const Rat& x = cert.representation(row, col);
      bool below = col < dim_s ? row > col : row >= dim_s;
      if (below && x != 0) cert.triangular = false;
    }
  }
  for (std::size_t s = 0; s < dim_s; ++s) {
    Rat expected = cert.xi[cert.A[s]] * cert.nu[cert.A[s]];
    if (cert.representation(s, s) != expected) cert.triangular = false;
    cert.weighted_sum += expected;
  }
  cert.trace_residual = cert.weighted_sum - cert.trace_r;

  if (!cert.triangular) return violation(cert, "representation of R is not triangular with diagonal xi nu");
  if (cert.trace_residual != 0) return violation(cert, "trace identity residual " + to_string(cert.trace_residual));
  cert.verdict = CertificateVerdict::infeasible_strict_system;
  cert.detail = "sum over A of xi_j nu_j equals tr R = 0 with every xi_j > 0, so nu_j > 0 for all j is impossible";
  return cert;
}

TNPrimeConfig tnprime_from_costs(const TNConfig& xcfg, const std::vector<RatMatrix>& d, const RatVector& c,
                                 const std::vector<WaveConeWitness>& witnesses) {
  xcfg.check_shape();
  const std::size_t N = xcfg.N(), n = xcfg.rows(), m = xcfg.cols();
  if (d.size() != N || c.size() != N) throw ShapeError("tnprime_from_costs: length mismatch");
  TNPointSet xs = points_from_config(xcfg);
  TVectors tv = t_vectors(defining_vector_from_ks(xcfg.k));
  const RatMatrix id = RatMatrix::identity(m);

  std::vector<RatMatrix> zs;
  RatMatrix prefix = RatMatrix::zero(n, m);
  for (std::size_t i = 0; i < N; ++i) {
    RatMatrix y = prefix + xcfg.k[i] * d[i];
    zs.push_back(xs.X[i].transpose() * y - c[i] * id);
    prefix += d[i];
  }
  std::vector<RatMatrix> s;  // Σ_j t^i_j Z_j
  for (std::size_t i = 0; i < N; ++i) {
    RatMatrix acc = RatMatrix::zero(m, m);
    for (std::size_t j = 0; j < N; ++j) acc += tv.t[i][j] * zs[j];
    s.push_back(std::move(acc));
  }

  TNPrimeConfig cfg;
  cfg.base = {xcfg.P, RatMatrix::zero(n, m), s[0]};
  cfg.k = xcfg.k;
  cfg.witnesses = witnesses;
  for (std::size_t i = 0; i < N; ++i) {
    RatMatrix e = s[(i + 1) % N] - s[i];
    cfg.arms.push_back({xcfg.C[i], d[i], std::move(e)});
  }
  return cfg;
}

namespace {

// Linear constraints on (D_1..D_N, c) for a normalized consistent T_N':
// D_i n_i = 0, Σ D_i = 0, E_i n_i = 0 and Σ λ_j c_j = 0.
RatVector consistency_constraints(const TNConfig& xcfg, const std::vector<RatVector>& dirs, const RatVector& lambda,
                                  const RatVector& z) {
  const std::size_t N = xcfg.N(), n = xcfg.rows(), m = xcfg.cols();
  std::vector<RatMatrix> d(N, RatMatrix(n, m));
  RatVector c(N);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t col = 0; col < m; ++col) d[i](r, col) = z[pos++];
    }
  }
  for (std::size_t i = 0; i < N; ++i) c[i] = z[pos++];

  TNPrimeConfig cfg = tnprime_from_costs(xcfg, d, c, {});
  RatVector out;
  RatMatrix sum = RatMatrix::zero(n, m);
  for (std::size_t i = 0; i < N; ++i) {
    for (const auto& x : d[i].apply(dirs[i])) out.push_back(x);
    for (const auto& x : cfg.arms[i].Z.apply(dirs[i])) out.push_back(x);
    sum += d[i];
  }
  out.insert(out.end(), sum.entries().begin(), sum.entries().end());
  out.push_back(dot(lambda, c));
  return out;
}

}  // namespace

ConsistentInstance random_consistent_tnprime(Rng& rng, std::size_t n, std::size_t m, std::size_t N) {
  TNConfig xcfg;
  for (;;) {
    xcfg = random_tn_config(rng, n, m, N);
    xcfg.P = RatMatrix::zero(n, m);
    if (points_from_config(xcfg).pairwise_distinct()) break;
  }
  return random_consistent_tnprime(rng, xcfg);
}

ConsistentInstance random_consistent_tnprime(Rng& rng, const TNConfig& xcfg) {
  if (!xcfg.P.is_zero()) throw std::invalid_argument("random_consistent_tnprime: needs P = 0");
  const std::size_t N = xcfg.N(), n = xcfg.rows(), m = xcfg.cols();
  std::vector<WaveConeWitness> witnesses;
  std::vector<RatVector> dirs;
  for (const auto& arm : xcfg.C) {
    auto f = rank_one_decompose(arm);
    if (!f || f->zero) throw std::invalid_argument("random_consistent_tnprime: arms must have rank one");
    witnesses.push_back({f->v, f->u});
    dirs.push_back(f->v);
  }
  RatVector lambda = defining_vector_from_ks(xcfg.k).lambda;

  const std::size_t unknowns = N * n * m + N;
  std::vector<RatVector> columns;
  for (std::size_t k = 0; k < unknowns; ++k) {
    RatVector e(unknowns, Rat(0));
    e[k] = 1;
    columns.push_back(consistency_constraints(xcfg, dirs, lambda, e));
  }
  RatMatrix system(columns.front().size(), unknowns);
  for (std::size_t k = 0; k < unknowns; ++k) {
    for (std::size_t r = 0; r < system.rows(); ++r) system(r, k) = columns[k][r];
  }

  RatVector z(unknowns, Rat(0));
  for (const auto& v : nullspace(system)) z = z + Rat(static_cast<long>(rng.integer(-3, 3))) * v;

  std::vector<RatMatrix> d(N, RatMatrix(n, m));
  RatVector c(N);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t col = 0; col < m; ++col) d[i](r, col) = z[pos++];
    }
  }
  for (std::size_t i = 0; i < N; ++i) c[i] = z[pos++];
  return {tnprime_from_costs(xcfg, d, c, witnesses), c};
}

}  // namespace tnconf
