#include "tnconf/tn.hpp"

#include <algorithm>

namespace tnconf {

bool TNConfig::nondegenerate() const {
  return std::all_of(C.begin(), C.end(), [](const RatMatrix& c) { return rank(c) == 1; });
}

void TNConfig::check_shape() const {
  if (k.size() != C.size()) throw ShapeError("configuration: " + std::to_string(C.size()) + " arms but " +
                                             std::to_string(k.size()) + " coefficients");
  for (const auto& c : C) {
    if (!c.same_shape(P)) throw ShapeError("configuration: arm shape differs from base point");
  }
}

void DefiningVector::check() const {
  if (lambda.size() < 2) throw std::invalid_argument("defining vector needs N >= 2");
  if (!(mu > 1)) throw std::invalid_argument("defining vector needs mu > 1");
  for (const auto& l : lambda) {
    if (!(l > 0)) throw std::invalid_argument("defining vector needs every lambda_j > 0");
  }
}

DefiningVector DefiningVector::normalized() const {
  check();
  Rat total = 0;
  for (const auto& l : lambda) total += l;
  DefiningVector out{lambda, mu};
  for (auto& l : out.lambda) l /= total;
  return out;
}

bool TNPointSet::pairwise_distinct() const {
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      if (X[i] == X[j]) return false;
    }
  }
  return true;
}

TNPointSet points_from_config(const TNConfig& cfg) {
  cfg.check_shape();
  TNPointSet out;
  RatMatrix vertex = cfg.P;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    out.X.push_back(vertex + cfg.k[i] * cfg.C[i]);
    vertex += cfg.C[i];
  }
  return out;
}

bool TNVerdict::rank_one_ok() const {
  return std::all_of(arm_rank_one.begin(), arm_rank_one.end(), [](bool b) { return b; });
}

bool TNVerdict::relations_ok() const { return !first_failed_relation().has_value(); }

bool TNVerdict::k_ok() const {
  return std::all_of(k_above_one.begin(), k_above_one.end(), [](bool b) { return b; });
}

bool TNVerdict::passed() const {
  return rank_one_ok() && closing_ok() && relations_ok() && k_ok() && distinct.value_or(true);
}

std::optional<std::size_t> TNVerdict::first_failed_relation() const {
  for (std::size_t i = 0; i < relation_residuals.size(); ++i) {
    if (!relation_residuals[i].is_zero()) return i;
  }
  return std::nullopt;
}

TNVerdict verify_tn(const TNPointSet& points, const TNConfig& cfg, VerifyOptions opts) {
  cfg.check_shape();
  if (points.N() != cfg.N()) throw ShapeError("verify_tn: point count differs from arm count");
  for (const auto& x : points.X) {
    if (!x.same_shape(cfg.P)) throw ShapeError("verify_tn: point shape differs from base point");
  }

  TNVerdict v;
  v.closing_residual = RatMatrix::zero(cfg.rows(), cfg.cols());
  v.nondegenerate = true;
  v.two_arm = cfg.N() == 2;
  RatMatrix vertex = cfg.P;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    std::size_t r = rank(cfg.C[i]);
    v.arm_rank_one.push_back(r <= 1);
    v.nondegenerate = v.nondegenerate && r == 1;
    v.closing_residual += cfg.C[i];
    v.relation_residuals.push_back(points.X[i] - (vertex + cfg.k[i] * cfg.C[i]));
    v.k_above_one.push_back(cfg.k[i] > 1);
    vertex += cfg.C[i];
  }
  if (opts.strict) v.distinct = points.pairwise_distinct();
  return v;
}

DefiningVector defining_vector_from_ks(const RatVector& k) {
  if (k.size() < 2) throw std::invalid_argument("need at least two coefficients");
  for (const auto& ki : k) {
    if (!(ki > 1)) throw std::invalid_argument("every k_i must exceed 1, got " + to_string(ki));
  }
  Rat num = 1, den = 1;
  for (const auto& ki : k) {
    num *= ki;
    den *= ki - 1;
  }
  DefiningVector dv;
  dv.mu = num / den;
  Rat prefix_k = 1;
  Rat prefix_km1 = 1;
  for (const auto& ki : k) {
    prefix_km1 *= ki - 1;
    dv.lambda.push_back(prefix_k / ((dv.mu - 1) * prefix_km1));
    prefix_k *= ki;
  }
  return dv;
}

RatVector ks_from_defining_vector(const DefiningVector& raw) {
  DefiningVector dv = raw.normalized();
  RatVector k;
  Rat head = 0;  // λ_1 + … + λ_i
  for (std::size_t i = 0; i < dv.N(); ++i) {
    head += dv.lambda[i];
    k.push_back((dv.mu * head + (1 - head)) / ((dv.mu - 1) * dv.lambda[i]));
  }
  return k;
}

TVectors t_vectors(const DefiningVector& raw) {
  DefiningVector dv = raw.normalized();
  TVectors out;
  for (std::size_t i = 0; i < dv.N(); ++i) {
    RatVector t(dv.N());
    Rat xi = 0;
    for (std::size_t j = 0; j < dv.N(); ++j) {
      t[j] = j < i ? Rat(dv.mu * dv.lambda[j]) : dv.lambda[j];
      xi += t[j];
    }
    for (auto& x : t) x /= xi;
    out.t.push_back(std::move(t));
    out.xi.push_back(xi);
  }
  return out;
}

RatMatrix build_a_mu(const TNPointSet& points, const Rat& mu, const MultiIndex& z) {
  const std::size_t N = points.N();
  if (N == 0) return RatMatrix{};
  std::vector<RatMatrix> minors;
  for (const auto& x : points.X) {
    if (!x.same_shape(points.X[0])) throw ShapeError("build_a_mu: points differ in shape");
    minors.push_back(minor_extract(x, z));
  }
  RatMatrix a(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      Rat d = det(minors[j] - minors[i]);
      a(i, j) = j < i ? Rat(mu * d) : d;
    }
  }
  return a;
}

KernelCheck kernel_check_all_minors(const TNPointSet& points, const DefiningVector& dv) {
  dv.check();
  if (points.N() != dv.N()) throw ShapeError("kernel check: point count differs from defining vector length");
  KernelCheck out;
  if (points.N() == 0) return out;
  for (const auto& z : multi_indices(points.X[0].rows(), points.X[0].cols(), 2)) {
    RatVector prod = build_a_mu(points, dv.mu, z).apply(dv.lambda);
    ++out.minors_checked;
    if (!is_zero(prod)) {
      out.passed = false;
      out.first_failure = z;
      out.failure_product = std::move(prod);
      return out;
    }
  }
  return out;
}

SynthesisResult synthesize_tn(const TNPointSet& points, const DefiningVector& dv) {
  SynthesisResult out;
  out.kernel = kernel_check_all_minors(points, dv);
  if (!out.kernel.passed) {
    out.diagnostic = "kernel condition fails at minor " + out.kernel.first_failure->key();
    return out;
  }
  TVectors tv = t_vectors(dv);
  const std::size_t N = points.N();
  std::vector<RatMatrix> vertex;  // Σ_j t^i_j X_j
  for (std::size_t i = 0; i < N; ++i) {
    RatMatrix s = RatMatrix::zero(points.X[0].rows(), points.X[0].cols());
    for (std::size_t j = 0; j < N; ++j) s += tv.t[i][j] * points.X[j];
    vertex.push_back(std::move(s));
  }
  TNConfig cfg;
  cfg.P = vertex[0];
  RatMatrix sum = RatMatrix::zero(cfg.P.rows(), cfg.P.cols());
  for (std::size_t i = 0; i + 1 < N; ++i) {
    cfg.C.push_back(vertex[i + 1] - vertex[i]);
    sum += cfg.C.back();
  }
  cfg.C.push_back(-sum);
  cfg.k = ks_from_defining_vector(dv);

  TNVerdict v = verify_tn(points, cfg);
  if (!v.passed()) {
    out.diagnostic = "synthesized configuration fails verification";
    return out;
  }
  out.degenerate = std::any_of(cfg.C.begin(), cfg.C.end(), [](const RatMatrix& c) { return c.is_zero(); });
  if (out.degenerate) out.diagnostic = "some synthesized arm is zero";
  out.config = std::move(cfg);
  return out;
}

Rat matrix_determinant_lemma(const RatMatrix& a, const RatMatrix& b) {
  if (!a.is_square() || !a.same_shape(b)) throw ShapeError("determinant lemma: need square matrices of equal size");
  if (rank(b) >= 2) throw std::invalid_argument("determinant lemma: B must have rank at most one");
  return det(a + b) - det(a) - dot(cof(a).transpose(), b);
}

bool MinorSumResidual::all_zero() const { return is_zero(combination) && is_zero(polygon) && is_zero(kernel); }

MinorSumResidual minor_sum_identity(const TNConfig& cfg, const MultiIndex& z) {
  TNPointSet pts = points_from_config(cfg);
  TVectors tv = t_vectors(defining_vector_from_ks(cfg.k));
  validate(z, cfg.rows(), cfg.cols());
  auto s = [&](const RatMatrix& x) { return det(minor_extract(x, z)); };

  MinorSumResidual out;
  RatMatrix polygon = cfg.P;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    RatMatrix comb = RatMatrix::zero(cfg.rows(), cfg.cols());
    Rat weighted = 0;
    Rat kernel = 0;
    RatMatrix xi_minor = minor_extract(pts.X[i], z);
    for (std::size_t j = 0; j < cfg.N(); ++j) {
      comb += tv.t[i][j] * pts.X[j];
      weighted += tv.t[i][j] * s(pts.X[j]);
      kernel += tv.t[i][j] * det(minor_extract(pts.X[j], z) - xi_minor);
    }
    out.combination.push_back(weighted - s(comb));
    out.polygon.push_back(s(comb) - s(polygon));
    out.kernel.push_back(kernel);
    polygon += cfg.C[i];
  }
  return out;
}

std::vector<RatMatrix> barycentric_combination(const RatMatrix& v, const std::vector<RatMatrix>& vs,
                                               const std::vector<RatMatrix>& ws, const DefiningVector& dv) {
  const std::size_t N = dv.N();
  if (vs.size() != N || ws.size() != N) throw ShapeError("barycentric combination: length mismatch");
  RatVector k = ks_from_defining_vector(dv);
  RatMatrix partial = v;
  RatMatrix total = RatMatrix::zero(v.rows(), v.cols());
  for (std::size_t i = 0; i < N; ++i) {
    if (ws[i] != partial + k[i] * vs[i]) {
      throw std::invalid_argument("barycentric combination: w_" + std::to_string(i + 1) +
                                  " is not v + v_1 + ... + k_i v_i");
    }
    partial += vs[i];
    total += vs[i];
  }
  if (!total.is_zero()) throw std::invalid_argument("barycentric combination: v_1 + ... + v_N is not zero");

  TVectors tv = t_vectors(dv);
  std::vector<RatMatrix> residuals;
  partial = v;
  for (std::size_t i = 0; i < N; ++i) {
    RatMatrix s = RatMatrix::zero(v.rows(), v.cols());
    for (std::size_t j = 0; j < N; ++j) s += tv.t[i][j] * ws[j];
    residuals.push_back(s - partial);
    partial += vs[i];
  }
  return residuals;
}

std::vector<RatMatrix> random_rank_one_loop(Rng& rng, std::size_t n, std::size_t m, std::size_t N) {
  if (N < 2) throw std::invalid_argument("a loop needs at least two arms");
  if (n == 0 || m == 0) throw ShapeError("a loop needs a nonempty shape");
  if (N == 2) {
    RatMatrix c = RatMatrix::outer(rng.nonzero_vector(n), rng.nonzero_vector(m));
    return {c, -c};
  }
  // The free arms share a two-dimensional column (or row) space, so their
  // sum has rank at most two and splits into two closing rank-one arms.
  for (;;) {
    const bool columns = rng.coin();
    const std::size_t span_dim = columns ? n : m;
    const std::size_t other_dim = columns ? m : n;
    RatVector a = rng.nonzero_vector(span_dim);
    RatVector b = rng.nonzero_vector(span_dim);
    RatVector p(other_dim, Rat(0));
    RatVector q(other_dim, Rat(0));
    std::vector<RatMatrix> arms;
    bool ok = true;
    for (std::size_t i = 0; i + 2 < N && ok; ++i) {
      Rat alpha = rng.rational(), beta = rng.rational();
      RatVector in_span = alpha * a + beta * b;
      RatVector free = rng.nonzero_vector(other_dim);
      if (is_zero(in_span)) {
        ok = false;
        break;
      }
      arms.push_back(columns ? RatMatrix::outer(in_span, free) : RatMatrix::outer(free, in_span));
      p = p + alpha * free;
      q = q + beta * free;
    }
    if (!ok || is_zero(p) || is_zero(q)) continue;
    if (columns) {
      arms.push_back(-RatMatrix::outer(a, p));
      arms.push_back(-RatMatrix::outer(b, q));
    } else {
      arms.push_back(-RatMatrix::outer(p, a));
      arms.push_back(-RatMatrix::outer(q, b));
    }
    std::shuffle(arms.begin(), arms.end(), rng.engine());
    return arms;
  }
}

TNConfig random_tn_config(Rng& rng, std::size_t n, std::size_t m, std::size_t N) {
  for (;;) {
    TNConfig cfg;
    cfg.P = rng.matrix(n, m);
    cfg.C = random_rank_one_loop(rng, n, m, N);
    for (std::size_t i = 0; i < N; ++i) cfg.k.push_back(rng.rational_in(Rat(1), Rat(4)));
    if (points_from_config(cfg).pairwise_distinct()) return cfg;
  }
}

}  // namespace tnconf
