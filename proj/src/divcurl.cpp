#include "tnconf/divcurl.hpp"

#include <algorithm>

namespace tnconf {

StackedMatrix StackedMatrix::zero(std::size_t n, std::size_t m) {
  return {RatMatrix::zero(n, m), RatMatrix::zero(n, m), RatMatrix::zero(m, m)};
}

void StackedMatrix::check_shape() const {
  if (!X.same_shape(Y)) throw ShapeError("stacked matrix: X and Y blocks differ in shape");
  if (Z.rows() != X.cols() || Z.cols() != X.cols()) throw ShapeError("stacked matrix: Z block must be m×m");
}

StackedMatrix& StackedMatrix::operator+=(const StackedMatrix& o) {
  X += o.X;
  Y += o.Y;
  Z += o.Z;
  return *this;
}

StackedMatrix& StackedMatrix::operator-=(const StackedMatrix& o) {
  X -= o.X;
  Y -= o.Y;
  Z -= o.Z;
  return *this;
}

StackedMatrix operator+(StackedMatrix a, const StackedMatrix& b) { return a += b; }
StackedMatrix operator-(StackedMatrix a, const StackedMatrix& b) { return a -= b; }
StackedMatrix operator*(const Rat& s, const StackedMatrix& a) { return {s * a.X, s * a.Y, s * a.Z}; }

bool witness_holds(const StackedMatrix& w, const WaveConeWitness& witness) {
  if (witness.xi.size() != w.m() || witness.u.size() != w.n() || is_zero(witness.xi)) return false;
  return w.X == RatMatrix::outer(witness.u, witness.xi) && is_zero(w.Y.apply(witness.xi)) &&
         is_zero(w.Z.apply(witness.xi));
}

namespace {

RatVector unit(std::size_t m, std::size_t i) {
  RatVector e(m, Rat(0));
  e[i] = 1;
  return e;
}

}  // namespace

WaveConeResult wave_cone_membership(const StackedMatrix& w) {
  w.check_shape();
  const std::size_t n = w.n(), m = w.m();
  if (m == 0) return {std::nullopt, "no directions in a zero-dimensional domain"};
  if (w.is_zero()) return {WaveConeWitness{unit(m, 0), RatVector(n, Rat(0))}, "zero element"};

  if (w.X.is_zero()) {
    RatMatrix stacked(n + m, m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) stacked(i, j) = w.Y(i, j);
      for (std::size_t i = 0; i < m; ++i) stacked(n + i, j) = w.Z(i, j);
    }
    auto kernel = nullspace(stacked);
    if (kernel.empty()) return {std::nullopt, "X = 0 but ker Y ∩ ker Z is trivial"};
    return {WaveConeWitness{kernel.front(), RatVector(n, Rat(0))}, "X = 0, direction from ker Y ∩ ker Z"};
  }

  auto factors = rank_one_decompose(w.X);
  if (!factors) return {std::nullopt, "X has rank at least two"};
  // X ≠ 0 pins ξ to the row direction of X up to scale.
  WaveConeWitness witness{factors->v, factors->u};
  if (!is_zero(w.Y.apply(witness.xi))) return {std::nullopt, "Y does not annihilate the row direction of X"};
  if (!is_zero(w.Z.apply(witness.xi))) return {std::nullopt, "Z does not annihilate the row direction of X"};
  return {witness, "rank-one X with compatible Y and Z"};
}

void TNPrimeConfig::check_shape() const {
  base.check_shape();
  if (k.size() != arms.size()) throw ShapeError("T_N' configuration: arm and coefficient counts differ");
  if (!witnesses.empty() && witnesses.size() != arms.size()) {
    throw ShapeError("T_N' configuration: witness and arm counts differ");
  }
  for (const auto& a : arms) {
    a.check_shape();
    if (!a.same_shape(base)) throw ShapeError("T_N' configuration: arm shape differs from base");
  }
}

bool TNPrimeConfig::nondegenerate() const {
  return std::all_of(arms.begin(), arms.end(), [](const StackedMatrix& a) { return rank(a.X) == 1; });
}

TNConfig TNPrimeConfig::x_config() const {
  TNConfig cfg;
  cfg.P = base.X;
  for (const auto& a : arms) cfg.C.push_back(a.X);
  cfg.k = k;
  return cfg;
}

std::vector<StackedMatrix> stacked_points(const TNPrimeConfig& cfg) {
  cfg.check_shape();
  std::vector<StackedMatrix> out;
  StackedMatrix vertex = cfg.base;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    out.push_back(vertex + cfg.k[i] * cfg.arms[i]);
    vertex += cfg.arms[i];
  }
  return out;
}

TNPrimeConfig lift_tn(const TNConfig& cfg) {
  cfg.check_shape();
  const std::size_t n = cfg.rows(), m = cfg.cols();
  TNPrimeConfig out;
  out.base = {cfg.P, RatMatrix::zero(n, m), RatMatrix::zero(m, m)};
  out.k = cfg.k;
  for (const auto& c : cfg.C) {
    out.arms.push_back({c, RatMatrix::zero(n, m), RatMatrix::zero(m, m)});
    auto f = rank_one_decompose(c);
    if (!f) throw std::invalid_argument("lift_tn: arm of rank at least two");
    if (f->zero) {
      out.witnesses.push_back({unit(m, 0), RatVector(n, Rat(0))});
    } else {
      out.witnesses.push_back({f->v, f->u});
    }
  }
  return out;
}

bool TNPrimeVerdict::relations_ok() const { return !first_failed_relation().has_value(); }

bool TNPrimeVerdict::cone_ok() const { return !first_cone_failure().has_value(); }

bool TNPrimeVerdict::k_ok() const {
  return std::all_of(k_above_one.begin(), k_above_one.end(), [](bool b) { return b; });
}

bool TNPrimeVerdict::passed() const {
  return relations_ok() && closing_x_ok() && closing_y_ok() && closing_z_ok() && cone_ok() && k_ok() &&
         stacked_distinct;
}

std::optional<std::size_t> TNPrimeVerdict::first_failed_relation() const {
  for (std::size_t i = 0; i < relation_residuals.size(); ++i) {
    if (!relation_residuals[i].is_zero()) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TNPrimeVerdict::first_cone_failure() const {
  for (std::size_t i = 0; i < arm_in_cone.size(); ++i) {
    if (!arm_in_cone[i] || (!witness_valid.empty() && !witness_valid[i])) return i;
  }
  return std::nullopt;
}

TNPrimeVerdict verify_tnprime(const std::vector<StackedMatrix>& points, const TNPrimeConfig& cfg) {
  cfg.check_shape();
  if (points.size() != cfg.N()) throw ShapeError("verify_tnprime: point count differs from arm count");
  for (const auto& p : points) {
    p.check_shape();
    if (!p.same_shape(cfg.base)) throw ShapeError("verify_tnprime: point shape differs from base");
  }

  TNPrimeVerdict v;
  v.closing_residual = StackedMatrix::zero(cfg.n(), cfg.m());
  StackedMatrix vertex = cfg.base;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    const auto& arm = cfg.arms[i];
    v.relation_residuals.push_back(points[i] - (vertex + cfg.k[i] * arm));
    v.closing_residual += arm;
    WaveConeResult cone = wave_cone_membership(arm);
    v.arm_in_cone.push_back(cone.witness.has_value());
    v.cone_reason.push_back(cone.reason);
    if (!cfg.witnesses.empty()) v.witness_valid.push_back(witness_holds(arm, cfg.witnesses[i]));
    v.k_above_one.push_back(cfg.k[i] > 1);
    vertex += arm;
  }
  v.stacked_distinct = true;
  v.x_blocks_distinct = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) v.stacked_distinct = false;
      if (points[i].X == points[j].X) v.x_blocks_distinct = false;
    }
  }
  v.nondegenerate = cfg.nondegenerate();
  return v;
}

bool StructuralVerdict::passed() const {
  return x_blocks_induce_tn.value_or(true) &&
         std::all_of(arm_factorizes.begin(), arm_factorizes.end(), [](bool b) { return b; }) &&
         is_zero(orthogonality);
}

StructuralVerdict structural_checks(const TNPrimeConfig& cfg) {
  cfg.check_shape();
  StructuralVerdict out;
  TNConfig xcfg = cfg.x_config();
  TNPointSet xs = points_from_config(xcfg);
  if (xs.pairwise_distinct()) out.x_blocks_induce_tn = verify_tn(xs, xcfg).passed();

  for (std::size_t i = 0; i < cfg.N(); ++i) {
    const auto& arm = cfg.arms[i];
    std::optional<WaveConeWitness> w;
    if (!cfg.witnesses.empty()) {
      w = cfg.witnesses[i];
    } else {
      w = wave_cone_membership(arm).witness;
    }
    out.arm_factorizes.push_back(w.has_value() && witness_holds(arm, *w));
    out.orthogonality.push_back(dot(arm.X, arm.Y));
  }
  return out;
}

RatMatrix annihilate(const RatMatrix& g, const RatVector& n) {
  if (g.cols() != n.size()) throw ShapeError("annihilate: direction length mismatch");
  Rat nn = dot(n, n);
  if (nn == 0) throw std::invalid_argument("annihilate: zero direction");
  RatVector gn = g.apply(n);
  return g - (1 / nn) * RatMatrix::outer(gn, n);
}

namespace {

bool parallel(const RatVector& a, const RatVector& b) {
  RatMatrix pair(2, a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    pair(0, j) = a[j];
    pair(1, j) = b[j];
  }
  return rank(pair) <= 1;
}

// Blocks B_1..B_{N-1} with B_i n_i = 0 get a last entry B_N = −Σ B_i. One
// earlier block not parallel to n_N absorbs a rank-one correction so that
// B_N n_N = 0 as well; when every n_i is parallel to n_N this holds already.
void close_annihilated(std::vector<RatMatrix>& blocks, const std::vector<RatVector>& dirs) {
  const std::size_t last = dirs.size() - 1;
  RatVector r(blocks.front().rows(), Rat(0));
  for (const auto& b : blocks) r = r + b.apply(dirs[last]);
  if (!is_zero(r)) {
    for (std::size_t j = 0; j < last; ++j) {
      if (parallel(dirs[j], dirs[last])) continue;
      RatVector w = dirs[last] - (dot(dirs[last], dirs[j]) / dot(dirs[j], dirs[j])) * dirs[j];
      blocks[j] -= (1 / dot(w, dirs[last])) * RatMatrix::outer(r, w);
      break;
    }
  }
  RatMatrix sum = RatMatrix::zero(blocks.front().rows(), blocks.front().cols());
  for (const auto& b : blocks) sum += b;
  blocks.push_back(-sum);
}

}  // namespace

TNPrimeConfig random_tnprime(Rng& rng, std::size_t n, std::size_t m, std::size_t N) {
  for (;;) {
    TNPrimeConfig cfg;
    cfg.base = {rng.matrix(n, m), rng.matrix(n, m), rng.matrix(m, m)};
    std::vector<RatMatrix> cs = random_rank_one_loop(rng, n, m, N);
    std::vector<RatVector> dirs;
    for (const auto& c : cs) {
      auto f = rank_one_decompose(c);
      cfg.witnesses.push_back({f->v, f->u});
      dirs.push_back(f->v);
    }
    std::vector<RatMatrix> ds, es;
    for (std::size_t i = 0; i + 1 < N; ++i) {
      ds.push_back(annihilate(rng.matrix(n, m), dirs[i]));
      es.push_back(annihilate(rng.matrix(m, m), dirs[i]));
    }
    close_annihilated(ds, dirs);
    close_annihilated(es, dirs);
    for (std::size_t i = 0; i < N; ++i) {
      cfg.arms.push_back({cs[i], ds[i], es[i]});
      cfg.k.push_back(rng.rational_in(Rat(1), Rat(4)));
    }
    auto pts = stacked_points(cfg);
    bool distinct = true;
    for (std::size_t i = 0; i < N && distinct; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) distinct = distinct && !(pts[i] == pts[j]);
    }
    if (distinct) return cfg;
  }
}

}  // namespace tnconf
