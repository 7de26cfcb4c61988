#include "tnconf/polyconvex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tnconf {

std::size_t phi_size(std::size_t n, std::size_t m) { return n * m + all_minor_indices(n, m).size(); }

RatVector phi(const RatMatrix& x) {
  RatVector out(x.entries().begin(), x.entries().end());
  for (const auto& z : all_minor_indices(x.rows(), x.cols())) out.push_back(det(minor_extract(x, z)));
  return out;
}

Eigen::MatrixXd minor_extract(const Eigen::MatrixXd& m, const MultiIndex& z) {
  validate(z, static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  const auto r = static_cast<Eigen::Index>(z.order());
  Eigen::MatrixXd sub(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) sub(a, b) = m(static_cast<Eigen::Index>(z.rows[a]), static_cast<Eigen::Index>(z.cols[b]));
  }
  return sub;
}

namespace {

// cof(A)_{ij} = (-1)^{i+j} det(A without row j and column i)
Eigen::MatrixXd cof(const Eigen::MatrixXd& a) {
  const Eigen::Index r = a.rows();
  Eigen::MatrixXd c(r, r);
  if (r == 1) {
    c(0, 0) = 1.0;
    return c;
  }
  Eigen::MatrixXd sub(r - 1, r - 1);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index p = 0, pp = 0; p < r; ++p) {
        if (p == j) continue;
        for (Eigen::Index q = 0, qq = 0; q < r; ++q) {
          if (q == i) continue;
          sub(pp, qq++) = a(p, q);
        }
        ++pp;
      }
      double d = det(sub);
      c(i, j) = ((i + j) % 2 == 0) ? d : -d;
    }
  }
  return c;
}

class QuadraticG : public MinorFunction {
 public:
  explicit QuadraticG(std::size_t entries) : entries_(entries) {}
  bool exact() const override { return true; }
  Rat value(const RatVector& p) const override {
    Rat s = 0;
    for (std::size_t k = 0; k < entries_; ++k) s += p[k] * p[k];
    return s / 2;
  }
  RatVector gradient(const RatVector& p) const override {
    RatVector g(p.size(), Rat(0));
    for (std::size_t k = 0; k < entries_; ++k) g[k] = p[k];
    return g;
  }
  double value(const RealVector& p) const override {
    double s = 0;
    for (std::size_t k = 0; k < entries_; ++k) s += p[k] * p[k];
    return s / 2;
  }
  RealVector gradient(const RealVector& p) const override {
    RealVector g(p.size(), 0.0);
    for (std::size_t k = 0; k < entries_; ++k) g[k] = p[k];
    return g;
  }

 private:
  std::size_t entries_;
};

// ε Σ_k p_k² over the entries plus Σ_Z α_Z p_Z² over the minors
class QuadMinorsG : public MinorFunction {
 public:
  QuadMinorsG(std::size_t entries, Rat epsilon, RatVector alpha)
      : entries_(entries), epsilon_(std::move(epsilon)), alpha_(std::move(alpha)) {}
  bool exact() const override { return true; }
  Rat value(const RatVector& p) const override {
    Rat s = 0;
    for (std::size_t k = 0; k < p.size(); ++k) s += weight(k) * p[k] * p[k];
    return s;
  }
  RatVector gradient(const RatVector& p) const override {
    RatVector g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) g[k] = 2 * weight(k) * p[k];
    return g;
  }
  double value(const RealVector& p) const override {
    double s = 0;
    for (std::size_t k = 0; k < p.size(); ++k) s += weight(k).get_d() * p[k] * p[k];
    return s;
  }
  RealVector gradient(const RealVector& p) const override {
    RealVector g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) g[k] = 2 * weight(k).get_d() * p[k];
    return g;
  }

 private:
  const Rat& weight(std::size_t k) const { return k < entries_ ? epsilon_ : alpha_[k - entries_]; }
  std::size_t entries_;
  Rat epsilon_;
  RatVector alpha_;
};

class AreaG : public MinorFunction {
 public:
  bool exact() const override { return false; }
  double value(const RealVector& p) const override {
    double s = 1.0;
    for (double x : p) s += x * x;
    return std::sqrt(s);
  }
  RealVector gradient(const RealVector& p) const override {
    double a = value(p);
    RealVector g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) g[k] = p[k] / a;
    return g;
  }
};

}  // namespace

double det(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ShapeError("det: non-square matrix");
  if (m.rows() == 0) return 1.0;
  return m.determinant();
}

RealVector phi(const Eigen::MatrixXd& x) {
  const auto n = static_cast<std::size_t>(x.rows()), m = static_cast<std::size_t>(x.cols());
  RealVector out;
  out.reserve(phi_size(n, m));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.push_back(x(i, j));
  }
  for (const auto& z : all_minor_indices(n, m)) out.push_back(det(minor_extract(x, z)));
  return out;
}

Eigen::MatrixXd embed_cof_bar(const Eigen::MatrixXd& m, const MultiIndex& z) {
  Eigen::MatrixXd c = cof(minor_extract(m, z)).transpose();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (std::size_t a = 0; a < z.order(); ++a) {
    for (std::size_t b = 0; b < z.order(); ++b) {
      out(static_cast<Eigen::Index>(z.rows[a]), static_cast<Eigen::Index>(z.cols[b])) =
          c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return out;
}

Eigen::MatrixXd to_real(const RatMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).get_d();
  }
  return out;
}

Rat MinorFunction::value(const RatVector&) const { throw std::domain_error("energy has no exact evaluation"); }

RatVector MinorFunction::gradient(const RatVector&) const {
  throw std::domain_error("energy has no exact evaluation");
}

Rat CustomMinorFunction::value(const RatVector& p) const {
  if (!rat_f_) return MinorFunction::value(p);
  return rat_f_(p);
}

RatVector CustomMinorFunction::gradient(const RatVector& p) const {
  if (!rat_g_) return MinorFunction::gradient(p);
  return rat_g_(p);
}

std::string family_name(EnergyFamily f) {
  switch (f) {
    case EnergyFamily::quadratic:
      return "quadratic";
    case EnergyFamily::quad_minors:
      return "quad_minors";
    case EnergyFamily::area:
      return "area";
    case EnergyFamily::custom:
      return "custom";
  }
  return "unknown";
}

PolyconvexEnergy PolyconvexEnergy::quadratic(std::size_t n, std::size_t m) {
  PolyconvexEnergy e(n, m, EnergyFamily::quadratic, std::make_shared<QuadraticG>(n * m));
  e.epsilon_ = Rat(1, 2);
  return e;
}

PolyconvexEnergy PolyconvexEnergy::quad_minors(std::size_t n, std::size_t m, const Rat& epsilon,
                                               const std::map<MultiIndex, Rat>& alpha) {
  if (!(epsilon > 0)) throw std::invalid_argument("quad_minors: epsilon must be positive");
  auto minors = all_minor_indices(n, m);
  RatVector weights(minors.size(), Rat(0));
  for (const auto& [z, a] : alpha) {
    if (a < 0) throw std::invalid_argument("quad_minors: alpha for " + z.key() + " is negative");
    auto it = std::find(minors.begin(), minors.end(), z);
    if (it == minors.end()) throw std::out_of_range("quad_minors: " + z.key() + " is not a minor of order >= 2");
    weights[static_cast<std::size_t>(it - minors.begin())] = a;
  }
  PolyconvexEnergy e(n, m, EnergyFamily::quad_minors, std::make_shared<QuadMinorsG>(n * m, epsilon, weights));
  e.epsilon_ = epsilon;
  e.alpha_ = alpha;
  return e;
}

PolyconvexEnergy PolyconvexEnergy::area(std::size_t n, std::size_t m) {
  return PolyconvexEnergy(n, m, EnergyFamily::area, std::make_shared<AreaG>());
}

PolyconvexEnergy PolyconvexEnergy::custom(std::size_t n, std::size_t m, std::shared_ptr<const MinorFunction> g) {
  if (!g) throw std::invalid_argument("custom energy needs a function");
  return PolyconvexEnergy(n, m, EnergyFamily::custom, std::move(g));
}

void PolyconvexEnergy::check(std::size_t rows, std::size_t cols) const {
  if (rows != n_ || cols != m_) {
    throw ShapeError("energy defined on " + std::to_string(n_) + "x" + std::to_string(m_) + " matrices, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Rat PolyconvexEnergy::value(const RatMatrix& x) const {
  check(x.rows(), x.cols());
  return g_->value(phi(x));
}

double PolyconvexEnergy::value(const Eigen::MatrixXd& x) const {
  check(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()));
  return g_->value(phi(x));
}

RatMatrix PolyconvexEnergy::gradient(const RatMatrix& x) const {
  check(x.rows(), x.cols());
  RatVector dg = g_->gradient(phi(x));
  RatMatrix out(n_, m_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) out(i, j) = dg[i * m_ + j];
  }
  std::size_t k = n_ * m_;
  for (const auto& z : all_minor_indices(n_, m_)) {
    if (dg[k] != 0) out += dg[k] * embed_cof_bar(x, z);
    ++k;
  }
  return out;
}

Eigen::MatrixXd PolyconvexEnergy::gradient(const Eigen::MatrixXd& x) const {
  check(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()));
  RealVector dg = g_->gradient(phi(x));
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = dg[static_cast<std::size_t>(i * x.cols() + j)];
  }
  std::size_t k = n_ * m_;
  for (const auto& z : all_minor_indices(n_, m_)) {
    if (dg[k] != 0.0) out += dg[k] * embed_cof_bar(x, z);
    ++k;
  }
  return out;
}

ConvexitySample sample_strict_convexity(const MinorFunction& g, std::size_t dim, Rng& rng, std::size_t samples,
                                        double radius) {
  ConvexitySample out;
  out.min_gap = std::numeric_limits<double>::infinity();
  RealVector a(dim), b(dim), mid(dim);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < dim; ++k) {
      a[k] = rng.uniform(-radius, radius);
      b[k] = rng.uniform(-radius, radius);
      mid[k] = 0.5 * (a[k] + b[k]);
    }
    double gap = 0.5 * (g.value(a) + g.value(b)) - g.value(mid);
    out.min_gap = std::min(out.min_gap, gap);
    if (!(gap > 0)) ++out.failures;
    ++out.samples;
  }
  return out;
}

PolyconvexEnergy checked_custom(std::size_t n, std::size_t m, std::shared_ptr<const MinorFunction> g, Rng& rng,
                                ConvexitySample* report) {
  if (!g) throw std::invalid_argument("custom energy needs a function");
  ConvexitySample s = sample_strict_convexity(*g, phi_size(n, m), rng);
  if (report) *report = s;
  if (!s.passed()) {
    throw std::invalid_argument("custom energy failed " + std::to_string(s.failures) + " of " +
                                std::to_string(s.samples) + " midpoint convexity samples");
  }
  return PolyconvexEnergy::custom(n, m, std::move(g));
}

InclusionPoint inclusion_point(const PolyconvexEnergy& e, const RatMatrix& x) {
  InclusionPoint p;
  p.X = x;
  p.Y = e.gradient(x);
  p.c = e.value(x);
  p.Z = x.transpose() * p.Y - p.c * RatMatrix::identity(x.cols());
  return p;
}

Rat strict_gap(const PolyconvexEnergy& e, const RatMatrix& xi, const RatMatrix& xj) {
  if (xi == xj) throw std::invalid_argument("strict_gap: points coincide");
  RatVector pi = phi(xi), pj = phi(xj);
  return e.g().value(pj) - e.g().value(pi) - dot(e.g().gradient(pi), pj - pi);
}

Rat finalemdim_residual(const PolyconvexEnergy& e, const TNPointSet& points, std::size_t i, std::size_t j) {
  if (i >= points.N() || j >= points.N()) throw std::out_of_range("finalemdim_residual: index out of range");
  if (i == j) throw std::invalid_argument("finalemdim_residual: needs i != j");
  const RatMatrix& xi = points.X[i];
  const RatMatrix& xj = points.X[j];
  RatVector dg = e.g().gradient(phi(xi));
  Rat out = e.value(xi) - e.value(xj) + dot(e.gradient(xi), xj - xi);
  std::size_t k = xi.rows() * xi.cols();
  for (const auto& z : all_minor_indices(xi.rows(), xi.cols())) {
    const Rat& d = dg[k++];
    if (d == 0) continue;
    RatMatrix mi = minor_extract(xi, z), mj = minor_extract(xj, z);
    out -= d * (dot(cof(mi).transpose(), mj - mi) - det(mj) + det(mi));
  }
  return out;
}

RatVector fzero_identity(const TNConfig& cfg, const MultiIndex& z) {
  TNPointSet pts = points_from_config(cfg);
  TVectors tv = t_vectors(defining_vector_from_ks(cfg.k));
  validate(z, cfg.rows(), cfg.cols());
  std::vector<RatMatrix> minors;
  RatVector dets;
  for (const auto& x : pts.X) {
    minors.push_back(minor_extract(x, z));
    dets.push_back(det(minors.back()));
  }
  RatVector out;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    RatMatrix cof_t = cof(minors[i]).transpose();
    Rat s = 0;
    for (std::size_t j = 0; j < cfg.N(); ++j) {
      s += tv.t[i][j] * (dot(cof_t, minors[j] - minors[i]) - dets[j] + dets[i]);
    }
    out.push_back(s);
  }
  return out;
}

RatVector nu_vector(const PolyconvexEnergy& e, const TNConfig& cfg) {
  TNPointSet pts = points_from_config(cfg);
  TVectors tv = t_vectors(defining_vector_from_ks(cfg.k));
  RatVector c;
  std::vector<RatMatrix> y;
  for (const auto& x : pts.X) {
    c.push_back(e.value(x));
    y.push_back(e.gradient(x));
  }
  RatVector nu;
  for (std::size_t i = 0; i < cfg.N(); ++i) {
    nu.push_back(-(c[i] - dot(tv.t[i], c) - cfg.k[i] * dot(y[i], cfg.C[i])));
  }
  return nu;
}

}  // namespace tnconf
