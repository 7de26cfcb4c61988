#include "tnconf/varifold.hpp"

#include <cmath>
#include <numbers>

namespace tnconf {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

double hs(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

Mat orthonormal_columns(const Mat& basis) {
  Eigen::HouseholderQR<Mat> qr(basis);
  return qr.householderQ() * Mat::Identity(basis.rows(), basis.cols());
}

// Everything b_psi needs at one point of the chart.
struct PsiContext {
  Mat P;
  Mat perp;
  Mat X;
  Mat P1inv;
  Mat W;  // Df/𝒜 − f D𝒜/𝒜²
  double psi = 0;
  Eigen::Index m = 0;
  Eigen::Index n = 0;

  PsiContext(const IntegrandPair& pair, const GrassmannPoint& p)
      : P(p.matrix()), perp(p.perp()), X(chart_h_inverse(p)), m(idx(p.m())), n(idx(p.n())) {
    P1inv = p.P1().partialPivLu().inverse();
    const double a = area_cb(X);
    const double f = pair.f(X);
    psi = f / a;
    W = pair.df(X) / a - (f / (a * a)) * d_area(X);
  }

  double pairing(const Mat& l) const {
    Mat k = perp * l * P;
    Mat h = k + k.transpose();
    Mat dx = (h.bottomLeftCorner(n, m) - X * h.topLeftCorner(m, m)) * P1inv;
    return psi * hs(P, l) + hs(W, dx);
  }
};

}  // namespace

GrassmannPoint::GrassmannPoint(Mat p, std::size_t m, double tol) : p_(std::move(p)), m_(m) {
  if (p_.rows() != p_.cols()) throw ShapeError("GrassmannPoint: projection must be square");
  if (m_ == 0 || idx(m_) > p_.rows()) throw ShapeError("GrassmannPoint: rank out of range");
  if ((p_ - p_.transpose()).norm() > tol) throw std::invalid_argument("GrassmannPoint: matrix is not symmetric");
  if ((p_ * p_ - p_).norm() > tol) throw std::invalid_argument("GrassmannPoint: matrix is not idempotent");
  if (std::abs(p_.trace() - static_cast<double>(m_)) > tol) {
    throw std::invalid_argument("GrassmannPoint: trace differs from " + std::to_string(m_));
  }
}

GrassmannPoint GrassmannPoint::from_basis(const Mat& basis) {
  Mat q = orthonormal_columns(basis);
  Mat p = q * q.transpose();
  p = 0.5 * (p + p.transpose());
  return GrassmannPoint(std::move(p), static_cast<std::size_t>(basis.cols()));
}

bool GrassmannPoint::in_chart() const {
  Eigen::JacobiSVD<Mat> svd(P1());
  return svd.singularValues().minCoeff() > 1e-12;
}

Mat graph_basis(const Mat& x) {
  Mat out(x.cols() + x.rows(), x.cols());
  out << Mat::Identity(x.cols(), x.cols()), x;
  return out;
}

Mat chart_S(const Mat& x) {
  Mat s = Mat::Identity(x.cols(), x.cols()) + x.transpose() * x;
  return s.ldlt().solve(Mat::Identity(x.cols(), x.cols()));
}

GrassmannPoint chart_h(const Mat& x) { return GrassmannPoint::from_basis(graph_basis(x)); }

Mat chart_h_inverse(const GrassmannPoint& p) {
  if (!p.in_chart()) throw OutOfChartError("projection is not a graph over the first m coordinates");
  // P1 is symmetric, so P2 P1⁻¹ = (P1⁻¹ P2ᵀ)ᵀ.
  return p.P1().partialPivLu().solve(p.P2().transpose()).transpose();
}

Mat d_h_inverse_linear(const GrassmannPoint& p, const Mat& h) {
  if (h.rows() != p.matrix().rows() || h.cols() != p.matrix().cols()) throw ShapeError("d_h_inverse: shape mismatch");
  if (!p.in_chart()) throw OutOfChartError("projection is not a graph over the first m coordinates");
  const auto m = idx(p.m()), n = idx(p.n());
  Mat p1inv = p.P1().partialPivLu().inverse();
  Mat x = p.P2() * p1inv;
  return (h.bottomLeftCorner(n, m) - x * h.topLeftCorner(m, m)) * p1inv;
}

Mat d_h_inverse(const GrassmannPoint& p, const Mat& h) {
  if (h.rows() != p.matrix().rows() || h.cols() != p.matrix().cols()) throw ShapeError("d_h_inverse: shape mismatch");
  const Mat& pm = p.matrix();
  Mat perp = p.perp();
  const double scale = 1.0 + h.norm();
  if ((h - h.transpose()).norm() > 1e-8 * scale) throw std::invalid_argument("d_h_inverse: H is not symmetric");
  if ((h - perp * h * pm - pm * h * perp).norm() > 1e-8 * scale) {
    throw std::invalid_argument("d_h_inverse: H is not tangent at P");
  }
  return d_h_inverse_linear(p, h);
}

Mat tangent_from(const GrassmannPoint& p, const Mat& l) {
  Mat k = p.perp() * l * p.matrix();
  return k + k.transpose();
}

GrassmannPoint tangent_curve(const GrassmannPoint& p, const Mat& l, double t) {
  Mat k = p.perp() * l * p.matrix();
  Mat basis = graph_basis(chart_h_inverse(p));
  return GrassmannPoint::from_basis((Mat::Identity(k.rows(), k.cols()) + t * k) * basis);
}

Mat d_h_inverse_fd(const GrassmannPoint& p, const Mat& l, double step) {
  Mat plus = chart_h_inverse(tangent_curve(p, l, step));
  Mat minus = chart_h_inverse(tangent_curve(p, l, -step));
  return (plus - minus) / (2.0 * step);
}

double area_cb(const Mat& x) {
  double s = 1.0;
  for (double v : phi(x)) s += v * v;
  return std::sqrt(s);
}

double area_det(const Mat& x) {
  Eigen::HouseholderQR<Mat> qr(graph_basis(x));
  return qr.matrixQR().diagonal().cwiseAbs().prod();
}

Mat d_area(const Mat& x) {
  Mat num = x;
  for (const auto& z : all_minor_indices(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()))) {
    num += det(minor_extract(x, z)) * embed_cof_bar(x, z);
  }
  return num / area_cb(x);
}

double IntegrandPair::psi(const GrassmannPoint& p) const {
  Mat x = chart_h_inverse(p);
  return f(x) / area_cb(x);
}

double IntegrandPair::d_psi(const GrassmannPoint& p, const Mat& h) const {
  Mat x = chart_h_inverse(p);
  const double a = area_cb(x);
  const double fx = f(x);
  Mat w = df(x) / a - (fx / (a * a)) * d_area(x);
  return hs(w, d_h_inverse(p, h));
}

double IntegrandPair::d_psi_fd(const GrassmannPoint& p, const Mat& l, double step) const {
  return (psi(tangent_curve(p, l, step)) - psi(tangent_curve(p, l, -step))) / (2.0 * step);
}

FieldsAB fields_AB(const PolyconvexEnergy& e, const Mat& x) {
  FieldsAB out;
  out.A = e.gradient(x);
  out.B = e.value(x) * Mat::Identity(x.cols(), x.cols()) - x.transpose() * out.A;
  return out;
}

Mat v_field(const PolyconvexEnergy& e, const Mat& x) {
  auto [a, b] = fields_AB(e, x);
  const auto m = x.cols(), n = x.rows();
  Mat v(m + n, m + n);
  v.topLeftCorner(m, m) = b;
  v.topRightCorner(m, n) = b * x.transpose();
  v.bottomLeftCorner(n, m) = a;
  v.bottomRightCorner(n, n) = a * x.transpose();
  return v / area_cb(x);
}

double b_psi_pairing(const IntegrandPair& pair, const GrassmannPoint& p, const Mat& l) {
  if (l.rows() != p.matrix().rows() || l.cols() != p.matrix().cols()) throw ShapeError("b_psi: shape mismatch");
  return PsiContext(pair, p).pairing(l);
}

Mat b_psi(const IntegrandPair& pair, const GrassmannPoint& p) {
  if (p.m() != pair.m() || p.n() != pair.n()) throw ShapeError("b_psi: energy and projection shapes differ");
  PsiContext ctx(pair, p);
  const auto d = p.matrix().rows();
  Mat out(d, d);
  Mat l = Mat::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      l(a, b) = 1.0;
      out(a, b) = ctx.pairing(l);
      l(a, b) = 0.0;
    }
  }
  return out;
}

GrowthFit growth_probe(const PolyconvexEnergy& e, Rng& rng, std::size_t samples, double lo, double hi) {
  if (samples < 2 || !(lo > 0) || !(hi > lo)) throw std::invalid_argument("growth_probe: bad sampling range");
  const auto n = idx(e.rows()), m = idx(e.cols());
  std::vector<double> lx, la, lb;
  for (std::size_t s = 0; s < samples; ++s) {
    const double r = std::exp(rng.uniform(std::log(lo), std::log(hi)));
    Mat g(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = rng.normal();
    }
    Mat x = (r / g.norm()) * g;
    auto [a, b] = fields_AB(e, x);
    lx.push_back(std::log(x.norm()));
    la.push_back(std::log(a.norm()));
    lb.push_back(std::log(b.norm()));
  }
  auto slope = [&](const std::vector<double>& y) {
    const double k = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += y[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * y[i];
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
  };
  GrowthFit fit;
  fit.samples = samples;
  fit.exponent_A = slope(la);
  fit.exponent_B = slope(lb);
  fit.bound_A = static_cast<double>(std::min(e.cols(), e.rows())) - 1.0;
  fit.bound_B = static_cast<double>(std::min(e.rows(), e.cols() - 1));
  return fit;
}

std::string family_name(UFamily f) {
  switch (f) {
    case UFamily::affine:
      return "affine";
    case UFamily::polynomial:
      return "polynomial";
    case UFamily::trigonometric:
      return "trigonometric";
  }
  return "unknown";
}

UFamily parse_u_family(const std::string& name) {
  if (name == "affine") return UFamily::affine;
  if (name == "polynomial") return UFamily::polynomial;
  if (name == "trigonometric") return UFamily::trigonometric;
  throw std::invalid_argument("unknown u-family '" + name + "'");
}

GraphMap GraphMap::random(UFamily family, std::size_t n, std::size_t m, Rng& rng, double amplitude) {
  Vec a(idx(n));
  Mat g(idx(n), idx(m));
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = 0.5 * rng.normal();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = 0.5 * rng.normal();
  }
  GraphMap u(family, a, g);
  if (family == UFamily::polynomial) {
    for (std::size_t k = 0; k < n; ++k) {
      Mat h(idx(m), idx(m));
      for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) h(i, j) = h(j, i) = amplitude * rng.normal();
      }
      u.hess_.push_back(h);
    }
  } else if (family == UFamily::trigonometric) {
    constexpr Eigen::Index terms = 2;
    u.freq_.resize(terms, idx(m));
    u.amp_.resize(idx(n), terms);
    u.phase_.resize(idx(n), terms);
    for (Eigen::Index t = 0; t < terms; ++t) {
      for (Eigen::Index j = 0; j < idx(m); ++j) u.freq_(t, j) = rng.uniform(-1.5, 1.5);
    }
    for (Eigen::Index k = 0; k < idx(n); ++k) {
      for (Eigen::Index t = 0; t < terms; ++t) {
        u.amp_(k, t) = amplitude * rng.normal() / (2.0 * std::numbers::pi);
        u.phase_(k, t) = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
    }
  }
  return u;
}

Vec GraphMap::value(const Vec& x) const {
  Vec out = a_ + g_ * x;
  if (family_ == UFamily::polynomial) {
    for (Eigen::Index k = 0; k < out.size(); ++k) out(k) += 0.5 * x.dot(hess_[static_cast<std::size_t>(k)] * x);
  } else if (family_ == UFamily::trigonometric) {
    Vec arg = 2.0 * std::numbers::pi * (freq_ * x);
    for (Eigen::Index k = 0; k < out.size(); ++k) {
      for (Eigen::Index t = 0; t < arg.size(); ++t) out(k) += amp_(k, t) * std::sin(arg(t) + phase_(k, t));
    }
  }
  return out;
}

Mat GraphMap::jacobian(const Vec& x) const {
  Mat out = g_;
  if (family_ == UFamily::polynomial) {
    for (Eigen::Index k = 0; k < out.rows(); ++k) out.row(k) += (hess_[static_cast<std::size_t>(k)] * x).transpose();
  } else if (family_ == UFamily::trigonometric) {
    const double tau = 2.0 * std::numbers::pi;
    Vec arg = tau * (freq_ * x);
    for (Eigen::Index k = 0; k < out.rows(); ++k) {
      for (Eigen::Index t = 0; t < arg.size(); ++t) {
        out.row(k) += amp_(k, t) * tau * std::cos(arg(t) + phase_(k, t)) * freq_.row(t);
      }
    }
  }
  return out;
}

Vec GraphMap::laplacian(const Vec& x) const {
  Vec out = Vec::Zero(a_.size());
  if (family_ == UFamily::polynomial) {
    for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = hess_[static_cast<std::size_t>(k)].trace();
  } else if (family_ == UFamily::trigonometric) {
    const double tau = 2.0 * std::numbers::pi;
    Vec arg = tau * (freq_ * x);
    for (Eigen::Index k = 0; k < out.size(); ++k) {
      for (Eigen::Index t = 0; t < arg.size(); ++t) {
        out(k) -= amp_(k, t) * tau * tau * freq_.row(t).squaredNorm() * std::sin(arg(t) + phase_(k, t));
      }
    }
  }
  return out;
}

double GraphSample::weight() const {
  if (x.empty()) return 0.0;
  return std::pow(h, static_cast<double>(x.front().size()));
}

GraphSample sample_graph(const GraphMap& u, std::size_t resolution) {
  if (resolution == 0) throw std::invalid_argument("sample_graph: resolution must be positive");
  const std::size_t m = u.m();
  GraphSample s;
  s.resolution = resolution;
  s.h = 1.0 / static_cast<double>(resolution);
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= resolution;
  s.x.reserve(total);
  s.u.reserve(total);
  s.du.reserve(total);
  std::vector<std::size_t> cell(m, 0);
  for (std::size_t node = 0; node < total; ++node) {
    Vec x(idx(m));
    for (std::size_t i = 0; i < m; ++i) x(idx(i)) = (static_cast<double>(cell[i]) + 0.5) * s.h;
    s.u.push_back(u.value(x));
    s.du.push_back(u.jacobian(x));
    s.x.push_back(std::move(x));
    for (std::size_t i = 0; i < m && ++cell[i] == resolution; ++i) cell[i] = 0;
  }
  return s;
}

BumpField::BumpField(std::size_t m, Vec w, Mat W, double lo, double hi, int power)
    : m_(m), w_(std::move(w)), W_(std::move(W)), lo_(lo), hi_(hi), power_(power) {
  if (W_.rows() != w_.size()) throw ShapeError("BumpField: w and W disagree");
  if (m_ == 0 || idx(m_) > W_.cols()) throw ShapeError("BumpField: input must contain the base point");
  if (!(lo_ > 0.0 && lo_ < hi_ && hi_ < 1.0)) {
    throw std::invalid_argument("BumpField: support must lie strictly inside the unit cube");
  }
  if (power_ < 2) throw std::invalid_argument("BumpField: power below 2 is not C^1");
}

BumpField BumpField::random(std::size_t m, std::size_t k, std::size_t dim, Rng& rng, bool constant, int power) {
  Vec w(idx(dim));
  Mat W = Mat::Zero(idx(dim), idx(k));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.normal();
  if (!constant) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = rng.normal();
    }
  }
  return BumpField(m, w, W, 0.25, 0.75, power);
}

double BumpField::bump(const Vec& x) const {
  const double peak = 0.25 * (hi_ - lo_) * (hi_ - lo_);
  double b = 1.0;
  for (std::size_t i = 0; i < m_; ++i) {
    const double t = x(idx(i));
    if (t <= lo_ || t >= hi_) return 0.0;
    b *= std::pow((t - lo_) * (hi_ - t) / peak, power_);
  }
  return b;
}

Vec BumpField::bump_gradient(const Vec& x) const {
  const double peak = 0.25 * (hi_ - lo_) * (hi_ - lo_);
  Vec g = Vec::Zero(idx(m_));
  std::vector<double> phi(m_), dphi(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    const double t = x(idx(i));
    if (t <= lo_ || t >= hi_) return g;
    const double q = (t - lo_) * (hi_ - t) / peak;
    phi[i] = std::pow(q, power_);
    dphi[i] = power_ * std::pow(q, power_ - 1) * (lo_ + hi_ - 2.0 * t) / peak;
  }
  for (std::size_t i = 0; i < m_; ++i) {
    double v = dphi[i];
    for (std::size_t j = 0; j < m_; ++j) {
      if (j != i) v *= phi[j];
    }
    g(idx(i)) = v;
  }
  return g;
}

Vec BumpField::value(const Vec& z) const {
  if (z.size() != W_.cols()) throw ShapeError("BumpField: input dimension mismatch");
  return bump(z.head(idx(m_))) * (w_ + W_ * z);
}

Mat BumpField::jacobian(const Vec& z) const {
  if (z.size() != W_.cols()) throw ShapeError("BumpField: input dimension mismatch");
  Vec x = z.head(idx(m_));
  Mat j = bump(x) * W_;
  j.leftCols(idx(m_)) += (w_ + W_ * z) * bump_gradient(x).transpose();
  return j;
}

BumpField BumpField::operator+(const BumpField& other) const {
  if (m_ != other.m_ || lo_ != other.lo_ || hi_ != other.hi_ || power_ != other.power_ ||
      W_.rows() != other.W_.rows() || W_.cols() != other.W_.cols()) {
    throw std::invalid_argument("BumpField: sum needs matching bumps and shapes");
  }
  return BumpField(m_, w_ + other.w_, W_ + other.W_, lo_, hi_, power_);
}

namespace {

void check_field(const BumpField& g, std::size_t in, std::size_t out, const char* what) {
  if (g.input_dim() != in || g.dim() != out) {
    throw ShapeError(std::string(what) + ": expected a field R^" + std::to_string(in) + " -> R^" + std::to_string(out));
  }
}

Vec lift(const Vec& x, const Vec& u) {
  Vec z(x.size() + u.size());
  z << x, u;
  return z;
}

// D(g∘v) split into its first m rows and last n rows.
struct ComposedJacobian {
  Mat full;  // Dg(v)
  Mat top;
  Mat bottom;
};

ComposedJacobian compose(const BumpField& g, const Vec& x, const Vec& u, const Mat& du) {
  const auto m = x.size(), n = u.size();
  ComposedJacobian c;
  c.full = g.jacobian(lift(x, u));
  Mat dgv = c.full * graph_basis(du);
  c.top = dgv.topRows(m);
  c.bottom = dgv.bottomRows(n);
  return c;
}

}  // namespace

FirstVariation first_variation_quadrature(const IntegrandPair& pair, const GraphSample& sample, const BumpField& g) {
  const std::size_t m = pair.m(), n = pair.n();
  check_field(g, m + n, m + n, "first_variation_quadrature");
  FirstVariation out;
  for (std::size_t k = 0; k < sample.nodes(); ++k) {
    if (g.bump(sample.x[k]) == 0.0 && g.bump_gradient(sample.x[k]).isZero(0.0)) continue;
    const Mat& X = sample.du[k];
    auto c = compose(g, sample.x[k], sample.u[k], X);
    auto [a, b] = fields_AB(pair.energy(), X);
    const double graph = hs(b, c.top) + hs(a, c.bottom);
    const double vari = area_cb(X) * hs(b_psi(pair, chart_h(X)), c.full);
    out.graph_side += graph;
    out.varifold_side += vari;
    out.max_pointwise = std::max(out.max_pointwise, std::abs(graph - vari));
  }
  out.graph_side *= sample.weight();
  out.varifold_side *= sample.weight();
  out.residual = std::abs(out.graph_side - out.varifold_side);
  return out;
}

double first_variation_graph_side(const PolyconvexEnergy& e, const GraphSample& sample, const BumpField& g) {
  const std::size_t m = e.cols(), n = e.rows();
  check_field(g, m + n, m + n, "first_variation_graph_side");
  double total = 0.0;
  for (std::size_t k = 0; k < sample.nodes(); ++k) {
    if (g.bump(sample.x[k]) == 0.0 && g.bump_gradient(sample.x[k]).isZero(0.0)) continue;
    auto c = compose(g, sample.x[k], sample.u[k], sample.du[k]);
    auto [a, b] = fields_AB(e, sample.du[k]);
    total += hs(b, c.top) + hs(a, c.bottom);
  }
  return total * sample.weight();
}

Stationarity stationarity_residuals(const PolyconvexEnergy& e, const GraphSample& sample, const BumpField& v,
                                    const BumpField& phi) {
  const std::size_t m = e.cols(), n = e.rows();
  check_field(v, m, n, "stationarity_residuals (outer field)");
  check_field(phi, m, m, "stationarity_residuals (inner field)");
  Stationarity out;
  for (std::size_t k = 0; k < sample.nodes(); ++k) {
    const Mat& X = sample.du[k];
    const Vec& x = sample.x[k];
    Mat df = e.gradient(X);
    out.outer += hs(df, v.jacobian(x));
    Mat t = X.transpose() * df - e.value(X) * Mat::Identity(idx(m), idx(m));
    out.inner += hs(t, phi.jacobian(x));
  }
  out.outer *= sample.weight();
  out.inner *= sample.weight();
  return out;
}

double laplacian_pairing(const GraphMap& u, const GraphSample& sample, const BumpField& v) {
  check_field(v, u.m(), u.n(), "laplacian_pairing");
  double total = 0.0;
  for (std::size_t k = 0; k < sample.nodes(); ++k) total -= u.laplacian(sample.x[k]).dot(v.value(sample.x[k]));
  return total * sample.weight();
}

Convergence richardson_study(const PolyconvexEnergy& e, const GraphMap& u, const BumpField& g, std::size_t r,
                             std::size_t ref) {
  if (ref <= 2 * r) throw std::invalid_argument("richardson_study: reference grid must be finer than 2r");
  Convergence c;
  c.resolutions = {r, 2 * r, ref, 2 * ref};
  for (std::size_t res : c.resolutions) c.values.push_back(first_variation_graph_side(e, sample_graph(u, res), g));
  c.reference = (4.0 * c.values[3] - c.values[2]) / 3.0;
  c.coarse_error = std::abs(c.values[0] - c.reference);
  c.fine_error = std::abs(c.values[1] - c.reference);
  c.ratio = c.fine_error > 0.0 ? c.coarse_error / c.fine_error : 0.0;
  return c;
}

}  // namespace tnconf
