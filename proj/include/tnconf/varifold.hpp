#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "tnconf/polyconvex.hpp"

namespace tnconf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Raised when a projection has a singular upper-left m×m block.
class OutOfChartError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Orthogonal projection of rank m in R^{m+n}, split as
///   [P1 P3]
///   [P2 P4]
/// with P1 of size m×m.
class GrassmannPoint {
 public:
  /// Throws std::invalid_argument if p is not a symmetric idempotent of trace m.
  GrassmannPoint(Mat p, std::size_t m, double tol = 1e-10);

  /// Projection onto the column space of a full column rank basis.
  static GrassmannPoint from_basis(const Mat& basis);

  const Mat& matrix() const { return p_; }
  std::size_t m() const { return m_; }
  std::size_t n() const { return static_cast<std::size_t>(p_.rows()) - m_; }
  Mat P1() const { return p_.topLeftCorner(em(), em()); }
  Mat P2() const { return p_.bottomLeftCorner(en(), em()); }
  Mat P3() const { return p_.topRightCorner(em(), en()); }
  Mat P4() const { return p_.bottomRightCorner(en(), en()); }
  Mat perp() const { return Mat::Identity(p_.rows(), p_.cols()) - p_; }
  bool in_chart() const;

 private:
  Eigen::Index em() const { return static_cast<Eigen::Index>(m_); }
  Eigen::Index en() const { return static_cast<Eigen::Index>(n()); }

  Mat p_;
  std::size_t m_;
};

/// M(X) = [id_m; X].
Mat graph_basis(const Mat& x);
/// (id + XᵀX)⁻¹.
Mat chart_S(const Mat& x);
/// Projection onto the column space of M(X), built from a Householder QR of M(X).
GrassmannPoint chart_h(const Mat& x);
/// P2 P1⁻¹. Throws OutOfChartError when P1 is singular.
Mat chart_h_inverse(const GrassmannPoint& p);

/// (H2 − P2P1⁻¹H1)P1⁻¹ for any H, no tangency check.
Mat d_h_inverse_linear(const GrassmannPoint& p, const Mat& h);
/// Same, after checking H = P^⊥HP + PHP^⊥ and Hᵀ = H to 1e−8 relative.
Mat d_h_inverse(const GrassmannPoint& p, const Mat& h);
/// P^⊥LP + (P^⊥LP)ᵀ.
Mat tangent_from(const GrassmannPoint& p, const Mat& l);
/// Projection onto the column space of (id + tP^⊥LP)M(h⁻¹P); its velocity at t = 0 is tangent_from(p, l).
GrassmannPoint tangent_curve(const GrassmannPoint& p, const Mat& l, double t);
/// Central difference of h⁻¹ along tangent_curve.
Mat d_h_inverse_fd(const GrassmannPoint& p, const Mat& l, double step = 1e-5);

/// sqrt(1 + |X|² + Σ_Z det(X^Z)²).
double area_cb(const Mat& x);
/// |det R| for the QR factorization of M(X), i.e. sqrt(det(id + XᵀX)).
double area_det(const Mat& x);
/// (X + Σ_Z det(X^Z) cof(X^Z)ᵀ embedded) / 𝒜(X).
Mat d_area(const Mat& x);

/// An energy f on n×m matrices together with Ψ = (f/𝒜)∘h⁻¹ on the chart.
class IntegrandPair {
 public:
  explicit IntegrandPair(PolyconvexEnergy energy) : energy_(std::move(energy)) {}

  const PolyconvexEnergy& energy() const { return energy_; }
  std::size_t n() const { return energy_.rows(); }
  std::size_t m() const { return energy_.cols(); }

  double f(const Mat& x) const { return energy_.value(x); }
  Mat df(const Mat& x) const { return energy_.gradient(x); }
  double psi(const GrassmannPoint& p) const;
  /// ⟨dΨ(P), H⟩ via the chain rule through d_h_inverse.
  double d_psi(const GrassmannPoint& p, const Mat& h) const;
  /// Central difference of Ψ along tangent_curve(p, l).
  double d_psi_fd(const GrassmannPoint& p, const Mat& l, double step = 1e-5) const;

 private:
  PolyconvexEnergy energy_;
};

struct FieldsAB {
  Mat A;  ///< Df(X)
  Mat B;  ///< f(X) id_m − XᵀDf(X)
};
FieldsAB fields_AB(const PolyconvexEnergy& e, const Mat& x);

/// (1/𝒜)[B, BXᵀ; A, AXᵀ].
Mat v_field(const PolyconvexEnergy& e, const Mat& x);

/// ⟨B_Ψ(P), L⟩ = Ψ(P)⟨P, L⟩ + ⟨dΨ(P), P^⊥LP + (P^⊥LP)ᵀ⟩.
double b_psi_pairing(const IntegrandPair& pair, const GrassmannPoint& p, const Mat& l);
/// The matrix of the functional above, assembled on the elementary basis.
Mat b_psi(const IntegrandPair& pair, const GrassmannPoint& p);

struct GrowthFit {
  std::size_t samples = 0;
  double exponent_A = 0;
  double exponent_B = 0;
  double bound_A = 0;  ///< min(m, n) − 1
  double bound_B = 0;  ///< min(n, m − 1)
  double slack = 0.1;
  bool passed() const { return exponent_A <= bound_A + slack && exponent_B <= bound_B + slack; }
};

/// Least-squares slopes of log|A(X)|, log|B(X)| against log|X| for random
/// directions with |X| log-uniform in [lo, hi].
GrowthFit growth_probe(const PolyconvexEnergy& e, Rng& rng, std::size_t samples = 400, double lo = 1.0,
                       double hi = 1e3);

enum class UFamily { affine, polynomial, trigonometric };
std::string family_name(UFamily f);
UFamily parse_u_family(const std::string& name);

/// A smooth map u: [0,1]^m → R^n with its analytic derivative.
class GraphMap {
 public:
  /// Random member of the family; amplitude scales the non-affine part.
  static GraphMap random(UFamily family, std::size_t n, std::size_t m, Rng& rng, double amplitude = 0.3);

  UFamily family() const { return family_; }
  std::size_t n() const { return static_cast<std::size_t>(a_.size()); }
  std::size_t m() const { return static_cast<std::size_t>(g_.cols()); }
  Vec value(const Vec& x) const;
  Mat jacobian(const Vec& x) const;
  /// Componentwise Laplacian.
  Vec laplacian(const Vec& x) const;

 private:
  GraphMap(UFamily family, Vec a, Mat g) : family_(family), a_(std::move(a)), g_(std::move(g)) {}

  UFamily family_;
  Vec a_;
  Mat g_;
  std::vector<Mat> hess_;  ///< polynomial: u_k += ½ xᵀ H_k x
  Mat freq_;               ///< trigonometric: u_k += Σ_j amp_kj sin(2π ω_j·x + phase_kj)
  Mat amp_;
  Mat phase_;
};

/// Midpoint grid of [0,1]^m with resolution cells per side.
struct GraphSample {
  std::size_t resolution = 0;
  double h = 0;
  std::vector<Vec> x;
  std::vector<Vec> u;
  std::vector<Mat> du;

  std::size_t nodes() const { return x.size(); }
  double weight() const;  ///< h^m
};

GraphSample sample_graph(const GraphMap& u, std::size_t resolution);

/// g(z) = b(x)(w + Wz) with z ∈ R^k whose first m coordinates are x and
/// b(x) = Π_i (4(x_i − lo)(hi − x_i)/(hi − lo)²)^p on [lo, hi]^m, zero outside.
/// The peak value is 1; p = 2 makes b only C¹, which keeps an h² term in
/// the midpoint error.
class BumpField {
 public:
  /// Throws std::invalid_argument unless 0 < lo < hi < 1 and p >= 2.
  BumpField(std::size_t m, Vec w, Mat W, double lo = 0.25, double hi = 0.75, int power = 2);
  static BumpField random(std::size_t m, std::size_t k, std::size_t dim, Rng& rng, bool constant = false,
                          int power = 2);

  std::size_t dim() const { return static_cast<std::size_t>(w_.size()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(W_.cols()); }
  int power() const { return power_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double bump(const Vec& x) const;
  Vec bump_gradient(const Vec& x) const;
  Vec value(const Vec& z) const;
  /// dim × input_dim Jacobian.
  Mat jacobian(const Vec& z) const;

  /// Fields with the same bump add parameterwise.
  BumpField operator+(const BumpField& other) const;

 private:
  std::size_t m_;
  Vec w_;
  Mat W_;
  double lo_;
  double hi_;
  int power_;
};

struct FirstVariation {
  double graph_side = 0;     ///< Σ ⟨B(Du), D(g1∘v)⟩ + ⟨A(Du), D(g2∘v)⟩ times h^m
  double varifold_side = 0;  ///< Σ 𝒜(Du)⟨B_Ψ(h(Du)), Dg(v)⟩ times h^m
  double residual = 0;       ///< |graph_side − varifold_side|
  double max_pointwise = 0;  ///< largest node discrepancy of the two integrands
};

/// g acts on z = (x, y) ∈ R^{m+n} with values in R^{m+n}.
FirstVariation first_variation_quadrature(const IntegrandPair& pair, const GraphSample& sample, const BumpField& g);
/// Graph side only, for fine reference grids.
double first_variation_graph_side(const PolyconvexEnergy& e, const GraphSample& sample, const BumpField& g);

struct Stationarity {
  double outer = 0;  ///< Σ ⟨Df(Du), Dv⟩ h^m
  double inner = 0;  ///< Σ ⟨DuᵀDf(Du) − f(Du) id, DΦ⟩ h^m
};
/// v: R^m → R^n and phi: R^m → R^m.
Stationarity stationarity_residuals(const PolyconvexEnergy& e, const GraphSample& sample, const BumpField& v,
                                    const BumpField& phi);
/// −Σ ⟨Δu, v⟩ h^m, the integrated-by-parts outer variation of ½|X|².
double laplacian_pairing(const GraphMap& u, const GraphSample& sample, const BumpField& v);

struct Convergence {
  std::vector<std::size_t> resolutions;
  std::vector<double> values;
  double reference = 0;  ///< Richardson extrapolation of the two finest values
  double coarse_error = 0;
  double fine_error = 0;
  double ratio = 0;  ///< coarse_error / fine_error
};

/// First variation graph side on resolutions r, 2r and reference grids
/// ref, 2·ref; the error ratio between r and 2r should be near 4.
Convergence richardson_study(const PolyconvexEnergy& e, const GraphMap& u, const BumpField& g, std::size_t r,
                             std::size_t ref);

}  // namespace tnconf
