#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tnconf/tn.hpp"

namespace tnconf {

using RealVector = std::vector<double>;

/// Φ(X): the entries of X (row-major) followed by det(X^Z) for every Z of
/// order 2..min(n, m) in all_minor_indices order.
RatVector phi(const RatMatrix& x);
RealVector phi(const Eigen::MatrixXd& x);
std::size_t phi_size(std::size_t n, std::size_t m);

Eigen::MatrixXd minor_extract(const Eigen::MatrixXd& m, const MultiIndex& z);

/// cof(M^Z)ᵀ embedded into an n×m zero matrix, floating-point version.
Eigen::MatrixXd embed_cof_bar(const Eigen::MatrixXd& m, const MultiIndex& z);
double det(const Eigen::MatrixXd& m);

/// The convex function g acting on the minor vector.
class MinorFunction {
 public:
  virtual ~MinorFunction() = default;
  virtual bool exact() const = 0;
  /// Exact evaluation; throws std::domain_error when exact() is false.
  virtual Rat value(const RatVector& p) const;
  virtual RatVector gradient(const RatVector& p) const;
  virtual double value(const RealVector& p) const = 0;
  virtual RealVector gradient(const RealVector& p) const = 0;
};

enum class EnergyFamily { quadratic, quad_minors, area, custom };

std::string family_name(EnergyFamily f);

/// f(X) = g(Φ(X)) on n×m matrices.
class PolyconvexEnergy {
 public:
  /// ½|X|².
  static PolyconvexEnergy quadratic(std::size_t n, std::size_t m);
  /// ε|X|² + Σ_Z α_Z det(X^Z)². Needs ε > 0 and α_Z >= 0.
  static PolyconvexEnergy quad_minors(std::size_t n, std::size_t m, const Rat& epsilon,
                                      const std::map<MultiIndex, Rat>& alpha);
  /// 𝒜(X) = sqrt(1 + |Φ(X)|²); floating point only.
  static PolyconvexEnergy area(std::size_t n, std::size_t m);
  static PolyconvexEnergy custom(std::size_t n, std::size_t m, std::shared_ptr<const MinorFunction> g);

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return m_; }
  EnergyFamily family() const { return family_; }
  bool exact() const { return g_->exact(); }
  const MinorFunction& g() const { return *g_; }
  const Rat& epsilon() const { return epsilon_; }
  const std::map<MultiIndex, Rat>& alpha() const { return alpha_; }

  Rat value(const RatMatrix& x) const;
  double value(const Eigen::MatrixXd& x) const;
  /// D_X g + Σ_Z ∂_Z g · embed_cof_bar(X, Z).
  RatMatrix gradient(const RatMatrix& x) const;
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& x) const;

 private:
  PolyconvexEnergy(std::size_t n, std::size_t m, EnergyFamily family, std::shared_ptr<const MinorFunction> g)
      : n_(n), m_(m), family_(family), g_(std::move(g)) {}
  void check(std::size_t rows, std::size_t cols) const;

  std::size_t n_;
  std::size_t m_;
  EnergyFamily family_;
  std::shared_ptr<const MinorFunction> g_;
  Rat epsilon_;
  std::map<MultiIndex, Rat> alpha_;
};

inline RatMatrix grad_f(const PolyconvexEnergy& e, const RatMatrix& x) { return e.gradient(x); }
inline Eigen::MatrixXd grad_f(const PolyconvexEnergy& e, const Eigen::MatrixXd& x) { return e.gradient(x); }

/// Callable-backed g for user supplied energies. The exact pair is optional.
class CustomMinorFunction : public MinorFunction {
 public:
  using RealFn = std::function<double(const RealVector&)>;
  using RealGrad = std::function<RealVector(const RealVector&)>;
  using RatFn = std::function<Rat(const RatVector&)>;
  using RatGrad = std::function<RatVector(const RatVector&)>;

  CustomMinorFunction(RealFn f, RealGrad g) : real_f_(std::move(f)), real_g_(std::move(g)) {}
  CustomMinorFunction(RealFn f, RealGrad g, RatFn rf, RatGrad rg)
      : real_f_(std::move(f)), real_g_(std::move(g)), rat_f_(std::move(rf)), rat_g_(std::move(rg)) {}

  bool exact() const override { return static_cast<bool>(rat_f_) && static_cast<bool>(rat_g_); }
  Rat value(const RatVector& p) const override;
  RatVector gradient(const RatVector& p) const override;
  double value(const RealVector& p) const override { return real_f_(p); }
  RealVector gradient(const RealVector& p) const override { return real_g_(p); }

 private:
  RealFn real_f_;
  RealGrad real_g_;
  RatFn rat_f_;
  RatGrad rat_g_;
};

struct ConvexitySample {
  std::size_t samples = 0;
  std::size_t failures = 0;
  double min_gap = 0;  ///< smallest (g(a)+g(b))/2 − g((a+b)/2) observed
  bool passed() const { return failures == 0; }
};

/// Midpoint test of g on random pairs in the box [-radius, radius]^dim.
ConvexitySample sample_strict_convexity(const MinorFunction& g, std::size_t dim, Rng& rng,
                                        std::size_t samples = 10000, double radius = 3.0);

/// Throws std::invalid_argument when the midpoint sample finds a violation.
PolyconvexEnergy checked_custom(std::size_t n, std::size_t m, std::shared_ptr<const MinorFunction> g, Rng& rng,
                                ConvexitySample* report = nullptr);

/// (X, Y = Df(X), Z = XᵀY − f(X) id) together with c = f(X).
struct InclusionPoint {
  RatMatrix X;
  RatMatrix Y;
  RatMatrix Z;
  Rat c;
};

InclusionPoint inclusion_point(const PolyconvexEnergy& e, const RatMatrix& x);

/// g(Φ(X_j)) − g(Φ(X_i)) − ⟨Dg(Φ(X_i)), Φ(X_j) − Φ(X_i)⟩. Throws when X_i = X_j.
Rat strict_gap(const PolyconvexEnergy& e, const RatMatrix& xi, const RatMatrix& xj);

/// Left side of the pairwise inequality for points i ≠ j of a point set.
Rat finalemdim_residual(const PolyconvexEnergy& e, const TNPointSet& points, std::size_t i, std::size_t j);

/// For every i: Σ_j t^i_j (⟨cof(X_i^Z)ᵀ, X_j^Z − X_i^Z⟩ − det X_j^Z + det X_i^Z).
RatVector fzero_identity(const TNConfig& cfg, const MultiIndex& z);

/// ν_i = −(c_i − Σ_j t^i_j c_j − k_i ⟨Y_i, C_i⟩) with c_i = f(X_i), Y_i = Df(X_i).
RatVector nu_vector(const PolyconvexEnergy& e, const TNConfig& cfg);

Eigen::MatrixXd to_real(const RatMatrix& m);

}  // namespace tnconf
