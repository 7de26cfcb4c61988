#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnconf/tn.hpp"

namespace tnconf {

/// (X, Y, Z) with X, Y of shape n×m and Z of shape m×m.
struct StackedMatrix {
  RatMatrix X;
  RatMatrix Y;
  RatMatrix Z;

  static StackedMatrix zero(std::size_t n, std::size_t m);
  std::size_t n() const { return X.rows(); }
  std::size_t m() const { return X.cols(); }
  /// Throws ShapeError on inconsistent blocks.
  void check_shape() const;
  bool is_zero() const { return X.is_zero() && Y.is_zero() && Z.is_zero(); }
  bool same_shape(const StackedMatrix& o) const { return X.same_shape(o.X) && Z.same_shape(o.Z); }

  StackedMatrix& operator+=(const StackedMatrix& o);
  StackedMatrix& operator-=(const StackedMatrix& o);
  friend bool operator==(const StackedMatrix& a, const StackedMatrix& b) = default;
};

StackedMatrix operator+(StackedMatrix a, const StackedMatrix& b);
StackedMatrix operator-(StackedMatrix a, const StackedMatrix& b);
StackedMatrix operator*(const Rat& s, const StackedMatrix& a);

/// X = u ⊗ ξ, Yξ = 0, Zξ = 0. ξ is an unnormalized rational direction.
struct WaveConeWitness {
  RatVector xi;
  RatVector u;

  friend bool operator==(const WaveConeWitness& a, const WaveConeWitness& b) = default;
};

/// True when ξ ≠ 0 and the three defining conditions hold exactly.
bool witness_holds(const StackedMatrix& w, const WaveConeWitness& witness);

struct WaveConeResult {
  std::optional<WaveConeWitness> witness;
  std::string reason;  ///< why no witness exists, or how it was found
};

WaveConeResult wave_cone_membership(const StackedMatrix& w);

struct TNPrimeConfig {
  StackedMatrix base;  ///< (P, Q, R)
  std::vector<StackedMatrix> arms;  ///< (C_i, D_i, E_i)
  RatVector k;
  std::vector<WaveConeWitness> witnesses;  ///< (n_i, u_i); may be empty

  std::size_t N() const { return arms.size(); }
  std::size_t n() const { return base.n(); }
  std::size_t m() const { return base.m(); }
  void check_shape() const;
  bool nondegenerate() const;
  /// The X-block data (P, C_i, k_i).
  TNConfig x_config() const;
};

/// A_i = base + arm_1 + … + arm_{i−1} + k_i arm_i.
std::vector<StackedMatrix> stacked_points(const TNPrimeConfig& cfg);

/// Zero Y and Z blocks over a T_N configuration, with witnesses taken from
/// the rank-one arms (ξ = e_1, u = 0 for a zero arm).
TNPrimeConfig lift_tn(const TNConfig& cfg);

struct TNPrimeVerdict {
  std::vector<StackedMatrix> relation_residuals;
  StackedMatrix closing_residual;  ///< (Σ C_i, Σ D_i, Σ E_i)
  std::vector<bool> arm_in_cone;
  std::vector<std::string> cone_reason;
  std::vector<bool> witness_valid;  ///< empty when no witnesses were supplied
  std::vector<bool> k_above_one;
  bool stacked_distinct = false;
  bool x_blocks_distinct = false;  ///< reported, not required
  bool nondegenerate = false;

  bool relations_ok() const;
  bool closing_x_ok() const { return closing_residual.X.is_zero(); }
  bool closing_y_ok() const { return closing_residual.Y.is_zero(); }
  bool closing_z_ok() const { return closing_residual.Z.is_zero(); }
  bool cone_ok() const;
  bool k_ok() const;
  bool passed() const;
  std::optional<std::size_t> first_failed_relation() const;
  std::optional<std::size_t> first_cone_failure() const;
};

/// Throws ShapeError when points and configuration disagree in size.
TNPrimeVerdict verify_tnprime(const std::vector<StackedMatrix>& points, const TNPrimeConfig& cfg);

struct StructuralVerdict {
  std::optional<bool> x_blocks_induce_tn;  ///< empty when the X-blocks repeat
  std::vector<bool> arm_factorizes;  ///< C_i = u_i ⊗ n_i, D_i n_i = 0, E_i n_i = 0
  RatVector orthogonality;  ///< ⟨C_i, D_i⟩
  bool passed() const;
};

StructuralVerdict structural_checks(const TNPrimeConfig& cfg);

/// Random nondegenerate T_N' configuration with explicit witnesses and
/// pairwise distinct stacked points.
TNPrimeConfig random_tnprime(Rng& rng, std::size_t n, std::size_t m, std::size_t N);

/// G(I − n nᵀ/|n|²), the part of G that annihilates n.
RatMatrix annihilate(const RatMatrix& g, const RatVector& n);

}  // namespace tnconf
