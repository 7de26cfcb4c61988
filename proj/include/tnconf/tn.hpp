#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnconf/matrix.hpp"
#include "tnconf/random.hpp"

namespace tnconf {

/// Base point P, rank-one arms C_1..C_N and coefficients k_1..k_N.
/// Indices are 0-based throughout the C++ API.
struct TNConfig {
  RatMatrix P;
  std::vector<RatMatrix> C;
  RatVector k;

  std::size_t N() const { return C.size(); }
  std::size_t rows() const { return P.rows(); }
  std::size_t cols() const { return P.cols(); }
  /// Every arm has rank exactly one.
  bool nondegenerate() const;
  /// Throws ShapeError on inconsistent sizes.
  void check_shape() const;
};

struct DefiningVector {
  RatVector lambda;
  Rat mu;

  std::size_t N() const { return lambda.size(); }
  /// Throws std::invalid_argument unless λ > 0, μ > 1 and N >= 2.
  void check() const;
  /// λ rescaled to unit 1-norm; every formula below uses this form.
  DefiningVector normalized() const;
};

struct TNPointSet {
  std::vector<RatMatrix> X;

  std::size_t N() const { return X.size(); }
  bool pairwise_distinct() const;
};

/// X_i = P + C_1 + ... + C_{i-1} + k_i C_i.
TNPointSet points_from_config(const TNConfig& cfg);

struct VerifyOptions {
  bool strict = false;  ///< also require pairwise distinct points
};

struct TNVerdict {
  std::vector<bool> arm_rank_one;
  RatMatrix closing_residual;  ///< Σ C_i
  std::vector<RatMatrix> relation_residuals;  ///< X_i − (P + C_1 + … + k_i C_i)
  std::vector<bool> k_above_one;
  std::optional<bool> distinct;  ///< set only in strict mode
  bool nondegenerate = false;
  bool two_arm = false;  ///< N = 2, admitted but unusual in the literature

  bool rank_one_ok() const;
  bool closing_ok() const { return closing_residual.is_zero(); }
  bool relations_ok() const;
  bool k_ok() const;
  bool passed() const;
  std::optional<std::size_t> first_failed_relation() const;
};

/// Throws ShapeError when the point set and configuration disagree in size.
TNVerdict verify_tn(const TNPointSet& points, const TNConfig& cfg, VerifyOptions opts = {});

/// Throws std::invalid_argument when some k_i <= 1 or N < 2.
DefiningVector defining_vector_from_ks(const RatVector& k);
RatVector ks_from_defining_vector(const DefiningVector& dv);

struct TVectors {
  std::vector<RatVector> t;  ///< t[i][j] = t^i_j
  RatVector xi;              ///< 1-norm of the unnormalized t^i
};
TVectors t_vectors(const DefiningVector& dv);

/// Entry (i, j) is det(X_j^Z − X_i^Z), scaled by μ below the diagonal.
RatMatrix build_a_mu(const TNPointSet& points, const Rat& mu, const MultiIndex& z);

struct KernelCheck {
  bool passed = true;
  std::size_t minors_checked = 0;
  std::optional<MultiIndex> first_failure;
  RatVector failure_product;  ///< A^μ_Z λ at the first failure
};
KernelCheck kernel_check_all_minors(const TNPointSet& points, const DefiningVector& dv);

struct SynthesisResult {
  std::optional<TNConfig> config;
  KernelCheck kernel;
  bool degenerate = false;  ///< some synthesized arm is zero
  std::string diagnostic;
};
/// Recovers P and the arms from Σ_j t^i_j X_j = P + C_1 + … + C_{i−1}.
/// Refuses (empty config) when the all-minors kernel test fails.
SynthesisResult synthesize_tn(const TNPointSet& points, const DefiningVector& dv);

/// det(A+B) − det(A) − ⟨cof(A)ᵀ, B⟩. Throws std::invalid_argument when rank(B) >= 2.
Rat matrix_determinant_lemma(const RatMatrix& a, const RatMatrix& b);

struct MinorSumResidual {
  RatVector combination;  ///< Σ_j t^i_j S(X_j) − S(Σ_j t^i_j X_j)
  RatVector polygon;      ///< S(Σ_j t^i_j X_j) − S(P + C_1 + … + C_{i−1})
  RatVector kernel;       ///< Σ_j t^i_j det(X_j^Z − X_i^Z)
  bool all_zero() const;
};
MinorSumResidual minor_sum_identity(const TNConfig& cfg, const MultiIndex& z);

/// Σ_j t^i_j w_j − (v + v_1 + … + v_{i−1}) for every i. The k_i implied by dv
/// must satisfy w_i = v + v_1 + … + k_i v_i and Σ v_j = 0; otherwise
/// std::invalid_argument is thrown.
std::vector<RatMatrix> barycentric_combination(const RatMatrix& v, const std::vector<RatMatrix>& vs,
                                               const std::vector<RatMatrix>& ws, const DefiningVector& dv);

/// N nonzero rank-one n×m matrices summing to zero.
std::vector<RatMatrix> random_rank_one_loop(Rng& rng, std::size_t n, std::size_t m, std::size_t N);
/// Random nondegenerate configuration with pairwise distinct points and k_i in (1, 4].
TNConfig random_tn_config(Rng& rng, std::size_t n, std::size_t m, std::size_t N);

}  // namespace tnconf
