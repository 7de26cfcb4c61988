#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnconf/divcurl.hpp"

namespace tnconf {

struct GaugeParams {
  RatMatrix S;
  RatMatrix T;
  Rat a;
};

struct GaugeResult {
  TNPrimeConfig cfg;
  RatVector c;
};

/// Rebases the X and Y blocks to S and T. With V = Q − T and O = S − P:
///   E_i ↦ E_i − C_iᵀV + ⟨C_i, V⟩ id + OᵀD_i
///   R   ↦ R − PᵀV + OᵀT + (⟨P, V⟩ + a) id
///   c_i ↦ c_i − ⟨X_i, V⟩ − a
/// Arms C_i, D_i, coefficients and witnesses are unchanged.
GaugeResult gauge_normalize(const TNPrimeConfig& cfg, const RatVector& c, const GaugeParams& gp);

/// S = T = 0 and the a that makes the new R trace free:
///   tr R' = tr R + (m − 1)⟨P, Q⟩ + m a = 0.
GaugeParams normalizing_gauge(const TNPrimeConfig& cfg);

bool is_normalized(const TNPrimeConfig& cfg);

struct GaugeCheck {
  RatMatrix sum_e;                      ///< Σ E_i
  std::vector<RatMatrix> combination;   ///< Σ_j t^i_j Z_j − (U + E_1 + … + E_{i−1})
  std::vector<RatVector> e_on_witness;  ///< E_i n_i
  bool all_zero() const;
};

/// Needs witnesses on cfg.
GaugeCheck gauge_identities(const TNPrimeConfig& cfg);

/// Costs c_i with Z_i = X_iᵀY_i − c_i id, or the first index where
/// X_iᵀY_i − Z_i is not a multiple of the identity.
struct CostDerivation {
  RatVector c;
  std::optional<std::size_t> offending;
};
CostDerivation derive_costs(const TNPrimeConfig& cfg);

struct RIdentity {
  RatMatrix residual;  ///< Σ_j λ_j X_jᵀY_j − Σ_i k_i(k_i − 1)λ_i C_iᵀD_i
  Rat trace_sum;       ///< Σ_j λ_j ⟨X_j, Y_j⟩
  bool all_zero() const { return residual.is_zero() && trace_sum == 0; }
};
/// Throws std::invalid_argument unless P = Q = 0.
RIdentity r_identity(const TNPrimeConfig& cfg);

struct ConsistencyReport {
  bool consistent = false;
  std::optional<std::size_t> offending;  ///< Z-block that is not X_iᵀY_i − c_i id
  std::string detail;
  RatVector c;
  RatVector nu;
  RatVector xi;
  RatMatrix r_formula;   ///< Σ_i k_i(k_i − 1)λ_i C_iᵀD_i
  RatMatrix r_residual;  ///< R − r_formula
  Rat lambda_c;          ///< Σ_j λ_j c_j
  Rat trace_r;
};
/// Needs P = Q = 0. When costs are given they must match the Z-blocks.
ConsistencyReport consistency_and_nu(const TNPrimeConfig& cfg, const std::optional<RatVector>& costs = std::nullopt);

/// Per i: (1/ξ_i)(R n_i + (μ − 1)Σ_{α<i} k_α(k_α − 1)λ_α C_αᵀD_α n_i) − ν_i n_i.
std::vector<RatVector> finaleq_check(const TNPrimeConfig& cfg, const RatVector& c);

/// {first index} ∪ {j : n_j outside span(n_0..n_{j−1})}, 0-based.
std::vector<std::size_t> independent_set(const std::vector<RatVector>& dirs);

enum class CertificateVerdict { infeasible_strict_system, identity_violation };

struct Certificate {
  CertificateVerdict verdict = CertificateVerdict::identity_violation;
  std::string detail;
  std::vector<std::size_t> A;
  RatVector xi;
  RatVector nu;
  RatVector c;  ///< costs after normalization
  std::vector<RatVector> basis;  ///< n_s for s in A, then the orthogonal completion
  RatMatrix representation;      ///< R in that basis
  Rat weighted_sum;              ///< Σ_{j∈A} ξ_j ν_j
  Rat trace_r;
  Rat trace_residual;            ///< weighted_sum − tr R
  bool triangular = false;       ///< block upper-triangular with diagonal ξ_s ν_s
  bool normalized_input = false; ///< input already had P = Q = 0 and tr R = 0

  bool ok() const { return verdict == CertificateVerdict::infeasible_strict_system; }
  bool all_nu_positive() const;
};

/// Normalizes the gauge if needed, checks the configuration and every
/// identity, then builds the triangular trace certificate. Any failure yields
/// an identity_violation verdict with a detail message.
Certificate certify(const TNPrimeConfig& cfg, const std::optional<RatVector>& costs = std::nullopt);

/// Builds (P, Q, R) = (0, 0, Σλ_j Z_j) and E_i from Z_i = X_iᵀY_i − c_i id
/// and the X-configuration, using Y_i = D_1 + … + k_i D_i.
TNPrimeConfig tnprime_from_costs(const TNConfig& xcfg, const std::vector<RatMatrix>& d, const RatVector& c,
                                 const std::vector<WaveConeWitness>& witnesses);

struct ConsistentInstance {
  TNPrimeConfig cfg;
  RatVector c;
};
/// Normalized T_N' whose Z-blocks are X_iᵀY_i − c_i id. D and c are a random
/// point of the exact solution space of the linear constraints.
ConsistentInstance random_consistent_tnprime(Rng& rng, std::size_t n, std::size_t m, std::size_t N);
/// Same, over a given nondegenerate X-configuration with P = 0.
ConsistentInstance random_consistent_tnprime(Rng& rng, const TNConfig& xcfg);

std::string verdict_name(CertificateVerdict v);

}  // namespace tnconf
