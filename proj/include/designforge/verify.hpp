#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "designforge/construct.hpp"
#include "designforge/exact_moments.hpp"

namespace designforge {

enum class VerifyMethod { kMonomial, kGegenbauer, kBoth, kAuto };

std::string to_string(VerifyMethod method);
VerifyMethod parse_verify_method(const std::string& name);

struct VerificationReport {
  std::string method;  // "monomial", "gegenbauer" or "both"
  int degree_checked = 0;
  double tolerance = 0.0;
  double max_abs_residual = 0.0;
  bool passed = false;
  std::optional<MultiIndex> worst_monomial;
  std::optional<int> worst_degree;
  // Gegenbauer only: (1/N^2) sum_{i,j} Q_k(<x_i, x_j>) for k = 0..t.
  std::vector<double> gegenbauer_sums;
  std::vector<VerificationReport> parts;  // "both": the two sub-reports
};

// max over |alpha| <= t of |mean(x^alpha) - exact sphere moment|.
VerificationReport verify_monomials(const Design& design, int t, double tol);

// max over k = 1..t of sqrt(|(1/N^2) sum_{i,j} Q_k(<x_i, x_j>)|), Q_k the
// Gegenbauer polynomial of the ambient sphere normalized by Q_k(1) = 1.
// Throws std::invalid_argument for ambient_dim 1.
VerificationReport verify_gegenbauer(const Design& design, int t, double tol);

// kAuto: monomials when ambient_dim <= 6, Gegenbauer when ambient_dim >= 2 and
// either ambient_dim > 6 or the design has at most kGegenbauerAutoLimit points.
inline constexpr std::size_t kGegenbauerAutoLimit = 2048;
VerificationReport verify(const Design& design, int t, double tol, VerifyMethod method = VerifyMethod::kAuto);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Mean of x^alpha over uniform samples of S^{dim-1} (normalized Gaussian
// vectors; sign flips for dim 1). Deterministic for a fixed seed.
MonteCarloEstimate mc_moment_oracle(int dim, const MultiIndex& alpha, std::size_t samples,
                                    std::uint64_t seed);

}  // namespace designforge
