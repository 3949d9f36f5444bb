#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "designforge/exact_moments.hpp"

namespace designforge {

// Monic three-term recurrence pi_{k+1} = (x - diag[k]) pi_k - offdiag_sq[k] pi_{k-1}
// for the Jacobi weight normalized to a probability measure (offdiag_sq[0] = 1).
struct RecurrenceCoefficients {
  std::vector<long double> diag;
  std::vector<long double> offdiag_sq;
};

RecurrenceCoefficients jacobi_recurrence(const JacobiWeight& w, int count);

// Orthonormal polynomials P_0 = 1, P_1, ..., P_max for the normalized Jacobi
// measure, so that E[P_d] = 0 for d >= 1.
class OrthonormalJacobiBasis {
 public:
  OrthonormalJacobiBasis(const JacobiWeight& w, int max_degree);

  int max_degree() const { return max_degree_; }

  // values.size() and derivs.size() must be max_degree + 1; derivs may be empty.
  void evaluate(long double x, std::span<long double> values,
                std::span<long double> derivs = {}) const;

 private:
  int max_degree_;
  std::vector<long double> diag_;
  std::vector<long double> offdiag_;  // sqrt of offdiag_sq
};

// Gegenbauer polynomials for S^{dim-1} normalized so that Q_k(1) = 1
// (Chebyshev T_k for dim = 2, Legendre for dim = 3). Fills out[0..size-1].
template <typename Real>
void normalized_gegenbauer(int dim, Real x, std::span<Real> out) {
  if (dim < 2) throw std::invalid_argument("normalized_gegenbauer: dim < 2");
  if (out.empty()) return;
  // (k + 2l) Q_{k+1} = 2 (k + l) x Q_k - k Q_{k-1}, l = (dim - 2) / 2.
  const Real two_lambda = dim - 2;
  out[0] = 1;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const Real kk = static_cast<Real>(k);
    out[k + 1] = ((2 * kk + two_lambda) * x * out[k] - kk * out[k - 1]) / (kk + two_lambda);
  }
}

}  // namespace designforge
