#include "designforge/orthopoly.hpp"

#include <cmath>
#include <stdexcept>

namespace designforge {

RecurrenceCoefficients jacobi_recurrence(const JacobiWeight& w, int count) {
  if (count < 1) throw std::invalid_argument("jacobi_recurrence: count < 1");
  const long double a = w.m / 2.0L - 1.0L;
  const long double b = w.n / 2.0L - 1.0L;
  RecurrenceCoefficients rc;
  rc.diag.resize(count);
  rc.offdiag_sq.resize(count);
  rc.diag[0] = (b - a) / (a + b + 2.0L);
  rc.offdiag_sq[0] = 1.0L;
  for (int k = 1; k < count; ++k) {
    const long double s = 2.0L * k + a + b;
    rc.diag[k] = (b * b - a * a) / (s * (s + 2.0L));
    if (k == 1) {
      // Closed form avoids 0/0 when a + b = -1.
      rc.offdiag_sq[k] = 4.0L * (1.0L + a) * (1.0L + b) / ((2.0L + a + b) * (2.0L + a + b) * (3.0L + a + b));
    } else {
      rc.offdiag_sq[k] = 4.0L * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0L) * (s - 1.0L));
    }
  }
  return rc;
}

OrthonormalJacobiBasis::OrthonormalJacobiBasis(const JacobiWeight& w, int max_degree)
    : max_degree_(max_degree) {
  if (max_degree < 0) throw std::invalid_argument("OrthonormalJacobiBasis: negative degree");
  const auto rc = jacobi_recurrence(w, max_degree + 1);
  diag_ = rc.diag;
  offdiag_.resize(rc.offdiag_sq.size());
  for (std::size_t k = 0; k < offdiag_.size(); ++k) offdiag_[k] = std::sqrt(rc.offdiag_sq[k]);
}

void OrthonormalJacobiBasis::evaluate(long double x, std::span<long double> values,
                                      std::span<long double> derivs) const {
  const bool want_derivs = !derivs.empty();
  values[0] = 1.0L;
  if (want_derivs) derivs[0] = 0.0L;
  if (max_degree_ == 0) return;
  values[1] = (x - diag_[0]) / offdiag_[1];
  if (want_derivs) derivs[1] = 1.0L / offdiag_[1];
  for (int k = 1; k < max_degree_; ++k) {
    values[k + 1] = ((x - diag_[k]) * values[k] - offdiag_[k] * values[k - 1]) / offdiag_[k + 1];
    if (want_derivs) {
      derivs[k + 1] = (values[k] + (x - diag_[k]) * derivs[k] - offdiag_[k] * derivs[k - 1]) /
                      offdiag_[k + 1];
    }
  }
}

}  // namespace designforge
