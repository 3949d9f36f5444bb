#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace designforge {

using ExactRational = boost::multiprecision::cpp_rational;

// Exponent vector of a monomial x_1^a_1 ... x_d^a_d.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  std::size_t size() const { return exponents_.size(); }
  int degree() const { return degree_; }
  int operator[](std::size_t i) const { return exponents_[i]; }
  std::span<const int> exponents() const { return exponents_; }

  bool all_even() const;
  // beta_i = alpha_i / 2; throws std::domain_error if any exponent is odd.
  MultiIndex half() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

// All multi-indices of length `dim` with total degree <= max_degree, graded
// by degree and lexicographically descending within each degree.
std::vector<MultiIndex> enumerate_multi_indices(int dim, int max_degree);

// Jacobi weight (1-x)^((m-2)/2) (1+x)^((n-2)/2) on [-1, 1]. The pair (m, n)
// are the ambient dimensions of the two sphere factors being joined.
struct JacobiWeight {
  int m = 2;
  int n = 2;

  JacobiWeight() = default;
  JacobiWeight(int m_dim, int n_dim);

  // Exponent of (1 - x).
  double alpha() const { return (m - 2) / 2.0; }
  // Exponent of (1 + x).
  double beta() const { return (n - 2) / 2.0; }
  bool symmetric() const { return m == n; }

  friend bool operator==(const JacobiWeight&, const JacobiWeight&) = default;
};

// Normalized moment (1/|S^{dim-1}|) * integral of x^alpha over S^{dim-1}.
// dim == 1 is S^0 = {-1, +1} with the two-point average.
ExactRational sphere_monomial_moment(int dim, const MultiIndex& alpha);

// integral ((1-t)/2)^a ((1+t)/2)^b w(t) dt / integral w(t) dt.
ExactRational jacobi_moment_ratio(const JacobiWeight& w, int a, int b);

// integral t^d w(t) dt / integral w(t) dt.
ExactRational power_moment(const JacobiWeight& w, int d);

// Floating-point helpers used for consistency checks, not for exact targets.
long double sphere_measure(int dim);         // |S^{dim-1}|, with |S^0| = 2
long double jacobi_weight_mass(const JacobiWeight& w);  // integral of w

inline long double to_long_double(const ExactRational& q) {
  return q.convert_to<long double>();
}
inline double to_double(const ExactRational& q) { return q.convert_to<double>(); }

}  // namespace designforge
