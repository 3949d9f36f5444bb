#include "designforge/exact_moments.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace designforge {

namespace {

using boost::multiprecision::cpp_int;

// (2k - 1)!! with (-1)!! = 1.
cpp_int odd_double_factorial(int k) {
  cpp_int r = 1;
  for (int j = 2 * k - 1; j > 1; j -= 2) r *= j;
  return r;
}

// Rising factorial (x)_k for rational x.
ExactRational pochhammer(const ExactRational& x, int k) {
  ExactRational r = 1;
  for (int j = 0; j < k; ++j) r *= x + j;
  return r;
}

cpp_int binomial(int n, int k) {
  cpp_int r = 1;
  for (int j = 1; j <= k; ++j) {
    r *= n - k + j;
    r /= j;
  }
  return r;
}

void enumerate_rec(int dim, int pos, int remaining, std::vector<int>& current,
                   std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[pos] = e;
    enumerate_rec(dim, pos + 1, remaining - e, current, out);
  }
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  }
  degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

bool MultiIndex::all_even() const {
  for (int e : exponents_) {
    if (e % 2 != 0) return false;
  }
  return true;
}

MultiIndex MultiIndex::half() const {
  if (!all_even()) throw std::domain_error("MultiIndex::half: odd exponent");
  std::vector<int> beta(exponents_.size());
  for (std::size_t i = 0; i < beta.size(); ++i) beta[i] = exponents_[i] / 2;
  return MultiIndex(std::move(beta));
}

std::vector<MultiIndex> enumerate_multi_indices(int dim, int max_degree) {
  if (dim < 1) throw std::invalid_argument("enumerate_multi_indices: dim < 1");
  std::vector<MultiIndex> out;
  std::vector<int> current(dim, 0);
  for (int deg = 0; deg <= max_degree; ++deg) enumerate_rec(dim, 0, deg, current, out);
  return out;
}

JacobiWeight::JacobiWeight(int m_dim, int n_dim) : m(m_dim), n(n_dim) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("JacobiWeight: dimensions must be >= 1, got (" +
                                std::to_string(m) + ", " + std::to_string(n) + ")");
  }
}

ExactRational sphere_monomial_moment(int dim, const MultiIndex& alpha) {
  if (dim < 1) throw std::invalid_argument("sphere_monomial_moment: dim < 1");
  if (alpha.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("sphere_monomial_moment: multi-index has " +
                                std::to_string(alpha.size()) + " entries, expected " +
                                std::to_string(dim));
  }
  if (!alpha.all_even()) return 0;
  // Gamma(d/2) / Gamma(d/2 + |b|) * prod Gamma(b_i + 1/2) / Gamma(1/2)
  //   = prod (2 b_i - 1)!! / prod_{j < |b|} (d + 2j).
  const MultiIndex beta = alpha.half();
  cpp_int num = 1;
  for (int b : beta.exponents()) num *= odd_double_factorial(b);
  cpp_int den = 1;
  for (int j = 0; j < beta.degree(); ++j) den *= dim + 2 * j;
  return ExactRational(num, den);
}

ExactRational jacobi_moment_ratio(const JacobiWeight& w, int a, int b) {
  if (a < 0 || b < 0) throw std::invalid_argument("jacobi_moment_ratio: negative power");
  // B(a + m/2, b + n/2) / B(m/2, n/2) = (m/2)_a (n/2)_b / ((m+n)/2)_{a+b}
  const ExactRational p(w.m, 2);
  const ExactRational q(w.n, 2);
  return pochhammer(p, a) * pochhammer(q, b) / pochhammer(p + q, a + b);
}

ExactRational power_moment(const JacobiWeight& w, int d) {
  if (d < 0) throw std::invalid_argument("power_moment: negative degree");
  // t = 2u - 1 with u = (1+t)/2.
  ExactRational sum = 0;
  for (int j = 0; j <= d; ++j) {
    ExactRational term = ExactRational(binomial(d, j) * (cpp_int(1) << j)) *
                         jacobi_moment_ratio(w, 0, j);
    if ((d - j) % 2 != 0) term = -term;
    sum += term;
  }
  return sum;
}

long double sphere_measure(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_measure: dim < 1");
  if (dim == 1) return 2.0L;
  const long double half = dim / 2.0L;
  return 2.0L * std::pow(std::acos(-1.0L), half) / std::tgamma(half);
}

long double jacobi_weight_mass(const JacobiWeight& w) {
  const long double a = w.alpha() + 1.0L;
  const long double b = w.beta() + 1.0L;
  return std::pow(2.0L, a + b - 1.0L) * std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace designforge
