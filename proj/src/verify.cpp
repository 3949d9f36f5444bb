#include "designforge/verify.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "designforge/orthopoly.hpp"

namespace designforge {

namespace {

#ifdef __SIZEOF_FLOAT128__
using WideReal = __float128;
#else
using WideReal = long double;
#endif

// Neumaier-compensated accumulator.
template <typename T>
class CompensatedSum {
 public:
  void add(T value) {
    const T s = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      comp_ += (sum_ - s) + value;
    } else {
      comp_ += (value - s) + sum_;
    }
    sum_ = s;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

}  // namespace

std::string to_string(VerifyMethod method) {
  switch (method) {
    case VerifyMethod::kMonomial: return "monomial";
    case VerifyMethod::kGegenbauer: return "gegenbauer";
    case VerifyMethod::kBoth: return "both";
    case VerifyMethod::kAuto: return "auto";
  }
  return "auto";
}

VerifyMethod parse_verify_method(const std::string& name) {
  if (name == "monomial") return VerifyMethod::kMonomial;
  if (name == "gegenbauer") return VerifyMethod::kGegenbauer;
  if (name == "both") return VerifyMethod::kBoth;
  if (name == "auto") return VerifyMethod::kAuto;
  throw std::invalid_argument("unknown verification method '" + name + "'");
}

VerificationReport verify_monomials(const Design& design, int t, double tol) {
  if (t < 0) throw std::invalid_argument("verify_monomials: negative degree");
  const int d = design.ambient_dim();
  const auto N = static_cast<Eigen::Index>(design.size());
  const Eigen::MatrixXd& x = design.points();

  // powers[(i * d + c) * (t + 1) + e] = x_{ic}^e
  std::vector<double> powers(static_cast<std::size_t>(N) * d * (t + 1));
  for (Eigen::Index i = 0; i < N; ++i) {
    for (int c = 0; c < d; ++c) {
      double* row = &powers[(static_cast<std::size_t>(i) * d + c) * (t + 1)];
      row[0] = 1.0;
      for (int e = 1; e <= t; ++e) row[e] = row[e - 1] * x(i, c);
    }
  }

  VerificationReport report;
  report.method = "monomial";
  report.degree_checked = t;
  report.tolerance = tol;
  for (const MultiIndex& alpha : enumerate_multi_indices(d, t)) {
    CompensatedSum<double> acc;
    for (Eigen::Index i = 0; i < N; ++i) {
      const double* base = &powers[static_cast<std::size_t>(i) * d * (t + 1)];
      double term = 1.0;
      for (int c = 0; c < d; ++c) term *= base[c * (t + 1) + alpha[c]];
      acc.add(term);
    }
    const double mean = acc.value() / static_cast<double>(N);
    const double residual = std::fabs(mean - to_double(sphere_monomial_moment(d, alpha)));
    if (!report.worst_monomial || residual > report.max_abs_residual) {
      report.max_abs_residual = residual;
      report.worst_monomial = alpha;
    }
  }
  report.passed = report.max_abs_residual <= tol;
  return report;
}

VerificationReport verify_gegenbauer(const Design& design, int t, double tol) {
  if (t < 0) throw std::invalid_argument("verify_gegenbauer: negative degree");
  const int d = design.ambient_dim();
  if (d < 2) throw std::invalid_argument("verify_gegenbauer: unsupported on S^0, use the monomial method");
  const auto N = static_cast<Eigen::Index>(design.size());
  const Eigen::MatrixXd& x = design.points();

  // Stored points have norms 1 +- 1e-16 and Q_k amplifies inner-product
  // errors by up to k^2, so the kernel is evaluated on points renormalized in
  // quad precision. The square root of the pair sum then has a noise floor far
  // below any usable tolerance.
  std::vector<WideReal> unit(static_cast<std::size_t>(N) * d);
  for (Eigen::Index i = 0; i < N; ++i) {
    long double norm_sq = 0.0L;
    for (int c = 0; c < d; ++c) norm_sq += static_cast<long double>(x(i, c)) * x(i, c);
    WideReal norm_sq_wide = 0;
    for (int c = 0; c < d; ++c) norm_sq_wide += static_cast<WideReal>(x(i, c)) * static_cast<WideReal>(x(i, c));
    // One Newton step on 1/sqrt refines the extended-precision estimate.
    WideReal inv = static_cast<WideReal>(1.0L / std::sqrt(norm_sq));
    inv = inv * (3 - norm_sq_wide * inv * inv) / 2;
    for (int c = 0; c < d; ++c) unit[static_cast<std::size_t>(i) * d + c] = static_cast<WideReal>(x(i, c)) * inv;
  }

  std::vector<WideReal> off_diagonal(t + 1, 0);
  std::vector<WideReal> q(t + 1);
  for (Eigen::Index i = 0; i < N; ++i) {
    const WideReal* xi = &unit[static_cast<std::size_t>(i) * d];
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const WideReal* xj = &unit[static_cast<std::size_t>(j) * d];
      WideReal inner = 0;
      for (int c = 0; c < d; ++c) inner += xi[c] * xj[c];
      if (inner > 1) inner = 1;
      if (inner < -1) inner = -1;
      normalized_gegenbauer<WideReal>(d, inner, q);
      for (int k = 0; k <= t; ++k) off_diagonal[k] += q[k];
    }
  }

  VerificationReport report;
  report.method = "gegenbauer";
  report.degree_checked = t;
  report.tolerance = tol;
  report.gegenbauer_sums.resize(t + 1);
  const WideReal n = static_cast<WideReal>(N);
  for (int k = 0; k <= t; ++k) {
    // Diagonal terms contribute Q_k(1) = 1 each.
    const WideReal normalized = (2 * off_diagonal[k] + n) / (n * n);
    report.gegenbauer_sums[k] = static_cast<double>(normalized);
    if (k == 0) continue;
    const double residual = std::sqrt(std::fabs(static_cast<double>(normalized)));
    if (!report.worst_degree || residual > report.max_abs_residual) {
      report.max_abs_residual = residual;
      report.worst_degree = k;
    }
  }
  report.passed = report.max_abs_residual <= tol;
  return report;
}

VerificationReport verify(const Design& design, int t, double tol, VerifyMethod method) {
  if (method == VerifyMethod::kAuto) {
    const int d = design.ambient_dim();
    const bool monomial = d <= 6;
    const bool gegenbauer = d >= 2 && (d > 6 || design.size() <= kGegenbauerAutoLimit);
    method = monomial && gegenbauer ? VerifyMethod::kBoth
             : monomial             ? VerifyMethod::kMonomial
                                    : VerifyMethod::kGegenbauer;
  }
  switch (method) {
    case VerifyMethod::kMonomial: return verify_monomials(design, t, tol);
    case VerifyMethod::kGegenbauer: return verify_gegenbauer(design, t, tol);
    default: break;
  }
  VerificationReport report;
  report.method = "both";
  report.degree_checked = t;
  report.tolerance = tol;
  report.parts.push_back(verify_monomials(design, t, tol));
  report.parts.push_back(verify_gegenbauer(design, t, tol));
  report.worst_monomial = report.parts[0].worst_monomial;
  report.worst_degree = report.parts[1].worst_degree;
  report.gegenbauer_sums = report.parts[1].gegenbauer_sums;
  report.max_abs_residual = std::max(report.parts[0].max_abs_residual, report.parts[1].max_abs_residual);
  report.passed = report.parts[0].passed && report.parts[1].passed;
  return report;
}

MonteCarloEstimate mc_moment_oracle(int dim, const MultiIndex& alpha, std::size_t samples, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("mc_moment_oracle: dim < 1");
  if (samples < 1) throw std::invalid_argument("mc_moment_oracle: samples < 1");
  if (alpha.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("mc_moment_oracle: multi-index length does not match dim");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  // Welford running mean and variance.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 1; s <= samples; ++s) {
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (double& c : v) {
        c = normal(rng);
        norm_sq += c * c;
      }
    } while (norm_sq == 0.0);
    double value = 1.0;
    if (dim == 1) {
      value = alpha[0] % 2 != 0 && v[0] < 0.0 ? -1.0 : 1.0;
    } else {
      const double inv_norm = 1.0 / std::sqrt(norm_sq);
      for (int c = 0; c < dim; ++c) value *= std::pow(v[c] * inv_norm, alpha[c]);
    }
    const double delta = value - mean;
    mean += delta / static_cast<double>(s);
    m2 += delta * (value - mean);
  }
  MonteCarloEstimate out;
  out.estimate = mean;
  out.std_error = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
  return out;
}

}  // namespace designforge
