#include "designforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "designforge/orthopoly.hpp"

namespace designforge {

namespace {

using VectorXl = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using MatrixXl = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

std::string weight_name(const JacobiWeight& w) {
  return "w(" + std::to_string(w.m) + "," + std::to_string(w.n) + ")";
}

// Residuals r_1..r_t and (optionally) the Jacobian with respect to theta_k,
// where t_k = cos(theta_k).
void evaluate_system(const OrthonormalJacobiBasis& basis, const VectorXl& theta, VectorXl& r,
                     MatrixXl* jac) {
  const int t = basis.max_degree();
  const auto K = theta.size();
  const long double inv_k = 1.0L / static_cast<long double>(K);
  std::vector<long double> values(t + 1), derivs(t + 1);
  r.setZero(t);
  if (jac) jac->setZero(t, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const long double c = std::cos(theta[k]);
    const long double s = std::sin(theta[k]);
    if (jac) {
      basis.evaluate(c, values, derivs);
    } else {
      basis.evaluate(c, values);
    }
    for (int d = 1; d <= t; ++d) {
      r[d - 1] += values[d] * inv_k;
      if (jac) (*jac)(d - 1, k) = -derivs[d] * s * inv_k;
    }
  }
}

// Gauss nodes replicated with multiplicities proportional to their weights
// (largest-remainder rounding). Copies of one node are spread across part of
// its angular cell so they can separate under the iteration.
VectorXl initial_angles(const JacobiWeight& w, int t, std::size_t K, std::uint64_t seed) {
  const int gauss_count = static_cast<int>(std::min<std::size_t>(K, (t + 2) / 2));
  const GaussRule gauss = gauss_jacobi_init(w, std::max(gauss_count, 1));
  const std::size_t G = gauss.nodes.size();
  const double mass = std::accumulate(gauss.weights.begin(), gauss.weights.end(), 0.0);

  std::vector<std::size_t> copies(G);
  std::vector<std::pair<double, std::size_t>> remainders(G);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < G; ++i) {
    const double share = static_cast<double>(K) * gauss.weights[i] / mass;
    copies[i] = static_cast<std::size_t>(std::floor(share));
    assigned += copies[i];
    remainders[i] = {share - std::floor(share), i};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; assigned < K; ++j, ++assigned) ++copies[remainders[j % G].second];

  std::vector<long double> angles(G);
  for (std::size_t i = 0; i < G; ++i) angles[i] = std::acos(static_cast<long double>(gauss.nodes[i]));

  std::mt19937_64 rng(seed);
  const long double pi = std::acos(-1.0L);
  VectorXl theta(static_cast<Eigen::Index>(K));
  Eigen::Index out = 0;
  for (std::size_t i = 0; i < G; ++i) {
    if (copies[i] == 0) continue;
    if (copies[i] == 1) {
      theta[out++] = angles[i];
      continue;
    }
    // Angles decrease with increasing node value.
    const long double upper = i == 0 ? pi : (angles[i] + angles[i - 1]) / 2.0L;
    const long double lower = i + 1 == G ? 0.0L : (angles[i] + angles[i + 1]) / 2.0L;
    const long double width = 0.8L * (upper - lower);
    const auto c = static_cast<long double>(copies[i]);
    for (std::size_t j = 0; j < copies[i]; ++j) {
      const long double u = static_cast<long double>(rng() >> 11) * 0x1.0p-53L - 0.5L;
      const long double offset = ((j + 0.5L) / c - 0.5L) + 1e-3L * u / c;
      theta[out++] = std::clamp(angles[i] + width * offset, 0.0L, pi);
    }
  }
  return theta;
}

struct LmOutcome {
  VectorXl theta;
  long double max_abs = 0;
  int iterations = 0;
};

// Levenberg-Marquardt on the residual system in angle coordinates. Uses the
// t x t normal form dtheta = -J^T (J J^T + lambda I)^{-1} r.
LmOutcome levenberg_marquardt(const OrthonormalJacobiBasis& basis, VectorXl theta, long double target,
                              int max_iterations) {
  const int t = basis.max_degree();
  VectorXl r, r_trial;
  MatrixXl jac;
  evaluate_system(basis, theta, r, &jac);
  long double cost = r.squaredNorm();
  MatrixXl jjt = jac * jac.transpose();
  long double lambda = 1e-3L * jjt.trace() / t;
  long double checkpoint_cost = cost;

  LmOutcome out;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    if (r.cwiseAbs().maxCoeff() <= target) break;
    if (iter > 0 && iter % 40 == 0) {
      // Stalled in a local minimum: let the caller escalate K.
      if (cost > 0.5L * checkpoint_cost) break;
      checkpoint_cost = cost;
    }
    MatrixXl system = jjt;
    system.diagonal().array() += lambda;
    const VectorXl y = system.ldlt().solve(r);
    const VectorXl trial = theta - jac.transpose() * y;
    evaluate_system(basis, trial, r_trial, nullptr);
    const long double trial_cost = r_trial.squaredNorm();
    if (std::isfinite(trial_cost) && trial_cost < cost) {
      theta = trial;
      evaluate_system(basis, theta, r, &jac);
      cost = r.squaredNorm();
      jjt = jac * jac.transpose();
      lambda = std::max(lambda / 3.0L, 1e-30L);
    } else {
      lambda *= 4.0L;
      if (lambda > 1e30L) break;
    }
  }
  out.theta = std::move(theta);
  out.max_abs = r.size() ? r.cwiseAbs().maxCoeff() : 0.0L;
  out.iterations = iter;
  return out;
}

}  // namespace

Quadrature::Quadrature(JacobiWeight weight, int degree, std::vector<double> nodes)
    : weight_(weight), degree_(degree), nodes_(std::move(nodes)) {
  if (degree_ < 0) throw std::invalid_argument("Quadrature: negative degree");
  if (nodes_.empty()) throw std::invalid_argument("Quadrature: empty node set");
  for (double x : nodes_) {
    if (!(x >= -1.0 && x <= 1.0)) {
      throw std::invalid_argument("Quadrature: node " + std::to_string(x) + " outside [-1, 1]");
    }
  }
  std::sort(nodes_.begin(), nodes_.end());
}

void Quadrature::set_certification(bool certified, double tolerance, double max_abs_residual) {
  certified_ = certified;
  tolerance_ = tolerance;
  max_abs_residual_ = max_abs_residual;
}

GaussRule gauss_jacobi_init(const JacobiWeight& w, int num_nodes) {
  if (num_nodes < 1) throw std::invalid_argument("gauss_jacobi_init: num_nodes < 1");
  const auto rc = jacobi_recurrence(w, num_nodes);
  VectorXl diag(num_nodes), sub(std::max(num_nodes - 1, 0));
  for (int k = 0; k < num_nodes; ++k) diag[k] = rc.diag[k];
  for (int k = 1; k < num_nodes; ++k) sub[k - 1] = std::sqrt(rc.offdiag_sq[k]);

  Eigen::SelfAdjointEigenSolver<MatrixXl> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_jacobi_init: eigen-solver did not converge for " + weight_name(w) +
                             " with " + std::to_string(num_nodes) + " nodes");
  }
  const long double mass = jacobi_weight_mass(w);
  GaussRule rule;
  rule.nodes.resize(num_nodes);
  rule.weights.resize(num_nodes);
  for (int i = 0; i < num_nodes; ++i) {
    const long double v0 = solver.eigenvectors()(0, i);
    rule.nodes[i] = static_cast<double>(std::clamp(solver.eigenvalues()[i], -1.0L, 1.0L));
    rule.weights[i] = static_cast<double>(mass * v0 * v0);
  }
  return rule;
}

std::vector<double> residual_vector(const Quadrature& q) {
  const int t = q.degree();
  const OrthonormalJacobiBasis basis(q.weight(), t);
  std::vector<long double> values(t + 1);
  std::vector<long double> sums(t + 1, 0.0L), comp(t + 1, 0.0L);
  for (double x : q.nodes()) {
    basis.evaluate(x, values);
    for (int d = 0; d <= t; ++d) {
      // Neumaier summation.
      const long double s = sums[d] + values[d];
      comp[d] += std::fabs(sums[d]) >= std::fabs(values[d]) ? (sums[d] - s) + values[d]
                                                             : (values[d] - s) + sums[d];
      sums[d] = s;
    }
  }
  const auto K = static_cast<long double>(q.size());
  std::vector<double> r(t + 1);
  r[0] = 0.0;  // P_0 = 1 averages to 1 exactly
  for (int d = 1; d <= t; ++d) r[d] = static_cast<double>((sums[d] + comp[d]) / K);
  return r;
}

QuadratureReport certify(Quadrature& q, double tol) {
  QuadratureReport report;
  report.residuals = residual_vector(q);
  report.K = q.size();
  report.tolerance = tol;
  for (std::size_t d = 1; d < report.residuals.size(); ++d) {
    report.max_abs_residual = std::max(report.max_abs_residual, std::fabs(report.residuals[d]));
  }
  for (int d = 1; d <= q.degree(); ++d) {
    long double sum = 0.0L;
    for (double x : q.nodes()) sum += std::pow(static_cast<long double>(x), d);
    const long double mean = sum / static_cast<long double>(q.size());
    const long double err = std::fabs(mean - to_long_double(power_moment(q.weight(), d)));
    report.max_power_moment_residual = std::max(report.max_power_moment_residual, static_cast<double>(err));
  }
  report.certified = report.max_abs_residual <= tol;
  q.set_certification(report.certified, tol, report.max_abs_residual);
  return report;
}

SolveResult solve_equal_weight(const JacobiWeight& w, int t, const SolverOptions& opts) {
  if (t < 0) throw std::invalid_argument("solve_equal_weight: negative degree");
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("solve_equal_weight: tolerance must be positive");
  if (opts.max_K < 1) throw std::invalid_argument("solve_equal_weight: max_K must be >= 1");

  if (t == 0) {
    Quadrature q(w, 0, {gauss_jacobi_init(w, 1).nodes[0]});
    auto report = certify(q, opts.tolerance);
    return {std::move(q), std::move(report)};
  }

  const OrthonormalJacobiBasis basis(w, t);
  const long double target = 0.01L * opts.tolerance;
  std::size_t K = opts.initial_K.value_or(static_cast<std::size_t>((t + 2) / 2));
  K = std::clamp<std::size_t>(K, 1, opts.max_K);

  std::optional<SolveResult> best;
  int total_iterations = 0;
  while (true) {
    const LmOutcome lm = levenberg_marquardt(basis, initial_angles(w, t, K, opts.seed), target,
                                             opts.max_iterations);
    total_iterations += lm.iterations;
    std::vector<double> nodes(static_cast<std::size_t>(lm.theta.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      nodes[k] = static_cast<double>(std::cos(lm.theta[static_cast<Eigen::Index>(k)]));
    }
    Quadrature q(w, t, std::move(nodes));
    QuadratureReport report = certify(q, opts.tolerance);
    report.iterations = total_iterations;
    if (report.certified) return {std::move(q), std::move(report)};
    if (!best || report.max_abs_residual < best->report.max_abs_residual) {
      best = SolveResult{std::move(q), std::move(report)};
    }
    if (K >= opts.max_K) break;
    K = std::min(opts.max_K, std::max(K + 1, static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(K)))));
  }
  throw NoConvergence("solve_equal_weight: no certified rule for " + weight_name(w) + " at degree " +
                          std::to_string(t) + " with K <= " + std::to_string(opts.max_K) +
                          " (best residual " + std::to_string(best->report.max_abs_residual) + ")",
                      std::move(*best));
}

}  // namespace designforge
