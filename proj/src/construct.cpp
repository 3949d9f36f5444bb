#include "designforge/construct.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "designforge/verify.hpp"

namespace designforge {

namespace {

std::string dims(int m, int n) { return "(" + std::to_string(m) + ", " + std::to_string(n) + ")"; }

}  // namespace

Design::Design(int ambient_dim, int degree, Eigen::MatrixXd points)
    : ambient_dim_(ambient_dim), degree_(degree), points_(std::move(points)) {
  if (ambient_dim_ < 1) throw std::invalid_argument("Design: ambient_dim < 1");
  if (degree_ < 0) throw std::invalid_argument("Design: negative degree");
  if (points_.rows() < 1) throw std::invalid_argument("Design: empty point set");
  if (points_.cols() != ambient_dim_) {
    throw std::invalid_argument("Design: points have " + std::to_string(points_.cols()) +
                                " coordinates, expected " + std::to_string(ambient_dim_));
  }
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    const double norm = points_.row(i).norm();
    if (!(std::fabs(norm - 1.0) <= kNormTolerance)) {
      throw std::invalid_argument("Design: point " + std::to_string(i) + " has norm " +
                                  std::to_string(norm));
    }
  }
}

Design base_s0(int t) {
  if (t < 0) throw std::invalid_argument("base_s0: negative degree");
  Eigen::MatrixXd points(2, 1);
  points << 1.0, -1.0;
  return Design(1, t, std::move(points));
}

Design base_s1(int t, double phase) {
  if (t < 0) throw std::invalid_argument("base_s1: negative degree");
  const int count = t + 1;
  Eigen::MatrixXd points(count, 2);
  for (int j = 0; j < count; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / count + phase;
    points(j, 0) = std::cos(angle);
    points(j, 1) = std::sin(angle);
  }
  return Design(2, t, std::move(points));
}

Design product(const Design& x, const Design& y, const Quadrature& t, bool allow_uncertified) {
  const int m = x.ambient_dim();
  const int n = y.ambient_dim();
  if (t.weight().m != m || t.weight().n != n) {
    throw std::invalid_argument("product: designs have dimensions " + dims(m, n) +
                                " but quadrature weight is " + dims(t.weight().m, t.weight().n));
  }
  if (!t.certified() && !allow_uncertified) {
    throw std::invalid_argument("product: quadrature is not certified");
  }
  const int degree = std::min({x.degree(), y.degree(), t.degree()});
  const auto M = static_cast<Eigen::Index>(x.size());
  const auto N = static_cast<Eigen::Index>(y.size());
  const auto K = static_cast<Eigen::Index>(t.size());

  std::vector<double> x_scale(K), y_scale(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double node = t.nodes()[k];
    x_scale[k] = std::sqrt((1.0 - node) / 2.0);
    y_scale[k] = std::sqrt((1.0 + node) / 2.0);
  }
  Eigen::MatrixXd points(M * N * K, m + n);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      for (Eigen::Index k = 0; k < K; ++k, ++row) {
        points.block(row, 0, 1, m) = x_scale[k] * x.points().row(i);
        points.block(row, m, 1, n) = y_scale[k] * y.points().row(j);
      }
    }
  }
  return Design(m + n, degree, std::move(points));
}

std::int64_t a_sequence(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("a_sequence: n < 1");
  std::map<std::int64_t, std::int64_t> memo{{1, 1}, {2, 3}};
  std::function<std::int64_t(std::int64_t)> a = [&](std::int64_t k) -> std::int64_t {
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    const std::int64_t half = (k + 1) / 2;
    const std::int64_t value = k % 2 != 0 ? 2 * a(half - 1) + half : a(k / 2 - 1) + a(k / 2) + k / 2 + 1;
    memo.emplace(k, value);
    return value;
  };
  return a(n);
}

std::uint64_t lower_bound(int n, int t) {
  if (n < 0 || t < 0) throw std::invalid_argument("lower_bound: negative argument");
  using boost::multiprecision::cpp_int;
  const auto binom = [](int top, int bottom) -> cpp_int {
    if (bottom < 0 || bottom > top) return 0;
    cpp_int r = 1;
    for (int j = 1; j <= bottom; ++j) {
      r *= top - bottom + j;
      r /= j;
    }
    return r;
  };
  const int k = t / 2;
  const cpp_int bound = t % 2 == 0 ? binom(n + k, n) + binom(n + k - 1, n) : 2 * binom(n + k, n);
  if (bound > std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("lower_bound: value exceeds 64 bits");
  }
  return bound.convert_to<std::uint64_t>();
}

std::pair<int, int> default_split(int ambient_dim) {
  if (ambient_dim < 3) throw std::invalid_argument("default_split: dimension " + std::to_string(ambient_dim) + " is a leaf");
  if (ambient_dim == 3) return {2, 1};
  const int half = ambient_dim / 2;
  return {half, ambient_dim - half};
}

BuildPlan plan(int n, int t, const SplitOverrides& overrides) {
  if (n < 0) throw std::invalid_argument("plan: negative sphere dimension");
  if (t < 0) throw std::invalid_argument("plan: negative degree");
  for (const auto& [dim, split] : overrides) {
    if (split.first < 1 || split.second < 1 || split.first + split.second != dim) {
      throw std::invalid_argument("plan: override for dimension " + std::to_string(dim) + " splits into " +
                                  dims(split.first, split.second));
    }
  }
  BuildPlan result;
  result.sphere_dim = n;
  result.degree = t;
  std::function<int(int)> add = [&](int ambient) -> int {
    PlanNode node;
    node.ambient_dim = ambient;
    const auto over = overrides.find(ambient);
    if (over != overrides.end() || ambient > 2) {
      const auto [m, k] = over != overrides.end() ? over->second : default_split(ambient);
      node.m_child = add(m);
      node.n_child = add(k);
    }
    result.nodes.push_back(node);
    return static_cast<int>(result.nodes.size()) - 1;
  };
  result.root = add(n + 1);
  return result;
}

BuildResult build(const BuildPlan& plan, const BuildOptions& options) {
  if (plan.root < 0 || plan.nodes.empty()) throw std::invalid_argument("build: empty plan");
  const int t = plan.degree;
  BuildReport report;
  report.sphere_dim = plan.sphere_dim;
  report.degree = t;
  report.root = plan.root;
  report.nodes.resize(plan.nodes.size());
  report.predicted_exponent = plan.sphere_dim >= 1 ? a_sequence(plan.sphere_dim) : 0;
  report.lower_bound = lower_bound(plan.sphere_dim, t);

  std::vector<std::optional<Design>> designs(plan.nodes.size());
  for (std::size_t idx = 0; idx < plan.nodes.size(); ++idx) {
    const PlanNode& node = plan.nodes[idx];
    NodeReport& rec = report.nodes[idx];
    rec.node = static_cast<int>(idx);
    rec.ambient_dim = node.ambient_dim;
    rec.leaf = node.leaf();
    if (node.leaf()) {
      if (node.ambient_dim == 1) {
        designs[idx] = base_s0(t);
      } else if (node.ambient_dim == 2) {
        designs[idx] = base_s1(t, options.phase);
      } else {
        throw std::invalid_argument("build: leaf of dimension " + std::to_string(node.ambient_dim));
      }
    } else {
      const Design& x = *designs.at(node.m_child);
      const Design& y = *designs.at(node.n_child);
      const JacobiWeight w(x.ambient_dim(), y.ambient_dim());
      std::optional<Quadrature> quad;
      if (options.cache) quad = options.cache->lookup(w, t, options.solver.tolerance);
      rec.cache_hit = quad.has_value();
      if (!quad) {
        quad = solve_equal_weight(w, t, options.solver).quadrature;
        if (options.cache) options.cache->store(*quad);
      }
      rec.m_child = node.m_child;
      rec.n_child = node.n_child;
      rec.K = quad->size();
      rec.M = x.size();
      rec.N = y.size();
      rec.quadrature_residual = quad->max_abs_residual();
      designs[idx] = product(x, y, *quad);
      // Children's designs are no longer needed.
      designs[node.m_child].reset();
      designs[node.n_child].reset();
    }
    const Design& current = *designs[idx];
    rec.cardinality = current.size();
    const VerificationReport check = verify(current, t, options.design_tolerance);
    rec.method = check.method;
    rec.residual = check.max_abs_residual;
    rec.passed = check.passed;
    if (!check.passed) {
      report.failed_node = rec.node;
      throw BuildFailed("build: node " + std::to_string(idx) + " (S^" + std::to_string(node.ambient_dim - 1) +
                            ") failed verification with residual " + std::to_string(check.max_abs_residual),
                        std::move(report));
    }
  }
  const NodeReport& root = report.nodes[plan.root];
  report.cardinality = root.cardinality;
  report.residual = root.residual;
  report.passed = root.passed;
  return {std::move(*designs[plan.root]), std::move(report)};
}

}  // namespace designforge
