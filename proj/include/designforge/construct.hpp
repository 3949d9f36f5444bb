#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "designforge/quadrature.hpp"

namespace designforge {

// A point multiset on S^{ambient_dim - 1}, one point per row, claimed to be a
// spherical design of the given degree. The claim is checked by verify().
class Design {
 public:
  static constexpr double kNormTolerance = 1e-12;

  Design(int ambient_dim, int degree, Eigen::MatrixXd points);

  int ambient_dim() const { return ambient_dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }

 private:
  int ambient_dim_;
  int degree_;
  Eigen::MatrixXd points_;
};

Design base_s0(int t);
// Regular (t+1)-gon at angles 2 pi j / (t + 1) + phase.
Design base_s1(int t, double phase = 0.0);

// Joins X on S^{m-1} and Y on S^{n-1} through the nodes of T (weight (m, n)):
// every (x, y, t_k) yields (sqrt((1 - t_k)/2) x, sqrt((1 + t_k)/2) y).
// The result has degree min(X.degree, Y.degree, T.degree) and exactly K*M*N points.
Design product(const Design& x, const Design& y, const Quadrature& t, bool allow_uncertified = false);

// Exponent of the construction on S^n: a_1 = 1, a_2 = 3,
// a_{2k-1} = 2 a_{k-1} + k, a_{2k} = a_{k-1} + a_k + k + 1.
std::int64_t a_sequence(std::int64_t n);

// Delsarte-Goethals-Seidel lower bound on the size of a t-design on S^n.
std::uint64_t lower_bound(int n, int t);

struct PlanNode {
  int ambient_dim = 1;
  int m_child = -1;  // node index of the factor taking the (1 - t)/2 block
  int n_child = -1;
  bool leaf() const { return m_child < 0; }
};

struct BuildPlan {
  int sphere_dim = 0;  // target is S^sphere_dim
  int degree = 0;
  std::vector<PlanNode> nodes;  // children precede parents
  int root = -1;
};

// ambient dim -> (m, n) with m + n = ambient dim.
using SplitOverrides = std::map<int, std::pair<int, int>>;

// Default split of ambient dimension d: 2k -> (k, k), 2k+1 -> (k, k+1), except
// 3 -> (2, 1) so that S^2 is built from S^1 x S^0. Dimensions 1 and 2 are leaves.
std::pair<int, int> default_split(int ambient_dim);

BuildPlan plan(int n, int t, const SplitOverrides& overrides = {});

// Persistent source of certified quadratures; implemented by the CLI cache.
class QuadratureStore {
 public:
  virtual ~QuadratureStore() = default;
  virtual std::optional<Quadrature> lookup(const JacobiWeight& w, int degree, double tol) = 0;
  virtual void store(const Quadrature& q) = 0;
};

struct BuildOptions {
  SolverOptions solver;
  double design_tolerance = 1e-9;
  double phase = 0.0;
  QuadratureStore* cache = nullptr;
};

struct NodeReport {
  int node = -1;
  int ambient_dim = 0;
  bool leaf = true;
  int m_child = -1;
  int n_child = -1;
  std::size_t K = 1;  // quadrature size (1 for leaves)
  std::size_t M = 0;  // size of the m-factor design
  std::size_t N = 0;  // size of the n-factor design
  std::size_t cardinality = 0;
  double quadrature_residual = 0.0;
  bool cache_hit = false;
  std::string method;
  double residual = 0.0;
  bool passed = false;
};

struct BuildReport {
  int sphere_dim = 0;
  int degree = 0;
  std::vector<NodeReport> nodes;  // indexed like BuildPlan::nodes
  int root = -1;
  std::size_t cardinality = 0;
  std::int64_t predicted_exponent = 0;
  std::uint64_t lower_bound = 0;
  double residual = 0.0;
  bool passed = false;
  int failed_node = -1;
};

struct BuildResult {
  Design design;
  BuildReport report;
};

class BuildFailed : public std::runtime_error {
 public:
  BuildFailed(const std::string& what, BuildReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const BuildReport& report() const { return report_; }

 private:
  BuildReport report_;
};

// Executes a plan bottom-up, verifying every node at options.design_tolerance.
// Throws NoConvergence (quadrature) or BuildFailed (verification).
BuildResult build(const BuildPlan& plan, const BuildOptions& options = {});

}  // namespace designforge
