#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "designforge/exact_moments.hpp"

namespace designforge {

// Equal-weight (Chebyshev-type) quadrature for a Jacobi weight: the average of
// p over `nodes` equals the normalized weighted integral of p for deg p <= degree.
// Nodes form a multiset kept in ascending order.
class Quadrature {
 public:
  Quadrature(JacobiWeight weight, int degree, std::vector<double> nodes);

  const JacobiWeight& weight() const { return weight_; }
  int degree() const { return degree_; }
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  bool certified() const { return certified_; }
  double tolerance() const { return tolerance_; }
  double max_abs_residual() const { return max_abs_residual_; }

  // Only certify() and deserialization set this.
  void set_certification(bool certified, double tolerance, double max_abs_residual);

 private:
  JacobiWeight weight_;
  int degree_;
  std::vector<double> nodes_;
  bool certified_ = false;
  double tolerance_ = 0.0;
  double max_abs_residual_ = std::numeric_limits<double>::infinity();
};

struct QuadratureReport {
  std::vector<double> residuals;  // orthonormal-basis residuals r_0..r_t
  double max_abs_residual = 0.0;  // over degrees 1..t
  // max over d <= t of |mean(t_k^d) - exact power moment|
  double max_power_moment_residual = 0.0;
  std::size_t K = 0;
  int iterations = 0;
  bool certified = false;
  double tolerance = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // positive, sum to the weight's total mass
};

// Gauss rule for w via the Golub-Welsch eigenvalue method.
GaussRule gauss_jacobi_init(const JacobiWeight& w, int num_nodes);

// r_d = mean_k P_d(t_k) for d >= 1 (P_d orthonormal for w), r_0 = mean_k P_0 - 1 = 0.
std::vector<double> residual_vector(const Quadrature& q);

// Recomputes residuals and sets q's certification flag.
QuadratureReport certify(Quadrature& q, double tol);

struct SolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 400;
  std::size_t max_K = 4096;
  std::uint64_t seed = 0;
  // Overrides the starting node count (default ceil((t+1)/2)).
  std::optional<std::size_t> initial_K;
};

struct SolveResult {
  Quadrature quadrature;
  QuadratureReport report;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, SolveResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolveResult& best() const { return best_; }

 private:
  SolveResult best_;
};

// Searches for an equal-weight rule of degree t, escalating K geometrically
// until certification at opts.tolerance succeeds. Throws NoConvergence.
SolveResult solve_equal_weight(const JacobiWeight& w, int t, const SolverOptions& opts = {});

}  // namespace designforge
