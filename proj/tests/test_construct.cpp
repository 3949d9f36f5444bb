#include "designforge/construct.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "designforge/verify.hpp"
#include "gtest/gtest.h"

namespace designforge {
namespace {

Quadrature certified_rule(int m, int n, int t, std::vector<double> nodes) {
  Quadrature q(JacobiWeight(m, n), t, std::move(nodes));
  certify(q, 1e-12);
  return q;
}

// Binomial coefficient from Pascal's triangle.
std::uint64_t pascal(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next(i + 1, 1);
    for (int j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = std::move(next);
  }
  return row[k];
}

TEST(BaseDesigns, S0) {
  for (int t : {0, 1, 5, 40}) {
    const Design d = base_s0(t);
    EXPECT_EQ(d.ambient_dim(), 1);
    EXPECT_EQ(d.degree(), t);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.points()(0, 0), 1.0);
    EXPECT_EQ(d.points()(1, 0), -1.0);
  }
  const Design d = base_s0(9);
  for (int k = 0; k <= 9; ++k) {
    const double avg = (std::pow(d.points()(0, 0), k) + std::pow(d.points()(1, 0), k)) / 2;
    EXPECT_EQ(avg, to_double(sphere_monomial_moment(1, MultiIndex({k}))));
  }
}

TEST(BaseDesigns, S1Polygons) {
  const Design two = base_s1(1);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NEAR(two.points()(0, 0), 1.0, 1e-16);
  EXPECT_NEAR(two.points()(1, 0), -1.0, 1e-16);
  EXPECT_NEAR(two.points()(1, 1), 0.0, 1e-15);

  const Design square = base_s1(3);
  const double expected[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  ASSERT_EQ(square.size(), 4u);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(square.points()(j, 0), expected[j][0], 1e-15);
    EXPECT_NEAR(square.points()(j, 1), expected[j][1], 1e-15);
  }

  const Design tri = base_s1(2);
  double xx = 0, xy = 0, yy = 0, x = 0, y = 0;
  for (int j = 0; j < 3; ++j) {
    const double a = tri.points()(j, 0), b = tri.points()(j, 1);
    xx += a * a / 3;
    xy += a * b / 3;
    yy += b * b / 3;
    x += a / 3;
    y += b / 3;
  }
  EXPECT_NEAR(xx, 0.5, 1e-15);
  EXPECT_NEAR(xy, 0.0, 1e-15);
  EXPECT_NEAR(yy, 0.5, 1e-15);
  EXPECT_NEAR(x, 0.0, 1e-15);
  EXPECT_NEAR(y, 0.0, 1e-15);
}

TEST(BaseDesigns, S1Phase) {
  const Design d = base_s1(4, 0.3);
  for (int j = 0; j < 5; ++j) {
    const double angle = 2 * std::numbers::pi * j / 5 + 0.3;
    EXPECT_NEAR(d.points()(j, 0), std::cos(angle), 1e-15);
    EXPECT_NEAR(d.points()(j, 1), std::sin(angle), 1e-15);
  }
}

TEST(Design, Validation) {
  Eigen::MatrixXd p(1, 2);
  p << 0.6, 0.8;
  EXPECT_NO_THROW(Design(2, 1, p));
  p << 0.6, 0.81;
  EXPECT_THROW(Design(2, 1, p), std::invalid_argument);
  EXPECT_THROW(Design(3, 1, Eigen::MatrixXd::Zero(1, 2)), std::invalid_argument);
  EXPECT_THROW(Design(2, 1, Eigen::MatrixXd(0, 2)), std::invalid_argument);
  EXPECT_THROW(Design(0, 1, Eigen::MatrixXd(1, 0)), std::invalid_argument);
}

TEST(Product, WorkedExampleOnS2) {
  const Quadrature q = certified_rule(2, 1, 1, {-1.0 / 3.0});
  ASSERT_TRUE(q.certified());
  const Design d = product(base_s1(1), base_s0(1), q);
  EXPECT_EQ(d.ambient_dim(), 3);
  EXPECT_EQ(d.degree(), 1);
  ASSERT_EQ(d.size(), 4u);
  const double a = std::sqrt(2.0 / 3.0), b = std::sqrt(1.0 / 3.0);
  std::multiset<std::tuple<long, long, long>> got, want;
  auto key = [](double x) { return std::lround(x * 1e12); };
  for (int i = 0; i < 4; ++i) got.insert({key(d.points()(i, 0)), key(d.points()(i, 1)), key(d.points()(i, 2))});
  for (double sx : {a, -a})
    for (double sz : {b, -b}) want.insert({key(sx), 0, key(sz)});
  EXPECT_EQ(got, want);
  const Eigen::RowVectorXd centroid = d.points().colwise().mean();
  EXPECT_LE(centroid.norm(), 1e-16);
  EXPECT_TRUE(verify_monomials(d, 1, 1e-12).passed);
}

TEST(Product, DegenerateNodeEmbedsFirstFactor) {
  const Design x = base_s1(4, 0.2);
  const Quadrature q = certified_rule(2, 2, 0, {-1.0});
  const Design d = product(x, base_s1(2), q);
  ASSERT_EQ(d.size(), 15u);
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(d.size()); ++r) {
    EXPECT_EQ(d.points()(r, 2), 0.0);
    EXPECT_EQ(d.points()(r, 3), 0.0);
    EXPECT_EQ(d.points().row(r).head(2), x.points().row(r / 3));
  }
}

TEST(Product, CardinalityIsKMN) {
  const Quadrature q(JacobiWeight(2, 1), 2, {-0.7, 0.1, 0.4});
  const Design d = product(base_s1(3), base_s0(2), q, /*allow_uncertified=*/true);
  EXPECT_EQ(d.size(), 24u);
  EXPECT_EQ(d.degree(), 2);
  for (int M : {1, 3, 6})
    for (int K : {1, 2, 5}) {
      std::vector<double> nodes(K);
      for (int k = 0; k < K; ++k) nodes[k] = -0.9 + 1.8 * k / std::max(1, K);
      const Quadrature qq(JacobiWeight(2, 2), 3, nodes);
      EXPECT_EQ(product(base_s1(M - 1), base_s1(2), qq, true).size(), static_cast<std::size_t>(K * M * 3));
    }
}

TEST(Product, DegreeIsMinimum) {
  const Quadrature q = certified_rule(2, 2, 3, {-1 / std::sqrt(3.0), 1 / std::sqrt(3.0)});
  EXPECT_EQ(product(base_s1(5), base_s1(7), q).degree(), 3);
  EXPECT_EQ(product(base_s1(2), base_s1(7), q).degree(), 2);
  EXPECT_EQ(product(base_s1(5), base_s1(1), q).degree(), 1);
}

TEST(Product, UnitNormPreserved) {
  Quadrature q(JacobiWeight(3, 2), 2, {-0.999, -0.5, 0.0, 0.123456789, 0.77, 1.0});
  const Design s2 = product(base_s1(3, 0.4), base_s0(3), Quadrature(JacobiWeight(2, 1), 3, {-0.3, 0.6}), true);
  const Design d = product(s2, base_s1(6, 1.1), q, true);
  ASSERT_EQ(d.ambient_dim(), 5);
  for (Eigen::Index r = 0; r < d.points().rows(); ++r) {
    EXPECT_NEAR(d.points().row(r).norm(), 1.0, 2e-16 * 5) << r;
  }
}

TEST(Product, Errors) {
  const Quadrature q = certified_rule(2, 1, 1, {-1.0 / 3.0});
  EXPECT_THROW(product(base_s0(1), base_s0(1), q), std::invalid_argument);
  EXPECT_THROW(product(base_s1(1), base_s1(1), q), std::invalid_argument);
  const Quadrature bad(JacobiWeight(2, 1), 1, {0.0});
  EXPECT_THROW(product(base_s1(1), base_s0(1), bad), std::invalid_argument);
  EXPECT_NO_THROW(product(base_s1(1), base_s0(1), bad, true));
}

TEST(ASequence, KnownValues) {
  const std::int64_t expected[] = {1, 3, 4, 7, 9, 11, 12, 16, 19, 22};
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(a_sequence(n), expected[n - 1]) << n;
  EXPECT_EQ(a_sequence(15), 32);
  EXPECT_THROW(a_sequence(0), std::invalid_argument);
}

TEST(ASequence, RecursionAndPowerOfTwoIdentity) {
  for (std::int64_t k = 2; k <= 200; ++k) {
    EXPECT_EQ(a_sequence(2 * k - 1), 2 * a_sequence(k - 1) + k);
    EXPECT_EQ(a_sequence(2 * k), a_sequence(k - 1) + a_sequence(k) + k + 1);
  }
  for (std::int64_t k = 1; k <= 20; ++k) {
    EXPECT_EQ(a_sequence((std::int64_t{1} << k) - 1), k * (std::int64_t{1} << (k - 1))) << k;
  }
  for (int n = 11; n <= 64; ++n) EXPECT_LT(a_sequence(n), n / 2.0 * std::log2(2.0 * n)) << n;
}

TEST(LowerBound, Examples) {
  EXPECT_EQ(lower_bound(2, 4), 9u);
  EXPECT_EQ(lower_bound(2, 3), 6u);
  EXPECT_EQ(lower_bound(5, 0), 1u);
  EXPECT_EQ(lower_bound(0, 6), 2u);
  for (int t = 1; t <= 30; ++t) EXPECT_EQ(lower_bound(1, t), static_cast<std::uint64_t>(t + 1));
}

TEST(LowerBound, MatchesBinomialFormula) {
  for (int n = 1; n <= 12; ++n) {
    for (int t = 0; t <= 20; ++t) {
      const int k = t / 2;
      const std::uint64_t expected =
          t % 2 == 0 ? pascal(n + k, n) + pascal(n + k - 1, n) : 2 * pascal(n + k, n);
      EXPECT_EQ(lower_bound(n, t), expected) << n << "," << t;
    }
  }
  EXPECT_THROW(lower_bound(-1, 2), std::invalid_argument);
}

TEST(Plan, Examples) {
  const BuildPlan s1 = plan(1, 7);
  ASSERT_EQ(s1.nodes.size(), 1u);
  EXPECT_TRUE(s1.nodes[s1.root].leaf());
  EXPECT_EQ(s1.nodes[s1.root].ambient_dim, 2);

  const BuildPlan s2 = plan(2, 3);
  const PlanNode& r2 = s2.nodes[s2.root];
  ASSERT_FALSE(r2.leaf());
  EXPECT_EQ(s2.nodes[r2.m_child].ambient_dim, 2);
  EXPECT_EQ(s2.nodes[r2.n_child].ambient_dim, 1);

  const BuildPlan s3 = plan(3, 2);
  const PlanNode& r3 = s3.nodes[s3.root];
  EXPECT_EQ(s3.nodes[r3.m_child].ambient_dim, 2);
  EXPECT_EQ(s3.nodes[r3.n_child].ambient_dim, 2);

  const BuildPlan s4 = plan(4, 2);
  const PlanNode& r4 = s4.nodes[s4.root];
  EXPECT_EQ(s4.nodes[r4.m_child].ambient_dim, 2);
  EXPECT_EQ(s4.nodes[r4.n_child].ambient_dim, 3);
}

TEST(Plan, StructureAndSplits) {
  for (int n = 1; n <= 20; ++n) {
    const BuildPlan p = plan(n, 2);
    EXPECT_EQ(p.sphere_dim, n);
    EXPECT_EQ(p.nodes[p.root].ambient_dim, n + 1);
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      const PlanNode& node = p.nodes[i];
      if (node.leaf()) {
        EXPECT_LE(node.ambient_dim, 2);
        continue;
      }
      ASSERT_LT(node.m_child, static_cast<int>(i));
      ASSERT_LT(node.n_child, static_cast<int>(i));
      const int m = p.nodes[node.m_child].ambient_dim, nn = p.nodes[node.n_child].ambient_dim;
      EXPECT_EQ(m + nn, node.ambient_dim);
      EXPECT_LE(std::abs(m - nn), 1);
    }
  }
}

TEST(Plan, Overrides) {
  const BuildPlan p = plan(4, 2, {{5, {1, 4}}});
  const PlanNode& r = p.nodes[p.root];
  EXPECT_EQ(p.nodes[r.m_child].ambient_dim, 1);
  EXPECT_EQ(p.nodes[r.n_child].ambient_dim, 4);
  EXPECT_THROW(plan(4, 2, {{5, {2, 2}}}), std::invalid_argument);
  EXPECT_THROW(plan(4, 2, {{5, {0, 5}}}), std::invalid_argument);
  EXPECT_THROW(plan(-1, 2), std::invalid_argument);
  EXPECT_THROW(plan(2, -1), std::invalid_argument);
}

TEST(Build, Examples) {
  const BuildResult s2 = build(plan(2, 1));
  EXPECT_EQ(s2.design.size(), 4u);
  EXPECT_LE(s2.report.residual, 1e-12);
  EXPECT_TRUE(s2.report.passed);

  const BuildResult s3 = build(plan(3, 2));
  const NodeReport& root = s3.report.nodes[s3.report.root];
  EXPECT_EQ(root.M, 3u);
  EXPECT_EQ(root.N, 3u);
  EXPECT_EQ(s3.design.size(), 9 * root.K);
  EXPECT_TRUE(verify(s3.design, 2, 1e-9).passed);

  const BuildResult s1 = build(plan(1, 7));
  EXPECT_EQ(s1.design.size(), 8u);
  EXPECT_EQ(s1.report.nodes.size(), 1u);
}

TEST(Build, ReportInvariants) {
  for (auto [n, t] : {std::pair{2, 5}, {3, 4}, {4, 3}, {5, 2}, {7, 2}}) {
    const BuildResult r = build(plan(n, t));
    const BuildReport& rep = r.report;
    EXPECT_EQ(rep.cardinality, r.design.size());
    EXPECT_EQ(rep.predicted_exponent, a_sequence(n));
    EXPECT_EQ(rep.lower_bound, lower_bound(n, t));
    EXPECT_GE(rep.cardinality, rep.lower_bound);
    for (const NodeReport& node : rep.nodes) {
      EXPECT_TRUE(node.passed);
      if (!node.leaf) {
        EXPECT_EQ(node.M, rep.nodes[node.m_child].cardinality);
        EXPECT_EQ(node.N, rep.nodes[node.n_child].cardinality);
        EXPECT_EQ(node.cardinality, node.K * node.M * node.N);
        EXPECT_LE(node.quadrature_residual, 1e-12);
      }
    }
    for (Eigen::Index i = 0; i < r.design.points().rows(); ++i) {
      EXPECT_NEAR(r.design.points().row(i).norm(), 1.0, 2e-16 * (n + 1));
    }
  }
}

class FakeStore : public QuadratureStore {
 public:
  explicit FakeStore(std::optional<Quadrature> answer) : answer_(std::move(answer)) {}
  std::optional<Quadrature> lookup(const JacobiWeight&, int, double) override {
    ++lookups;
    return answer_;
  }
  void store(const Quadrature&) override { ++stores; }
  int lookups = 0;
  int stores = 0;

 private:
  std::optional<Quadrature> answer_;
};

TEST(Build, UsesStoreAndReportsHits) {
  FakeStore empty(std::nullopt);
  BuildOptions opts;
  opts.cache = &empty;
  const BuildResult first = build(plan(2, 3), opts);
  EXPECT_EQ(empty.lookups, 1);
  EXPECT_EQ(empty.stores, 1);
  EXPECT_FALSE(first.report.nodes[first.report.root].cache_hit);

  FakeStore full(solve_equal_weight(JacobiWeight(2, 1), 3).quadrature);
  opts.cache = &full;
  const BuildResult second = build(plan(2, 3), opts);
  EXPECT_TRUE(second.report.nodes[second.report.root].cache_hit);
  EXPECT_EQ(full.stores, 0);
  EXPECT_EQ(second.design.points(), first.design.points());
}

TEST(Build, FailedVerificationIdentifiesNode) {
  // A wrong rule that claims certification slips past product() but not verify().
  Quadrature wrong(JacobiWeight(2, 1), 3, {-0.5, 0.5});
  wrong.set_certification(true, 1e-12, 0.0);
  FakeStore liar(wrong);
  BuildOptions opts;
  opts.cache = &liar;
  try {
    build(plan(2, 3), opts);
    FAIL() << "expected BuildFailed";
  } catch (const BuildFailed& e) {
    const BuildReport& rep = e.report();
    ASSERT_EQ(rep.failed_node, rep.root);
    EXPECT_FALSE(rep.nodes[rep.failed_node].passed);
    EXPECT_GT(rep.nodes[rep.failed_node].residual, opts.design_tolerance);
    EXPECT_FALSE(rep.passed);
  }
}

TEST(Build, PropagatesNoConvergence) {
  BuildOptions opts;
  opts.solver.max_K = 2;
  EXPECT_THROW(build(plan(2, 8), opts), NoConvergence);
}

}  // namespace
}  // namespace designforge
