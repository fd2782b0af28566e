#include <gtest/gtest.h>

#include "subflow/decomposition.hpp"
#include "subflow/error.hpp"
#include "subflow/oracle.hpp"

namespace subflow {
namespace {

using oracle::Rng;

// f = (0, 1, 3, 3) realized as a generalized cut: 1 -> u (1), 2 -> u (3), u -> t (3).
SubmodularSpec two_element_spec() {
  return from_generalized_cut(
      build_network(2, 1, std::vector<Edge>{{2, 4, Capacity(1)}, {3, 4, Capacity(3)}, {4, 1, Capacity(3)}}));
}

std::vector<GroundSubset> chain_sets(const Chain& c) {
  std::vector<GroundSubset> out;
  for (int j = 0; j <= c.length(); ++j) out.push_back(c.set(j));
  return out;
}

void expect_same_chain(const Chain& a, const Chain& b) {
  EXPECT_EQ(chain_sets(a), chain_sets(b));
  ASSERT_EQ(a.breakpoints.size(), b.breakpoints.size());
  for (std::size_t j = 0; j < a.breakpoints.size(); ++j) {
    EXPECT_NEAR(a.breakpoints[j], b.breakpoints[j], 1e-9 * (1 + std::abs(b.breakpoints[j])));
  }
}

void expect_valid_chain(const Chain& c, int n, bool check_budget = true) {
  ASSERT_EQ(c.ends.front(), 0);
  ASSERT_EQ(c.ends.back(), n);
  for (int j = 0; j < c.length(); ++j) EXPECT_LT(c.ends[j], c.ends[j + 1]);
  for (int j = 1; j < c.length(); ++j) EXPECT_LT(c.breakpoints[j - 1], c.breakpoints[j]);
  if (check_budget) EXPECT_LE(c.minimization_count, std::max(0, 2 * n - 1));
}

TEST(Decompose, TwoElementExample) {
  const SubmodularSpec f = two_element_spec();
  ASSERT_EQ(tabulate(f).values()[3], 3.0);
  const Chain c = decompose(f, Eigen::Vector2d(1, 1));
  EXPECT_EQ(chain_sets(c), (std::vector<GroundSubset>{{}, {0}, {0, 1}}));
  EXPECT_EQ(c.breakpoints, (std::vector<double>{1.0, 2.0}));
  const BaseVector x = base_from_chain(c, Eigen::Vector2d(1, 1));
  EXPECT_EQ(x.x, Eigen::Vector2d(1, 2));

  const TableFunction t(2, {0, 1, 3, 3});
  expect_same_chain(decompose(t, Eigen::Vector2d(1, 1)), c);
  expect_same_chain(brute_force_chain(t, Eigen::Vector2d(1, 1)), c);
}

TEST(Decompose, ModularGivesSingleBlock) {
  const Eigen::VectorXd b = Eigen::Vector3d(1, 2, 4);
  const SubmodularSpec f = from_decomposable(Eigen::Vector3d(1, 1, 1), std::vector<Eigen::VectorXd>{},
                                             Eigen::VectorXd(0))
                               .shifted(Eigen::Vector3d(1, 1, 1) + 1.5 * b);
  const Chain c = decompose(f, b);
  EXPECT_EQ(c.length(), 1);
  EXPECT_EQ(c.minimization_count, 1);
  const BaseVector x = base_from_chain(c, b);
  EXPECT_TRUE(x.x.isApprox(1.5 * b));
}

TEST(Decompose, EmptyGroundSet) {
  const SubmodularSpec f = from_generalized_cut(build_network(0, 0, std::vector<Edge>{}));
  const Chain c = decompose(f, Eigen::VectorXd(0));
  EXPECT_EQ(c.length(), 0);
  EXPECT_EQ(base_from_chain(c, Eigen::VectorXd(0)).x.size(), 0);
}

TEST(Decompose, RejectsBadWeights) {
  const SubmodularSpec f = two_element_spec();
  EXPECT_THROW(decompose(f, Eigen::Vector2d(1, 0)), Error);
  EXPECT_THROW(decompose(f, Eigen::Vector3d(1, 1, 1)), Error);
}

TEST(Decompose, MatchesBruteForceOnRandomGeneralizedCuts) {
  Rng rng(31);
  for (int rep = 0; rep < 120; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 7);
    const FlowNetwork net = oracle::random_network(rng, n, oracle::uniform_int(rng, 0, 4));
    const SubmodularSpec f = from_generalized_cut(net);
    const Eigen::VectorXd b = oracle::random_integer_vector(rng, n, 1, 3);
    const Chain c = decompose(f, b);
    expect_valid_chain(c, n);
    expect_same_chain(c, brute_force_chain(f, b));
    expect_same_chain(c, decompose(tabulate(f), b));
    expect_same_chain(c, decompose(f, b, {.allow_exact = false}));
  }
}

TEST(Decompose, MatchesBruteForceOnDecomposable) {
  Rng rng(32);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 8);
    const auto data = oracle::random_decomposable(rng, n, oracle::uniform_int(rng, 0, 4));
    const SubmodularSpec f = from_decomposable(data.d, data.w, data.y);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
    const ShiftedSpec g = nondecreasing_shift(f, b);
    const Chain c = decompose(g.spec, b);
    expect_valid_chain(c, n);
    expect_same_chain(c, brute_force_chain(g.spec, b));
  }
}

TEST(Decompose, FractionalWeightsUseFloatPath) {
  Rng rng(33);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = oracle::uniform_int(rng, 2, 7);
    const SubmodularSpec f = from_transformed_cut(oracle::random_ground_graph(rng, n),
                                                  oracle::random_integer_vector(rng, n, -6, 6));
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = oracle::uniform_real(rng, 0.3, 2.0);
    const Chain c = decompose(f, b);
    expect_valid_chain(c, n);
    expect_same_chain(c, brute_force_chain(f, b));
  }
}

TEST(Base, MembershipAndOptimality) {
  Rng rng(34);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 7);
    const SubmodularSpec f = from_generalized_cut(oracle::random_network(rng, n, 2));
    const Eigen::VectorXd b = oracle::random_integer_vector(rng, n, 1, 3);
    const BaseVector x = base_from_chain(decompose(f, b), b);
    const TableFunction t = tabulate(f);
    EXPECT_LE(oracle::base_violation(t, x.x), 1e-9);
    EXPECT_NEAR(x.x.sum(), t.at((std::uint64_t{1} << n) - 1), 1e-9);
    const double best = objective_value(ObjectiveVariant::quadratic_over_b(), x.x, b);
    for (int k = 0; k < 500; ++k) {
      const Eigen::VectorXd y = oracle::random_base_point(rng, t, 1 + k % 4);
      EXPECT_GE(objective_value(ObjectiveVariant::quadratic_over_b(), y, b), best - 1e-9);
    }
  }
}

TEST(Base, ShiftConsistency) {
  Rng rng(35);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 7);
    const SubmodularSpec f = from_transformed_cut(oracle::random_ground_graph(rng, n),
                                                  oracle::random_integer_vector(rng, n, -6, 6));
    const Eigen::VectorXd b = oracle::random_integer_vector(rng, n, 1, 3);
    const double beta = oracle::uniform_int(rng, 1, 5);
    const BaseVector plain = base_from_chain(decompose(f, b), b);
    const BaseVector moved = base_from_chain(decompose(f.shifted(beta * b), b), b);
    EXPECT_TRUE(((moved.x - beta * b) - plain.x).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST(Base, MergesTiedRatios) {
  Chain c;
  c.order = {0, 1, 2};
  c.ends = {0, 1, 2, 3};
  c.breakpoints = {1.0, 1.0, 2.0};
  const BaseVector x = base_from_chain(c, Eigen::Vector3d(1, 1, 1));
  EXPECT_EQ(x.blocks, (std::vector<std::vector<int>>{{0, 1}, {2}}));
  EXPECT_EQ(x.ratios, (std::vector<double>{1.0, 2.0}));
}

TEST(Family, VariantsShareTheOptimum) {
  const SubmodularSpec f = two_element_spec();
  const Eigen::VectorXd b = Eigen::Vector2d(1, 1);
  const TableFunction t = tabulate(f);
  for (const ObjectiveVariant& v : {ObjectiveVariant::quadratic_over_b(), ObjectiveVariant::power(1.0),
                                    ObjectiveVariant::log_barrier(), ObjectiveVariant::kl()}) {
    const BaseVector x = solve_family(f, b, v);
    EXPECT_EQ(x.x, Eigen::Vector2d(1, 2));
  }
  Rng rng(36);
  const double at_opt = objective_value(ObjectiveVariant::log_barrier(), Eigen::Vector2d(1, 2), b);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd y = oracle::random_base_point(rng, t, 2);
    if ((y.array() > 0).all()) EXPECT_LE(objective_value(ObjectiveVariant::log_barrier(), y, b), at_opt + 1e-9);
  }
}

TEST(Family, PositivityAndParameterChecks) {
  // f = (0, -1, 4, 1) has a negative first block ratio
  const SubmodularSpec f = from_transformed_cut(
      build_network(2, 0, std::vector<Edge>{{2, 3, Capacity(1)}, {3, 2, Capacity(1)}}), Eigen::Vector2d(-2, 3));
  const Eigen::VectorXd b = Eigen::Vector2d(1, 1);
  EXPECT_NO_THROW(solve_family(f, b, ObjectiveVariant::quadratic_over_b()));
  try {
    solve_family(f, b, ObjectiveVariant::log_barrier());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kPositivityViolated);
  }
  EXPECT_THROW(solve_family(f, b, ObjectiveVariant::power(-1.0)), Error);
  EXPECT_THROW(solve_family(f, b, ObjectiveVariant::perspective({})), Error);
}

TEST(BruteForceChain, NestedOnRandomTables) {
  Rng rng(37);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 5);
    const SubmodularSpec f = from_transformed_cut(oracle::random_ground_graph(rng, n),
                                                  oracle::random_integer_vector(rng, n, -6, 6));
    const Chain c = brute_force_chain(f, oracle::random_integer_vector(rng, n, 1, 3));
    expect_valid_chain(c, n, false);
  }
}

TEST(Audit, CountsRuns) {
  const auto before = decomposition_audit();
  decompose(two_element_spec(), Eigen::Vector2d(1, 1));
  const auto after = decomposition_audit();
  EXPECT_EQ(after.runs, before.runs + 1);
  EXPECT_EQ(after.budget_violations, 0U);
}

// Whatever ran in this process, no decomposition may exceed 2n - 1 minimizations.
class BudgetAudit : public ::testing::Environment {
 public:
  void TearDown() override { EXPECT_EQ(decomposition_audit().budget_violations, 0U); }
};
const auto* const kBudgetAudit = ::testing::AddGlobalTestEnvironment(new BudgetAudit);

}  // namespace
}  // namespace subflow
