#include <gtest/gtest.h>

#include "subflow/error.hpp"
#include "subflow/submodular.hpp"
#include "subflow/oracle.hpp"

namespace subflow {
namespace {

using oracle::Rng;

std::vector<double> all_values(const SubmodularSpec& f) {
  std::vector<double> v;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << f.size()); ++m) {
    v.push_back(f.evaluate(GroundSubset::from_mask(m, f.size())));
  }
  return v;
}

FlowNetwork diamond() {
  return build_network(2, 0, std::vector<Edge>{{0, 2, Capacity(3)},
                                               {2, 1, Capacity(2)},
                                               {0, 3, Capacity(1)},
                                               {3, 1, Capacity(4)},
                                               {2, 3, Capacity(1)}});
}

FlowNetwork two_cycle() {
  return build_network(2, 0, std::vector<Edge>{{2, 3, Capacity(1)}, {3, 2, Capacity(1)}});
}

// tau(S) = -d(S) + sum_j min(y_j, w^j(S)), evaluated straight from the formula.
double tau_direct(const oracle::DecomposableData& data, std::uint64_t mask) {
  double v = 0.0;
  const int n = static_cast<int>(data.d.size());
  for (int i = 0; i < n; ++i) {
    if (mask >> i & 1U) v -= data.d[i];
  }
  for (std::size_t j = 0; j < data.w.size(); ++j) {
    double ws = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1U) ws += data.w[j][i];
    }
    v += std::min(data.y[static_cast<Eigen::Index>(j)], ws);
  }
  return v;
}

TEST(Spec, GeneralizedCutOnDiamond) {
  const SubmodularSpec f = from_generalized_cut(diamond());
  EXPECT_EQ(f.offset(), 4.0);
  EXPECT_EQ(all_values(f), (std::vector<double>{0, 0, 3, 2}));
}

TEST(Spec, GeneralizedCutMatchesEnumeration) {
  Rng rng(21);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 6);
    const FlowNetwork net = oracle::random_network(rng, n, oracle::uniform_int(rng, 0, 4));
    const SubmodularSpec f = from_generalized_cut(net);
    const double empty = oracle::naive_generalized_cut(net, 0);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      EXPECT_DOUBLE_EQ(f.evaluate(GroundSubset::from_mask(m, n)), oracle::naive_generalized_cut(net, m) - empty);
    }
  }
}

TEST(Spec, TransformedCutTwoCycle) {
  const SubmodularSpec f = from_transformed_cut(two_cycle(), Eigen::Vector2d(-2, 3));
  EXPECT_EQ(all_values(f), (std::vector<double>{0, -1, 4, 1}));
}

TEST(Spec, TransformedCutAllNegativeUsesSourceEdgesOnly) {
  const SubmodularSpec f = from_transformed_cut(two_cycle(), Eigen::Vector2d(-1, -2));
  for (const Edge& e : f.network().edges()) EXPECT_NE(e.head, FlowNetwork::kSink);
  EXPECT_EQ(all_values(f), (std::vector<double>{0, 0, -1, -3}));
}

TEST(Spec, DecomposableHandExample) {
  const std::vector<Eigen::VectorXd> w{Eigen::Vector2d(2, 2)};
  const SubmodularSpec f = from_decomposable(Eigen::Vector2d(1, 1), w, Eigen::VectorXd::Constant(1, 3));
  EXPECT_EQ(all_values(f), (std::vector<double>{0, 1, 1, 1}));
}

TEST(Spec, DecomposableFigureTopology) {
  std::vector<Eigen::VectorXd> w(3, Eigen::VectorXd::Ones(4));
  const SubmodularSpec f = from_decomposable(Eigen::VectorXd::Ones(4), w, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(f.network().edges().size(), 19U);
  EXPECT_EQ(f.network().aux_count(), 3);
}

TEST(Spec, DecomposableMatchesFormula) {
  Rng rng(22);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 7);
    const auto data = oracle::random_decomposable(rng, n, oracle::uniform_int(rng, 0, 4));
    const SubmodularSpec f = from_decomposable(data.d, data.w, data.y);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      EXPECT_NEAR(f.evaluate(GroundSubset::from_mask(m, n)), tau_direct(data, m), 1e-12);
    }
  }
}

TEST(Spec, DecomposableValidation) {
  const std::vector<Eigen::VectorXd> w{Eigen::Vector2d(1, 1)};
  auto code = [&](const Eigen::VectorXd& d, const std::vector<Eigen::VectorXd>& ws, const Eigen::VectorXd& y) {
    try {
      from_decomposable(d, ws, y);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kUsageError;
  };
  EXPECT_EQ(code(Eigen::Vector2d(0, 1), w, Eigen::VectorXd::Ones(1)), Errc::kNonPositiveD);
  EXPECT_EQ(code(Eigen::Vector2d(1, 1), w, Eigen::VectorXd::Zero(1)), Errc::kNonPositiveThreshold);
  EXPECT_EQ(code(Eigen::Vector2d(1, 1), {Eigen::Vector2d(-1, 1)}, Eigen::VectorXd::Ones(1)), Errc::kNegativeWeight);
}

TEST(Spec, NegatedDensity) {
  const std::vector<WeightedEdge> single{{0, 1, 2.0}};
  const SubmodularSpec f = from_negated_density(2, single);
  EXPECT_EQ(f.evaluate(GroundSubset{0, 1}), -2.0);
  EXPECT_EQ(f.evaluate(GroundSubset{0}), 0.0);

  const std::vector<WeightedEdge> triangle{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
  const SubmodularSpec g = from_negated_density(3, triangle);
  for (std::uint64_t m = 0; m < 8; ++m) {
    const GroundSubset s = GroundSubset::from_mask(m, 3);
    EXPECT_EQ(g.evaluate(s), -induced_weight(triangle, s));
  }
  EXPECT_EQ(all_values(from_negated_density(3, std::vector<WeightedEdge>{})), std::vector<double>(8, 0.0));
}

TEST(Spec, NondecreasingShift) {
  const SubmodularSpec f = from_transformed_cut(two_cycle(), Eigen::Vector2d(-2, 3));
  const ShiftedSpec shifted = nondecreasing_shift(f, Eigen::Vector2d(1, 1));
  EXPECT_EQ(shifted.beta, 3.0);
  EXPECT_EQ(all_values(shifted.spec), (std::vector<double>{0, 2, 7, 7}));

  const SubmodularSpec mono = from_decomposable(Eigen::Vector2d(1, 1), std::vector<Eigen::VectorXd>{},
                                                Eigen::VectorXd(0));
  const SubmodularSpec up = mono.shifted(Eigen::Vector2d(3, 3));
  EXPECT_EQ(nondecreasing_shift(up, Eigen::Vector2d(1, 1)).beta, 0.0);
}

TEST(Spec, ShiftRealizesBetaB) {
  Rng rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 7);
    const SubmodularSpec f = from_transformed_cut(oracle::random_ground_graph(rng, n),
                                                  oracle::random_integer_vector(rng, n, -8, 8));
    const Eigen::VectorXd b = oracle::random_integer_vector(rng, n, 1, 4);
    const ShiftedSpec s = nondecreasing_shift(f, b);
    const auto gains = removal_gains(s.spec);
    for (int i = 0; i < n; ++i) EXPECT_LE(gains[i], 1e-12);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const GroundSubset S = GroundSubset::from_mask(m, n);
      double bs = 0.0;
      for (int i : S) bs += b[i];
      EXPECT_NEAR(s.spec.evaluate(S), f.evaluate(S) + s.beta * bs, 1e-9);
    }
  }
}

TEST(Lovasz, Identities) {
  // path 1 - 2 with unit weight in both directions
  const FlowNetwork path = build_network(2, 0, std::vector<Edge>{{2, 3, Capacity(1)}, {3, 2, Capacity(1)}});
  const SubmodularSpec f = from_generalized_cut(path);
  EXPECT_EQ(lovasz_extension(f, Eigen::Vector2d(2, 0)), 2.0);

  Rng rng(24);
  const SubmodularSpec g = from_generalized_cut(oracle::random_network(rng, 5, 2));
  for (std::uint64_t m = 0; m < 32; ++m) {
    Eigen::VectorXd z(5);
    for (int i = 0; i < 5; ++i) z[i] = (m >> i & 1U) ? 1.0 : 0.0;
    EXPECT_NEAR(lovasz_extension(g, z), g.evaluate(GroundSubset::from_mask(m, 5)), 1e-12);
  }
  EXPECT_NEAR(lovasz_extension(g, Eigen::VectorXd::Constant(5, 2.5)), 2.5 * g.evaluate(GroundSubset::full(5)),
              1e-12);
}

TEST(Lovasz, GraphAndGenericGreedyAgree) {
  Rng rng(25);
  for (int rep = 0; rep < 30; ++rep) {
    const SubmodularSpec f = from_transformed_cut(oracle::random_ground_graph(rng, 6),
                                                  oracle::random_integer_vector(rng, 6, -5, 5));
    std::vector<int> order{0, 1, 2, 3, 4, 5};
    std::shuffle(order.begin(), order.end(), rng);
    const TableFunction t = tabulate(f);
    EXPECT_TRUE(greedy_vertex(f, order).isApprox(greedy_vertex(t, order), 1e-12) ||
                (greedy_vertex(f, order) - greedy_vertex(t, order)).norm() < 1e-12);
  }
}

TEST(BruteForce, MinimizerTies) {
  const SubmodularSpec f = from_transformed_cut(two_cycle(), Eigen::Vector2d(-2, 3));
  const BruteForceMin r = brute_force_min(f, Eigen::Vector2d::Zero());
  EXPECT_EQ(r.value, -1.0);
  EXPECT_EQ(r.minimal, (GroundSubset{0}));
  EXPECT_EQ(r.maximal, (GroundSubset{0}));

  const TableFunction modular(3, {0, -1, 0, -1, 2, 1, 2, 1});  // a = (-1, 0, 2)
  const BruteForceMin t = brute_force_min(modular, Eigen::Vector3d::Zero());
  EXPECT_EQ(t.minimal, (GroundSubset{0}));
  EXPECT_EQ(t.maximal, (GroundSubset{0, 1}));
}

TEST(Submodularity, ConstructorsPassAndSupermodularFails) {
  Rng rng(26);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = oracle::uniform_int(rng, 1, 7);
    const auto data = oracle::random_decomposable(rng, n, 3);
    EXPECT_TRUE(check_submodular(from_decomposable(data.d, data.w, data.y)));
    EXPECT_TRUE(check_submodular(from_transformed_cut(oracle::random_ground_graph(rng, n),
                                                      oracle::random_integer_vector(rng, n, -5, 5))));
  }
  const std::vector<WeightedEdge> triangle{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
  std::vector<double> theta;
  for (std::uint64_t m = 0; m < 8; ++m) theta.push_back(induced_weight(triangle, GroundSubset::from_mask(m, 3)));
  EXPECT_FALSE(check_submodular(TableFunction(3, theta)));
}

TEST(Submodularity, RejectsLargeGroundSet) {
  const SubmodularSpec f = from_negated_density(13, std::vector<WeightedEdge>{});
  EXPECT_THROW(check_submodular(f), Error);
}

}  // namespace
}  // namespace subflow
