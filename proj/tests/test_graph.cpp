#include <gtest/gtest.h>

#include "subflow/error.hpp"
#include "subflow/graph.hpp"
#include "subflow/oracle.hpp"

namespace subflow {
namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::kUsageError;
}

TEST(BuildNetwork, MergesParallelEdgesAndDropsSelfLoops) {
  const std::vector<Edge> edges{{0, 2, Capacity(1)}, {2, 2, Capacity(5)}, {0, 2, Capacity(2.5)}, {2, 1, Capacity(1)}};
  const FlowNetwork net = build_network(1, 0, edges);
  ASSERT_EQ(net.edges().size(), 2U);
  EXPECT_EQ(net.edges()[0], (Edge{0, 2, Capacity(3.5)}));
  EXPECT_EQ(net.edges()[1], (Edge{2, 1, Capacity(1)}));
}

TEST(BuildNetwork, RejectsBadInput) {
  EXPECT_EQ(code_of([] { build_network(1, 0, std::vector<Edge>{{0, 2, Capacity(-1)}}); }), Errc::kNegativeCapacity);
  EXPECT_EQ(code_of([] { build_network(1, 0, std::vector<Edge>{{0, 3, Capacity(1)}}); }), Errc::kDanglingEndpoint);
  EXPECT_EQ(code_of([] { build_network(1, 0, std::vector<Edge>{{0, 2, Capacity(std::nan(""))}}); }),
            Errc::kNegativeCapacity);
}

TEST(BuildNetwork, InfiniteCapacityIsASentinel) {
  const FlowNetwork net = build_network(1, 0, std::vector<Edge>{{0, 2, Capacity::infinite()}, {0, 2, Capacity(3)}});
  EXPECT_TRUE(net.edges()[0].capacity.is_infinite());
  EXPECT_EQ(net.max_finite_capacity(), 0.0);
}

TEST(TerminalEdges, AddAndValidate) {
  const FlowNetwork base = build_network(2, 0, std::vector<Edge>{{2, 3, Capacity(1)}});
  const FlowNetwork minus = add_source_adjacent(base, Eigen::Vector2d(2, 0));
  ASSERT_EQ(minus.edges().size(), 2U);
  EXPECT_EQ(minus.edges()[0], (Edge{0, 2, Capacity(2)}));
  const FlowNetwork plus = add_sink_adjacent(base, Eigen::Vector2d(0, 4));
  EXPECT_EQ(plus.edges()[1], (Edge{3, 1, Capacity(4)}));
  EXPECT_EQ(code_of([&] { add_sink_adjacent(base, Eigen::Vector2d(-1, 0)); }), Errc::kNegativeWeight);
  EXPECT_EQ(code_of([&] { add_sink_adjacent(base, Eigen::Vector3d(1, 1, 1)); }), Errc::kInvalidDims);
}

TEST(Contract, PinsNodesAndRejectsOverlap) {
  const FlowNetwork base = build_network(3, 0, std::vector<Edge>{{2, 3, Capacity(1)}});
  const FlowNetwork c = contract(base, GroundSubset{0}, GroundSubset{2});
  int infinite = 0;
  for (const Edge& e : c.edges()) infinite += e.capacity.is_infinite();
  EXPECT_EQ(infinite, 2);
  EXPECT_EQ(code_of([&] { contract(base, GroundSubset{1}, GroundSubset{1, 2}); }), Errc::kOverlappingForcedSets);
}

TEST(CutCapacity, MatchesDirectSum) {
  oracle::Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const FlowNetwork net = oracle::random_network(rng, 4, 2);
    std::vector<char> side(static_cast<std::size_t>(net.node_count()), 0);
    for (std::size_t v = 2; v < side.size(); ++v) side[v] = static_cast<char>(rng() & 1U);
    EXPECT_DOUBLE_EQ(cut_capacity(net, side).value(), oracle::naive_cut(net, side));
  }
}

constexpr const char* kDiamond =
    "c diamond\n"
    "p max 4 5\n"
    "n 1 s\n"
    "n 4 t\n"
    "a 1 2 3\n"
    "a 2 4 2\n"
    "a 1 3 1\n"
    "a 3 4 4\n"
    "a 2 3 1\n";

TEST(Dimacs, ParsesDiamond) {
  const FlowNetwork net = parse_dimacs(std::string(kDiamond));
  EXPECT_EQ(net.ground_count(), 2);
  EXPECT_EQ(net.aux_count(), 0);
  EXPECT_EQ(net.edges().size(), 5U);
  // file node 2 is ground 0, node 3 is ground 1
  EXPECT_EQ(net.edges()[0], (Edge{0, 2, Capacity(3)}));
}

TEST(Dimacs, RoleDirectivesAndInfinity) {
  const FlowNetwork net = parse_dimacs(std::string(
      "p max 4 3\nn 1 s\nn 2 t\nc aux 3\na 1 3 inf\na 3 4 2\na 4 2 1\n"));
  EXPECT_EQ(net.ground_count(), 1);
  EXPECT_EQ(net.aux_count(), 1);
  bool saw_inf = false;
  for (const Edge& e : net.edges()) saw_inf = saw_inf || e.capacity.is_infinite();
  EXPECT_TRUE(saw_inf);
}

TEST(Dimacs, RoundTrip) {
  oracle::Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const FlowNetwork net = oracle::random_network(rng, 5, rep % 3);
    EXPECT_EQ(parse_dimacs(write_dimacs(net)), net);
  }
}

TEST(Dimacs, Errors) {
  EXPECT_EQ(code_of([] { parse_dimacs(std::string("n 1 s\n")); }), Errc::kMalformedHeader);
  EXPECT_EQ(code_of([] { parse_dimacs(std::string("p max 2 1\nn 1 s\nn 2 t\na 1 2 1\na 1 2 1\n")); }),
            Errc::kMalformedHeader);
  EXPECT_EQ(code_of([] { parse_dimacs(std::string("p max 2 0\nn 1 s\nx 1\n")); }), Errc::kUnknownLineType);
  EXPECT_EQ(code_of([] { parse_dimacs(std::string("p max 2 0\nn 1 s\n")); }), Errc::kMissingTerminal);
  EXPECT_EQ(code_of([] { parse_dimacs(std::string("p max 2 1\nn 1 s\nn 2 t\na 1 5 1\n")); }),
            Errc::kDanglingEndpoint);
  EXPECT_EQ(code_of([] { parse_dimacs(std::string("p max 2 1\nn 1 s\nn 2 t\na 1 2 -3\n")); }),
            Errc::kNegativeCapacity);
}

}  // namespace
}  // namespace subflow
