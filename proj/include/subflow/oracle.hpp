#pragma once

// Random instance generators and enumeration oracles for small instances,
// shared by the self-test, the unit tests and the acceptance suite. Everything
// here is deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "subflow/apps.hpp"
#include "subflow/graph.hpp"
#include "subflow/submodular.hpp"

namespace subflow::oracle {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random network over s, t, n ground and n_aux auxiliary nodes; every ordered
/// pair gets an integer capacity in [1, max_cap] with probability density.
inline FlowNetwork random_network(Rng& rng, int n, int n_aux, double density = 0.35, int max_cap = 20) {
  const int nodes = 2 + n + n_aux;
  std::bernoulli_distribution keep(density);
  std::vector<Edge> edges;
  for (int u = 0; u < nodes; ++u) {
    for (int v = 0; v < nodes; ++v) {
      if (u == v || u == FlowNetwork::kSink || v == FlowNetwork::kSource) continue;
      if (keep(rng)) edges.push_back({u, v, Capacity(uniform_int(rng, 1, max_cap))});
    }
  }
  return build_network(n, n_aux, edges);
}

/// Ground-only directed graph for the transformed cut constructor.
inline FlowNetwork random_ground_graph(Rng& rng, int n, double density = 0.4, int max_cap = 10) {
  std::bernoulli_distribution keep(density);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && keep(rng)) edges.push_back({2 + i, 2 + j, Capacity(uniform_int(rng, 1, max_cap))});
    }
  }
  return build_network(n, 0, edges);
}

inline Eigen::VectorXd random_integer_vector(Rng& rng, int n, int lo, int hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform_int(rng, lo, hi);
  return v;
}

struct DecomposableData {
  Eigen::VectorXd d;
  std::vector<Eigen::VectorXd> w;
  Eigen::VectorXd y;
};

inline DecomposableData random_decomposable(Rng& rng, int n, int groups) {
  DecomposableData data;
  data.d = random_integer_vector(rng, n, 1, 6);
  data.y = random_integer_vector(rng, groups, 1, 12);
  std::bernoulli_distribution keep(0.5);
  for (int j = 0; j < groups; ++j) {
    Eigen::VectorXd wj = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (keep(rng)) wj[i] = uniform_int(rng, 1, 8);
    }
    data.w.push_back(wj);
  }
  return data;
}

inline std::vector<WeightedEdge> random_undirected(Rng& rng, int n, double density = 0.4, int max_w = 5) {
  std::bernoulli_distribution keep(density);
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (keep(rng)) edges.push_back({i, j, static_cast<double>(uniform_int(rng, 1, max_w))});
    }
  }
  return edges;
}

/// Cut capacity of ({s} u side) by direct summation; side indexed by node.
inline double naive_cut(const FlowNetwork& net, const std::vector<char>& side) {
  double total = 0.0;
  auto in_s = [&](int v) { return v == FlowNetwork::kSource || (v != FlowNetwork::kSink && side[v]); };
  for (const Edge& e : net.edges()) {
    if (in_s(e.tail) && !in_s(e.head)) total += e.capacity.value();
  }
  return total;
}

/// Minimum over W of the cut of {s} u S u W, enumerating every W.
inline double naive_generalized_cut(const FlowNetwork& net, std::uint64_t ground_mask) {
  const int n = net.ground_count(), k = net.aux_count();
  std::vector<char> side(static_cast<std::size_t>(net.node_count()), 0);
  for (int i = 0; i < n; ++i) side[net.ground_node(i)] = static_cast<char>(ground_mask >> i & 1U);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << k); ++w) {
    for (int j = 0; j < k; ++j) side[net.aux_node(j)] = static_cast<char>(w >> j & 1U);
    best = std::min(best, naive_cut(net, side));
  }
  return best;
}

struct EnumeratedCut {
  double value = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> minimizers;  // source sides as masks over nodes 2..
};

/// All minimum s-t cuts by enumeration over the non-terminal nodes.
inline EnumeratedCut enumerate_min_cuts(const FlowNetwork& net) {
  const int inner = net.node_count() - 2;
  EnumeratedCut out;
  std::vector<double> values(std::size_t{1} << inner);
  std::vector<char> side(static_cast<std::size_t>(net.node_count()), 0);
  for (std::uint64_t m = 0; m < values.size(); ++m) {
    for (int v = 0; v < inner; ++v) side[2 + v] = static_cast<char>(m >> v & 1U);
    values[m] = naive_cut(net, side);
    out.value = std::min(out.value, values[m]);
  }
  for (std::uint64_t m = 0; m < values.size(); ++m) {
    if (values[m] <= out.value + 1e-9 * (1.0 + std::abs(out.value))) out.minimizers.push_back(m);
  }
  return out;
}

inline std::uint64_t side_mask(const std::vector<char>& side) {
  std::uint64_t m = 0;
  for (std::size_t v = 2; v < side.size(); ++v) {
    if (side[v]) m |= std::uint64_t{1} << (v - 2);
  }
  return m;
}

/// max_S (x(S) - g(S)) over all S; nonpositive iff x respects every inequality of B(g).
inline double base_violation(const TableFunction& g, const Eigen::VectorXd& x) {
  const int n = g.size();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    double xs = 0.0;
    for (int i = 0; i < n; ++i) {
      if (m >> i & 1U) xs += x[i];
    }
    worst = std::max(worst, xs - (g.at(m) - g.at(0)));
  }
  return worst;
}

/// A random point of B(g - g(empty)): convex combination of greedy vertices.
inline Eigen::VectorXd random_base_point(Rng& rng, const TableFunction& g, int vertices) {
  const int n = g.size();
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[i] = i;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<double> weights(static_cast<std::size_t>(vertices));
  double total = 0.0;
  for (double& w : weights) {
    w = std::exponential_distribution<double>(1.0)(rng);
    total += w;
  }
  for (int k = 0; k < vertices; ++k) {
    std::shuffle(perm.begin(), perm.end(), rng);
    x += (weights[k] / total) * greedy_vertex(g, perm);
  }
  return x;
}

/// Largest decrease of the prox objective found by stepping delta along random
/// unit directions; zero or negative means no direction improves on beta.
inline double prox_certificate(Rng& rng, const ProxProblem& p, const Eigen::VectorXd& beta, int directions = 1000) {
  auto objective = [&](const Eigen::VectorXd& b) {
    return 0.5 * (b - p.s).squaredNorm() + p.lambda * penalty(p.reg, b);
  };
  const double base = objective(beta);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd d(beta.size());
  for (int k = 0; k < directions; ++k) {
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = normal(rng);
    d.normalize();
    for (double delta : {1e-3, 1e-4}) worst = std::max(worst, base - objective(beta + delta * d));
  }
  return worst;
}

/// Exhaustive max of theta over subsets of each size.
inline std::vector<double> max_theta_by_size(int n, std::span<const WeightedEdge> edges) {
  std::vector<double> best(static_cast<std::size_t>(n) + 1, -1.0);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    const GroundSubset s = GroundSubset::from_mask(m, n);
    best[s.size()] = std::max(best[s.size()], induced_weight(edges, s));
  }
  return best;
}

/// Exhaustive min over nonempty S of (g(S) - g(empty)) / b(S).
inline double min_ratio_by_enumeration(const TableFunction& g, const Eigen::VectorXd& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << g.size()); ++m) {
    double bs = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      if (m >> i & 1U) bs += b[i];
    }
    best = std::min(best, (g.at(m) - g.at(0)) / bs);
  }
  return best;
}

}  // namespace subflow::oracle
