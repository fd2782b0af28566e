#include "subflow/submodular.hpp"

#include <cmath>

#include "subflow/maxflow.hpp"
#include "subflow/detail/cut_delta.hpp"

namespace subflow {

SubmodularSpec::SubmodularSpec(FlowNetwork net, Eigen::VectorXd modular_shift, double offset)
    : net_(std::move(net)), shift_(std::move(modular_shift)), offset_(offset) {
  if (shift_.size() != net_.ground_count()) {
    throw Error(Errc::kInvalidDims, "modular shift length " + std::to_string(shift_.size()) +
                                        " != ground count " + std::to_string(net_.ground_count()));
  }
  if (!shift_.allFinite() || !std::isfinite(offset_)) {
    throw Error(Errc::kNonFiniteInput, "modular shift and offset must be finite");
  }
  adj_ = std::make_shared<const Adjacency>(net_);
}

SubmodularSpec SubmodularSpec::normalized(FlowNetwork net, Eigen::VectorXd modular_shift) {
  SubmodularSpec spec(std::move(net), std::move(modular_shift), 0.0);
  spec.offset_ = spec.cut_value(GroundSubset{});
  return spec;
}

SubmodularSpec SubmodularSpec::normalized(FlowNetwork net) {
  const int n = net.ground_count();
  return normalized(std::move(net), Eigen::VectorXd::Zero(n));
}

double SubmodularSpec::cut_value(const GroundSubset& s) const {
  const int n = size();
  if (!s.fits(n)) throw Error(Errc::kInvalidArgument, "subset outside the ground set");
  if (net_.aux_count() == 0) {
    std::vector<char> side(static_cast<std::size_t>(net_.node_count()), 0);
    for (int i : s) side[net_.ground_node(i)] = 1;
    const Capacity c = cut_capacity(net_, side);
    if (c.is_infinite()) throw Error(Errc::kNoFiniteCut, "cut value is infinite");
    return c.value();
  }
  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(n) - s.size());
  for (int i = 0; i < n; ++i) {
    if (!s.contains(i)) rest.push_back(i);
  }
  const FlowNetwork pinned = contract(net_, s, GroundSubset(std::move(rest)));
  return MaxFlowSolver(pinned).value();
}

double SubmodularSpec::evaluate(const GroundSubset& s) const {
  double modular = 0.0;
  for (int i : s) modular += shift_[i];
  return cut_value(s) + modular - offset_;
}

SubmodularSpec SubmodularSpec::shifted(const Eigen::VectorXd& delta) const {
  if (delta.size() != size()) throw Error(Errc::kInvalidDims, "shift length mismatch");
  return SubmodularSpec(net_, shift_ + delta, offset_);
}

int SubmodularSpec::dyadic_exponent() const {
  auto exponent = [](double v) {
    for (int k = 0; k <= 16; ++k) {
      const double scaled = std::ldexp(v, k);
      if (std::floor(scaled) == scaled) return k;
    }
    return -1;
  };
  int k = 0;
  for (const Edge& e : net_.edges()) {
    if (e.capacity.is_infinite()) continue;
    const int ke = exponent(e.capacity.value());
    if (ke < 0) return -1;
    k = std::max(k, ke);
  }
  for (double v : shift_) {
    const int ke = exponent(v);
    if (ke < 0) return -1;
    k = std::max(k, ke);
  }
  return k;
}

TableFunction::TableFunction(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (n < 0 || n > kMaxEnumeration) {
    throw Error(Errc::kGroundSetTooLarge, "table functions need n <= 20");
  }
  if (values_.size() != (std::size_t{1} << n)) {
    throw Error(Errc::kInvalidDims, "table needs 2^n values");
  }
}

SubmodularSpec from_generalized_cut(FlowNetwork net) { return SubmodularSpec::normalized(std::move(net)); }

SubmodularSpec from_transformed_cut(const FlowNetwork& graph, const Eigen::VectorXd& a) {
  const int n = graph.ground_count();
  if (graph.aux_count() != 0) {
    throw Error(Errc::kInvalidArgument, "transformed cut graph must have only ground nodes");
  }
  if (a.size() != n) throw Error(Errc::kInvalidDims, "modular vector length mismatch");
  if (!a.allFinite()) throw Error(Errc::kNonFiniteInput, "modular vector must be finite");
  std::vector<Edge> edges;
  edges.reserve(graph.edges().size() + static_cast<std::size_t>(n));
  for (const Edge& e : graph.edges()) {
    if (!graph.is_ground(e.tail) || !graph.is_ground(e.head)) {
      throw Error(Errc::kInvalidArgument, "transformed cut graph must not touch the terminals");
    }
    edges.push_back(e);
  }
  for (int i = 0; i < n; ++i) {
    if (a[i] > 0.0) edges.push_back({graph.ground_node(i), FlowNetwork::kSink, Capacity(a[i])});
    if (a[i] < 0.0) edges.push_back({FlowNetwork::kSource, graph.ground_node(i), Capacity(-a[i])});
  }
  return SubmodularSpec::normalized(build_network(n, 0, edges));
}

SubmodularSpec from_decomposable(const Eigen::VectorXd& d, std::span<const Eigen::VectorXd> w,
                                 const Eigen::VectorXd& y) {
  const int n = static_cast<int>(d.size());
  const int k = static_cast<int>(y.size());
  if (static_cast<int>(w.size()) != k) {
    throw Error(Errc::kInvalidDims, "need one weight vector per threshold");
  }
  for (int i = 0; i < n; ++i) {
    if (!(d[i] > 0.0) || !std::isfinite(d[i])) {
      throw Error(Errc::kNonPositiveD, "d_" + std::to_string(i) + " must be positive");
    }
  }
  for (int j = 0; j < k; ++j) {
    if (!(y[j] > 0.0) || !std::isfinite(y[j])) {
      throw Error(Errc::kNonPositiveThreshold, "y_" + std::to_string(j) + " must be positive");
    }
    if (w[j].size() != n) throw Error(Errc::kInvalidDims, "weight vector length mismatch");
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({FlowNetwork::kSource, 2 + i, Capacity(d[i])});
  for (int j = 0; j < k; ++j) {
    const int u = 2 + n + j;
    for (int i = 0; i < n; ++i) {
      if (!(w[j][i] >= 0.0)) throw Error(Errc::kNegativeWeight, "decomposable weights must be >= 0");
      if (w[j][i] > 0.0) edges.push_back({2 + i, u, Capacity(w[j][i])});
    }
    edges.push_back({u, FlowNetwork::kSink, Capacity(y[j])});
  }
  // The raw cut of G_tau is tau(S) + d(V); the normalizing offset is d(V).
  return SubmodularSpec::normalized(build_network(n, k, edges));
}

SubmodularSpec from_negated_density(int n, std::span<const WeightedEdge> edges) {
  std::vector<Edge> directed;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  for (const WeightedEdge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw Error(Errc::kDanglingEndpoint, "undirected edge endpoint out of range");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw Error(Errc::kNegativeWeight, "edge weights must be finite and nonnegative");
    }
    if (e.u == e.v || e.weight == 0.0) continue;
    directed.push_back({2 + e.u, 2 + e.v, Capacity(e.weight / 2)});
    directed.push_back({2 + e.v, 2 + e.u, Capacity(e.weight / 2)});
    a[e.u] -= e.weight / 2;
    a[e.v] -= e.weight / 2;
  }
  return from_transformed_cut(build_network(n, 0, directed), a);
}

double induced_weight(std::span<const WeightedEdge> edges, const GroundSubset& s) {
  double total = 0.0;
  for (const WeightedEdge& e : edges) {
    if (e.u != e.v && s.contains(e.u) && s.contains(e.v)) total += e.weight;
  }
  return total;
}

Eigen::VectorXd removal_gains(const SubmodularSpec& spec) {
  const int n = spec.size();
  Eigen::VectorXd gains(n);
  if (spec.network().aux_count() == 0) {
    // Local update: only edges at i change sides.
    const FlowNetwork& net = spec.network();
    auto in_full = [&](int v) { return v != FlowNetwork::kSink; };
    for (int i = 0; i < n; ++i) {
      const int node = net.ground_node(i);
      auto in_reduced = [&](int v) { return v != FlowNetwork::kSink && v != node; };
      gains[i] = detail::cut_delta(net, spec.adjacency(), std::span<const int>(&node, 1), in_full,
                                   in_reduced) -
                 spec.modular_shift()[i];
    }
    return gains;
  }
  const double full = spec.evaluate(GroundSubset::full(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> rest;
    for (int j = 0; j < n; ++j) {
      if (j != i) rest.push_back(j);
    }
    gains[i] = spec.evaluate(GroundSubset(std::move(rest))) - full;
  }
  return gains;
}

ShiftedSpec nondecreasing_shift(const SubmodularSpec& spec, const Eigen::VectorXd& b) {
  if (b.size() != spec.size()) throw Error(Errc::kInvalidDims, "b length mismatch");
  if (!((b.array() > 0.0).all())) throw Error(Errc::kInvalidArgument, "b must be positive");
  const Eigen::VectorXd gains = removal_gains(spec);
  double beta = 0.0;
  for (int i = 0; i < spec.size(); ++i) beta = std::max(beta, gains[i] / b[i]);
  if (beta == 0.0) return {spec, 0.0};
  return {spec.shifted(beta * b), beta};
}

Eigen::VectorXd greedy_vertex(const SubmodularSpec& f, std::span<const int> order) {
  const int n = f.size();
  if (f.network().aux_count() != 0) return greedy_vertex<SubmodularSpec>(f, order);
  // Incremental cut updates along the permutation.
  const FlowNetwork& net = f.network();
  std::vector<char> side(static_cast<std::size_t>(net.node_count()), 0);
  side[FlowNetwork::kSource] = 1;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i : order) {
    const int node = net.ground_node(i);
    auto before = [&](int v) { return side[v] != 0; };
    auto after = [&](int v) { return side[v] != 0 || v == node; };
    const double delta =
        detail::cut_delta(net, f.adjacency(), std::span<const int>(&node, 1), before, after);
    side[node] = 1;
    x[i] = delta + f.modular_shift()[i];
  }
  return x;
}

BruteForceMin brute_force_min(const TableFunction& f, const Eigen::VectorXd& shift) {
  const int n = f.size();
  if (shift.size() != n) throw Error(Errc::kInvalidDims, "shift length mismatch");
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> total(count);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double v = f.at(mask);
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1U) v += shift[i];
    }
    total[mask] = v;
    best = std::min(best, v);
  }
  std::uint64_t lo = count - 1, hi = 0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    if (values_tied(total[mask], best)) {
      lo &= mask;
      hi |= mask;
    }
  }
  return {best, GroundSubset::from_mask(lo, n), GroundSubset::from_mask(hi, n)};
}

bool check_submodular(const TableFunction& f, double tolerance) {
  const std::uint64_t count = std::uint64_t{1} << f.size();
  for (std::uint64_t s = 0; s < count; ++s) {
    for (std::uint64_t t = s + 1; t < count; ++t) {
      const double lhs = f.at(s) + f.at(t);
      const double rhs = f.at(s | t) + f.at(s & t);
      const double scale =
          1.0 + std::max({std::abs(f.at(s)), std::abs(f.at(t)), std::abs(f.at(s | t)),
                          std::abs(f.at(s & t))});
      if (lhs < rhs - tolerance * scale) return false;
    }
  }
  return true;
}

}  // namespace subflow
