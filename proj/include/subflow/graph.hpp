#pragma once

#include <compare>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "subflow/subset.hpp"

namespace subflow {

/// Nonnegative extended-real edge capacity. Infinite is a sentinel (IEEE +inf),
/// never a large finite value.
class Capacity {
 public:
  constexpr Capacity() = default;
  constexpr explicit Capacity(double v) : v_(v) {}

  static constexpr Capacity infinite() { return Capacity(std::numeric_limits<double>::infinity()); }

  constexpr bool is_infinite() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr double value() const { return v_; }

  constexpr Capacity operator+(Capacity o) const { return Capacity(v_ + o.v_); }
  constexpr Capacity& operator+=(Capacity o) {
    v_ += o.v_;
    return *this;
  }
  constexpr auto operator<=>(const Capacity&) const = default;

 private:
  double v_ = 0.0;
};

struct Edge {
  int tail = 0;
  int head = 0;
  Capacity capacity;

  bool operator==(const Edge&) const = default;
};

/// Capacitated directed network with canonical numbering: source 0, sink 1,
/// ground nodes 2..n+1, auxiliary nodes after. Immutable once built.
class FlowNetwork {
 public:
  static constexpr int kSource = 0;
  static constexpr int kSink = 1;

  FlowNetwork() = default;

  int node_count() const { return 2 + n_ground_ + n_aux_; }
  int ground_count() const { return n_ground_; }
  int aux_count() const { return n_aux_; }

  int ground_node(int i) const { return 2 + i; }
  int aux_node(int j) const { return 2 + n_ground_ + j; }
  bool is_ground(int node) const { return node >= 2 && node < 2 + n_ground_; }
  bool is_aux(int node) const { return node >= 2 + n_ground_ && node < node_count(); }
  /// Ground index of a ground node (inverse of ground_node).
  int ground_index(int node) const { return node - 2; }

  std::span<const Edge> edges() const { return edges_; }

  /// Largest finite capacity, 0 if none.
  double max_finite_capacity() const;
  /// True when every finite capacity is an integer.
  bool integral() const;
  /// True when every finite capacity is a multiple of 2^-16 and their sum stays
  /// below 2^36, so that flow arithmetic in doubles is exact.
  bool exact_arithmetic() const;

  bool operator==(const FlowNetwork&) const = default;

 private:
  friend FlowNetwork build_network(int, int, std::span<const Edge>);

  int n_ground_ = 0;
  int n_aux_ = 0;
  std::vector<Edge> edges_;  // sorted by (tail, head), no parallels, no self-loops
};

/// Validates and canonicalizes: parallel edges are merged, self-loops dropped.
FlowNetwork build_network(int n_ground, int n_aux, std::span<const Edge> edges);

/// G^-: adds (s, i) with capacity weights[i] for every ground node i.
FlowNetwork add_source_adjacent(const FlowNetwork& net, const Eigen::VectorXd& weights);
/// G^+: adds (i, t) with capacity weights[i] for every ground node i.
FlowNetwork add_sink_adjacent(const FlowNetwork& net, const Eigen::VectorXd& weights);

/// Pins force_source to the source side and force_sink to the sink side with
/// infinite-capacity terminal edges.
FlowNetwork contract(const FlowNetwork& net, const GroundSubset& force_source,
                     const GroundSubset& force_sink);

/// Capacity of the cut ({s} u side, rest), side given as a per-node membership
/// mask over all nodes (terminal entries ignored).
Capacity cut_capacity(const FlowNetwork& net, const std::vector<char>& on_source_side);

/// Edge lists per node, by edge index into net.edges().
struct Adjacency {
  std::vector<int> out_start, out_edges;
  std::vector<int> in_start, in_edges;

  explicit Adjacency(const FlowNetwork& net);

  std::span<const int> out(int v) const {
    return {out_edges.data() + out_start[v], out_edges.data() + out_start[v + 1]};
  }
  std::span<const int> in(int v) const {
    return {in_edges.data() + in_start[v], in_edges.data() + in_start[v + 1]};
  }
};

// DIMACS max-flow format with "c ground i" / "c aux i" role directives and
// "inf" accepted as a capacity token.
FlowNetwork parse_dimacs(std::istream& in);
FlowNetwork parse_dimacs(const std::string& text);
std::string write_dimacs(const FlowNetwork& net);

}  // namespace subflow
