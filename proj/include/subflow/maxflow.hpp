#pragma once

#include <vector>

#include "subflow/graph.hpp"

namespace subflow {

enum class CutKind { kMaximal, kMinimal };

struct FlowResult {
  Capacity value;
  std::vector<double> edge_flows;  // parallel to net.edges()
};

/// Source side of an s-t cut minus the source: sorted non-terminal node ids.
struct CutSide {
  std::vector<int> members;

  bool operator==(const CutSide&) const = default;
};

struct MinCut {
  Capacity value;
  CutSide side;
  CutKind kind = CutKind::kMaximal;
};

/// Highest-label push-relabel with gap relabeling and periodic global
/// relabeling. Nodes reachable from s through infinite-capacity edges are
/// merged into the source, so no big-M capacity is ever introduced.
///
/// The first phase computes a maximum preflow, which already determines the
/// flow value and the maximal minimum cut. The minimal cut and the edge flows
/// need the preflow converted into a flow; that second phase runs on demand.
class MaxFlowSolver {
 public:
  /// residual_tolerance < 0 picks the default: 0 when the capacities allow
  /// exact arithmetic (integers or short dyadic fractions), otherwise 1e-12
  /// times the largest finite capacity.
  explicit MaxFlowSolver(const FlowNetwork& net, double residual_tolerance = -1.0);

  double value() const { return value_; }
  double residual_tolerance() const { return eps_; }

  /// Per-node flag (size node_count) marking the source side of the maximal
  /// minimum cut: every node that cannot reach t in the residual network.
  std::vector<char> maximal_source_side() const;
  /// Source side of the minimal minimum cut: nodes reachable from s.
  std::vector<char> minimal_source_side();
  /// Flow on every edge of the network; satisfies conservation.
  std::vector<double> edge_flows();

 private:
  void build(const FlowNetwork& net);
  void phase_one();
  void phase_two();
  void global_relabel();

  void list_insert(int v);
  void list_erase(int v);
  void activate(int v);
  void discharge(int v);

  const FlowNetwork* net_;
  int n_ = 0;
  double eps_ = 0.0;
  double value_ = 0.0;
  bool flow_ready_ = false;

  // residual network in CSR form, arcs grouped by tail
  std::vector<int> start_, head_, rev_;
  std::vector<double> res_;
  std::vector<int> forward_arc_;  // edge index -> arc
  std::vector<int> infinite_edge_;  // edges with infinite capacity inside the source closure

  std::vector<char> in_source_;
  std::vector<double> excess_;
  std::vector<int> height_, cur_;

  // all nodes with height < n, bucketed by height (doubly linked)
  std::vector<int> all_head_, all_next_, all_prev_;
  std::vector<int> count_;
  // active nodes bucketed by height (singly linked)
  std::vector<int> act_head_, act_next_;
  std::vector<char> is_active_;
  int max_active_ = -1;
  int max_height_ = 0;
  long long work_ = 0;
};

FlowResult max_flow(const FlowNetwork& net);
MinCut min_cut(const FlowNetwork& net, CutKind kind);

}  // namespace subflow
