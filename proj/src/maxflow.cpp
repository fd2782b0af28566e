#include "subflow/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "subflow/error.hpp"

namespace subflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MaxFlowSolver::MaxFlowSolver(const FlowNetwork& net, double residual_tolerance) : net_(&net) {
  eps_ = residual_tolerance >= 0.0 ? residual_tolerance
         : net.exact_arithmetic()  ? 0.0
                                   : 1e-12 * net.max_finite_capacity();
  build(net);
  phase_one();
}

void MaxFlowSolver::build(const FlowNetwork& net) {
  n_ = net.node_count();
  const auto edges = net.edges();
  const int m = static_cast<int>(edges.size());

  start_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const Edge& e : edges) {
    ++start_[e.tail + 1];
    ++start_[e.head + 1];
  }
  for (int v = 0; v < n_; ++v) start_[v + 1] += start_[v];
  head_.resize(2 * static_cast<std::size_t>(m));
  rev_.resize(head_.size());
  res_.resize(head_.size());
  forward_arc_.resize(static_cast<std::size_t>(m));
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (int k = 0; k < m; ++k) {
    const Edge& e = edges[k];
    const int a = fill[e.tail]++;
    const int b = fill[e.head]++;
    head_[a] = e.head;
    head_[b] = e.tail;
    res_[a] = e.capacity.value();
    res_[b] = 0.0;
    rev_[a] = b;
    rev_[b] = a;
    forward_arc_[k] = a;
  }

  // Source closure along infinite-capacity edges.
  in_source_.assign(static_cast<std::size_t>(n_), 0);
  in_source_[FlowNetwork::kSource] = 1;
  std::vector<int> queue{FlowNetwork::kSource};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int u = queue[qi];
    for (int a = start_[u]; a < start_[u + 1]; ++a) {
      if (res_[a] == kInf && !in_source_[head_[a]]) {
        in_source_[head_[a]] = 1;
        queue.push_back(head_[a]);
      }
    }
  }
  if (in_source_[FlowNetwork::kSink]) {
    throw Error(Errc::kNoFiniteCut, "sink reachable from source through infinite-capacity edges");
  }

  excess_.assign(static_cast<std::size_t>(n_), 0.0);
  height_.assign(static_cast<std::size_t>(n_), n_);
  cur_.assign(start_.begin(), start_.end() - 1);
  all_head_.assign(static_cast<std::size_t>(n_), -1);
  all_next_.assign(static_cast<std::size_t>(n_), -1);
  all_prev_.assign(static_cast<std::size_t>(n_), -1);
  count_.assign(static_cast<std::size_t>(n_), 0);
  act_head_.assign(static_cast<std::size_t>(n_), -1);
  act_next_.assign(static_cast<std::size_t>(n_), -1);
  is_active_.assign(static_cast<std::size_t>(n_), 0);
}

void MaxFlowSolver::list_insert(int v) {
  const int h = height_[v];
  all_prev_[v] = -1;
  all_next_[v] = all_head_[h];
  if (all_head_[h] >= 0) all_prev_[all_head_[h]] = v;
  all_head_[h] = v;
  ++count_[h];
  max_height_ = std::max(max_height_, h);
}

void MaxFlowSolver::list_erase(int v) {
  const int h = height_[v];
  if (all_prev_[v] >= 0) {
    all_next_[all_prev_[v]] = all_next_[v];
  } else {
    all_head_[h] = all_next_[v];
  }
  if (all_next_[v] >= 0) all_prev_[all_next_[v]] = all_prev_[v];
  --count_[h];
}

void MaxFlowSolver::activate(int v) {
  const int h = height_[v];
  act_next_[v] = act_head_[h];
  act_head_[h] = v;
  is_active_[v] = 1;
  max_active_ = std::max(max_active_, h);
}

void MaxFlowSolver::global_relabel() {
  std::fill(height_.begin(), height_.end(), n_);
  std::fill(all_head_.begin(), all_head_.end(), -1);
  std::fill(act_head_.begin(), act_head_.end(), -1);
  std::fill(count_.begin(), count_.end(), 0);
  std::fill(is_active_.begin(), is_active_.end(), 0);
  max_active_ = -1;
  max_height_ = 0;

  height_[FlowNetwork::kSink] = 0;
  std::vector<int> queue{FlowNetwork::kSink};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int w = queue[qi];
    for (int a = start_[w]; a < start_[w + 1]; ++a) {
      const int u = head_[a];
      if (height_[u] == n_ && !in_source_[u] && res_[rev_[a]] > eps_) {
        height_[u] = height_[w] + 1;
        queue.push_back(u);
      }
    }
  }
  for (int v : queue) {
    list_insert(v);
    cur_[v] = start_[v];
    if (v != FlowNetwork::kSink && excess_[v] > eps_) activate(v);
  }
  work_ = 0;
}

void MaxFlowSolver::discharge(int v) {
  while (excess_[v] > eps_) {
    if (cur_[v] == start_[v + 1]) {
      const int old = height_[v];
      if (count_[old] == 1) {
        // Gap: nothing at this height any more, so v and every node above it
        // are cut off from the sink.
        for (int h = old; h <= max_height_; ++h) {
          for (int u = all_head_[h]; u >= 0; u = all_next_[u]) {
            height_[u] = n_;
            is_active_[u] = 0;
          }
          all_head_[h] = -1;
          act_head_[h] = -1;
          count_[h] = 0;
        }
        max_height_ = old - 1;
        max_active_ = std::min(max_active_, old - 1);
        return;
      }
      int best = 2 * n_;
      for (int a = start_[v]; a < start_[v + 1]; ++a) {
        if (res_[a] > eps_) best = std::min(best, height_[head_[a]] + 1);
      }
      work_ += start_[v + 1] - start_[v] + 12;
      list_erase(v);
      if (best >= n_) {
        height_[v] = n_;
        return;
      }
      height_[v] = best;
      list_insert(v);
      cur_[v] = start_[v];
      continue;
    }
    const int a = cur_[v];
    const int w = head_[a];
    if (res_[a] > eps_ && height_[v] == height_[w] + 1) {
      const double d = std::min(excess_[v], res_[a]);
      res_[a] -= d;
      res_[rev_[a]] += d;
      excess_[v] -= d;
      excess_[w] += d;
      if (!is_active_[w] && w != FlowNetwork::kSink && height_[w] < n_ && excess_[w] > eps_) {
        activate(w);
      }
      if (excess_[v] <= eps_) break;
    } else {
      ++cur_[v];
    }
  }
}

void MaxFlowSolver::phase_one() {
  for (int u = 0; u < n_; ++u) {
    if (!in_source_[u]) continue;
    for (int a = start_[u]; a < start_[u + 1]; ++a) {
      const int w = head_[a];
      if (in_source_[w] || res_[a] <= 0.0) continue;
      const double d = res_[a];
      res_[a] = 0.0;
      res_[rev_[a]] += d;
      excess_[w] += d;
    }
  }
  global_relabel();

  const long long relabel_period = 6LL * n_ + static_cast<long long>(head_.size()) / 2;
  while (max_active_ >= 0) {
    const int v = act_head_[max_active_];
    if (v < 0) {
      --max_active_;
      continue;
    }
    act_head_[max_active_] = act_next_[v];
    is_active_[v] = 0;
    discharge(v);
    if (work_ > relabel_period) global_relabel();
  }
  value_ = excess_[FlowNetwork::kSink];
}

void MaxFlowSolver::phase_two() {
  if (flow_ready_) return;
  flow_ready_ = true;

  // Distances to the source closure in the residual network.
  const int unreached = std::numeric_limits<int>::max() / 2;
  std::fill(height_.begin(), height_.end(), unreached);
  std::vector<int> queue;
  for (int v = 0; v < n_; ++v) {
    if (in_source_[v]) {
      height_[v] = 0;
      queue.push_back(v);
    }
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int w = queue[qi];
    for (int a = start_[w]; a < start_[w + 1]; ++a) {
      const int u = head_[a];
      if (height_[u] == unreached && u != FlowNetwork::kSink && res_[rev_[a]] > eps_) {
        height_[u] = height_[w] + 1;
        queue.push_back(u);
      }
    }
  }

  std::deque<int> fifo;
  std::vector<char> queued(static_cast<std::size_t>(n_), 0);
  for (int v = 0; v < n_; ++v) {
    cur_[v] = start_[v];
    if (!in_source_[v] && v != FlowNetwork::kSink && excess_[v] > eps_) {
      fifo.push_back(v);
      queued[v] = 1;
    }
  }
  const int height_cap = 2 * n_ + 2;
  while (!fifo.empty()) {
    const int v = fifo.front();
    fifo.pop_front();
    queued[v] = 0;
    while (excess_[v] > eps_) {
      if (cur_[v] == start_[v + 1]) {
        int best = unreached;
        for (int a = start_[v]; a < start_[v + 1]; ++a) {
          if (res_[a] > eps_ && head_[a] != FlowNetwork::kSink) {
            best = std::min(best, height_[head_[a]] + 1);
          }
        }
        if (best > height_cap) break;  // stranded rounding residue
        height_[v] = best;
        cur_[v] = start_[v];
        continue;
      }
      const int a = cur_[v];
      const int w = head_[a];
      if (w != FlowNetwork::kSink && res_[a] > eps_ && height_[v] == height_[w] + 1) {
        const double d = std::min(excess_[v], res_[a]);
        res_[a] -= d;
        res_[rev_[a]] += d;
        excess_[v] -= d;
        excess_[w] += d;
        if (!in_source_[w] && !queued[w] && excess_[w] > eps_) {
          fifo.push_back(w);
          queued[w] = 1;
        }
      } else {
        ++cur_[v];
      }
    }
  }
}

std::vector<char> MaxFlowSolver::maximal_source_side() const {
  std::vector<char> reaches_sink(static_cast<std::size_t>(n_), 0);
  reaches_sink[FlowNetwork::kSink] = 1;
  std::vector<int> queue{FlowNetwork::kSink};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int w = queue[qi];
    for (int a = start_[w]; a < start_[w + 1]; ++a) {
      const int u = head_[a];
      if (!reaches_sink[u] && res_[rev_[a]] > eps_) {
        reaches_sink[u] = 1;
        queue.push_back(u);
      }
    }
  }
  std::vector<char> side(static_cast<std::size_t>(n_));
  for (int v = 0; v < n_; ++v) side[v] = !reaches_sink[v];
  side[FlowNetwork::kSource] = 1;
  side[FlowNetwork::kSink] = 0;
  return side;
}

std::vector<char> MaxFlowSolver::minimal_source_side() {
  phase_two();
  std::vector<char> side(in_source_.begin(), in_source_.end());
  std::vector<int> queue;
  for (int v = 0; v < n_; ++v) {
    if (side[v]) queue.push_back(v);
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int u = queue[qi];
    for (int a = start_[u]; a < start_[u + 1]; ++a) {
      const int w = head_[a];
      if (!side[w] && res_[a] > eps_) {
        side[w] = 1;
        queue.push_back(w);
      }
    }
  }
  side[FlowNetwork::kSink] = 0;
  return side;
}

std::vector<double> MaxFlowSolver::edge_flows() {
  phase_two();
  const FlowNetwork& net = *net_;
  const auto edges = net.edges();
  const int m = static_cast<int>(edges.size());
  std::vector<double> flow(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) flow[k] = res_[rev_[forward_arc_[k]]];

  // The solver treated the source closure as one super-source. Decompose the
  // flow leaving it into closure->sink paths, cancel every path that returns
  // into the closure, then feed each path start from s through the closure.
  auto internal = [&](int k) { return in_source_[edges[k].tail] && in_source_[edges[k].head]; };
  const Adjacency adj(net);
  std::vector<int> ptr(adj.out_start.begin(), adj.out_start.end() - 1);
  auto next_edge = [&](int v) {
    for (; ptr[v] < adj.out_start[v + 1]; ++ptr[v]) {
      const int k = adj.out_edges[ptr[v]];
      if (!internal(k) && flow[k] > eps_) return k;
    }
    return -1;
  };
  std::vector<double> kept(static_cast<std::size_t>(m), 0.0);
  std::vector<double> demand(static_cast<std::size_t>(n_), 0.0);
  std::vector<int> pos(static_cast<std::size_t>(n_), -1);
  std::vector<int> path, path_nodes;

  auto bottleneck = [&](std::size_t from) {
    double b = kInf;
    for (std::size_t i = from; i < path.size(); ++i) b = std::min(b, flow[path[i]]);
    return b;
  };
  auto subtract = [&](std::size_t from, double amount) {
    for (std::size_t i = from; i < path.size(); ++i) flow[path[i]] -= amount;
  };

  for (int c = 0; c < n_; ++c) {
    if (!in_source_[c]) continue;
    for (int first = next_edge(c); first >= 0; first = next_edge(c)) {
      path.assign(1, first);
      path_nodes.clear();
      int x = edges[first].head;
      while (true) {
        if (x == FlowNetwork::kSink) {
          const double amount = bottleneck(0);
          subtract(0, amount);
          for (int k : path) kept[k] += amount;
          demand[c] += amount;
          break;
        }
        if (in_source_[x]) {
          subtract(0, bottleneck(0));
          break;
        }
        if (pos[x] >= 0) {
          const auto from = static_cast<std::size_t>(pos[x]);
          subtract(from, bottleneck(from));
          while (path_nodes.size() >= from) {  // x itself is re-pushed below
            pos[path_nodes.back()] = -1;
            path_nodes.pop_back();
          }
          path.resize(from);
        }
        const int k = next_edge(x);
        if (k < 0) {
          // Rounding residue with nowhere to go.
          subtract(0, bottleneck(0));
          break;
        }
        pos[x] = static_cast<int>(path.size());
        path_nodes.push_back(x);
        path.push_back(k);
        x = edges[k].head;
      }
      for (int v : path_nodes) pos[v] = -1;
    }
  }
  for (int k = 0; k < m; ++k) flow[k] = internal(k) ? 0.0 : flow[k] + kept[k];

  // Route the demands from s along a BFS tree of infinite closure edges.
  std::vector<int> parent_edge(static_cast<std::size_t>(n_), -1);
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::vector<int> order{FlowNetwork::kSource};
  seen[FlowNetwork::kSource] = 1;
  for (std::size_t qi = 0; qi < order.size(); ++qi) {
    const int u = order[qi];
    for (int k : adj.out(u)) {
      const int w = edges[k].head;
      if (!seen[w] && in_source_[w] && edges[k].capacity.is_infinite()) {
        seen[w] = 1;
        parent_edge[w] = k;
        order.push_back(w);
      }
    }
  }
  for (std::size_t i = order.size(); i-- > 1;) {
    const int v = order[i];
    const int k = parent_edge[v];
    flow[k] += demand[v];
    demand[edges[k].tail] += demand[v];
  }
  return flow;
}

FlowResult max_flow(const FlowNetwork& net) {
  MaxFlowSolver solver(net);
  FlowResult result;
  result.value = Capacity(solver.value());
  result.edge_flows = solver.edge_flows();
  return result;
}

MinCut min_cut(const FlowNetwork& net, CutKind kind) {
  MaxFlowSolver solver(net);
  const std::vector<char> side =
      kind == CutKind::kMaximal ? solver.maximal_source_side() : solver.minimal_source_side();
  MinCut cut;
  cut.kind = kind;
  cut.value = cut_capacity(net, side);
  for (int v = 2; v < net.node_count(); ++v) {
    if (side[v]) cut.side.members.push_back(v);
  }
  return cut;
}

}  // namespace subflow
