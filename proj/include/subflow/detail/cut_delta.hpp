#pragma once

#include <span>

#include "subflow/error.hpp"
#include "subflow/graph.hpp"

namespace subflow::detail {

/// Change in cut capacity when the source side goes from `before` to `after`,
/// touching only edges incident to `moved` (the nodes whose side differs).
template <typename Before, typename After>
double cut_delta(const FlowNetwork& net, const Adjacency& adj, std::span<const int> moved,
                 Before&& before, After&& after) {
  const auto edges = net.edges();
  double delta = 0.0;
  auto account = [&](const Edge& e) {
    const bool was = before(e.tail) && !before(e.head);
    const bool now = after(e.tail) && !after(e.head);
    if (was == now) return;
    if (e.capacity.is_infinite()) {
      throw Error(Errc::kNoFiniteCut, "an infinite-capacity edge changes sides");
    }
    delta += now ? e.capacity.value() : -e.capacity.value();
  };
  for (int u : moved) {
    for (int k : adj.out(u)) account(edges[k]);
    for (int k : adj.in(u)) {
      const int w = edges[k].tail;
      if (before(w) != after(w)) continue;  // counted from w's out-edges
      account(edges[k]);
    }
  }
  return delta;
}

}  // namespace subflow::detail
