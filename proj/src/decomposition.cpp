#include "subflow/decomposition.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>

#include "subflow/detail/cut_delta.hpp"
#include "subflow/maxflow.hpp"

namespace subflow {

namespace {

std::atomic<std::uint64_t> g_runs{0};
std::atomic<std::uint64_t> g_budget_violations{0};

void check_weights(const Eigen::VectorXd& b, int n) {
  if (b.size() != n) {
    throw Error(Errc::kInvalidDims,
                "b has length " + std::to_string(b.size()) + ", ground set has " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(b[i])) throw Error(Errc::kNonFiniteInput, "b[" + std::to_string(i) + "] is not finite");
    if (b[i] <= 0.0) throw Error(Errc::kInvalidArgument, "b[" + std::to_string(i) + "] must be positive");
  }
}

// Shared state of one DA run: the permutation being refined and the inverse.
struct Layout {
  std::vector<int> order;
  std::vector<int> pos;

  explicit Layout(int n) : order(static_cast<std::size_t>(n)), pos(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) order[i] = pos[i] = i;
  }

  // Moves the flagged entries of [lo, hi) to the front, stably; returns the split.
  int partition(int lo, int hi, const std::vector<char>& in_x) {
    std::vector<int> first, second;
    for (int r = lo; r < hi; ++r) (in_x[r - lo] ? first : second).push_back(order[r]);
    int k = lo;
    for (int i : first) order[k++] = i;
    const int mid = k;
    for (int i : second) order[k++] = i;
    for (int r = lo; r < hi; ++r) pos[order[r]] = r;
    return mid;
  }
};

// Minimizes f - alpha*b over [order[0..lo), order[0..hi)) with one max-flow on
// the network restricted to the free elements and the auxiliary nodes they
// reach through auxiliary nodes.
class GraphIntervals {
 public:
  GraphIntervals(const SubmodularSpec& spec, const Eigen::VectorXd& b, bool allow_exact)
      : spec_(spec),
        b_(b),
        net_(spec.network()),
        adj_(spec.adjacency()),
        local_(static_cast<std::size_t>(net_.node_count()), -1) {
    bool integral_b = true;
    for (int i = 0; i < b.size(); ++i) integral_b = integral_b && std::floor(b[i]) == b[i];
    exact_ = allow_exact && integral_b && spec.dyadic_exponent() >= 0;
    cut_only_ = net_.aux_count() == 0;
  }

  int flow_solves = 0;

  double value_full() {
    ++flow_solves;
    return spec_.evaluate(GroundSubset::full(spec_.size()));
  }
  double value_empty() {
    ++flow_solves;
    return spec_.evaluate(GroundSubset{});
  }

  std::vector<char> minimize(const Layout& lay, int lo, int hi, double f_lo, double f_hi) {
    double b_free = 0.0;
    for (int r = lo; r < hi; ++r) b_free += b_[lay.order[r]];
    const double num = f_hi - f_lo;
    // Exact mode scales by b(T' \ T) so alpha never has to be rounded.
    const double scale = exact_ ? b_free : 1.0;
    const double alpha_term = exact_ ? num : num / b_free;

    const int free_count = hi - lo;
    std::vector<int> kept_aux;
    for (int r = lo; r < hi; ++r) local_[net_.ground_node(lay.order[r])] = 2 + (r - lo);
    auto visit_aux = [&](int w) {
      if (net_.is_aux(w) && local_[w] < 0) {
        local_[w] = 2 + free_count + static_cast<int>(kept_aux.size());
        kept_aux.push_back(w);
      }
    };
    const auto edges = net_.edges();
    for (int r = lo; r < hi; ++r) {
      const int v = net_.ground_node(lay.order[r]);
      for (int k : adj_.out(v)) visit_aux(edges[k].head);
      for (int k : adj_.in(v)) visit_aux(edges[k].tail);
    }
    for (std::size_t qi = 0; qi < kept_aux.size(); ++qi) {
      const int v = kept_aux[qi];
      for (int k : adj_.out(v)) visit_aux(edges[k].head);
      for (int k : adj_.in(v)) visit_aux(edges[k].tail);
    }

    enum { kSrc, kSnk, kFree };
    auto cls = [&](int v) {
      if (v == FlowNetwork::kSource) return kSrc;
      if (v == FlowNetwork::kSink) return kSnk;
      if (local_[v] >= 0) return kFree;
      // Remaining nodes are ground nodes outside the interval.
      return lay.pos[net_.ground_index(v)] < lo ? kSrc : kSnk;
    };
    auto mapped = [&](int v) {
      const int c = cls(v);
      return c == kSrc ? FlowNetwork::kSource : c == kSnk ? FlowNetwork::kSink : local_[v];
    };
    auto scaled = [&](Capacity c) { return c.is_infinite() ? c : Capacity(c.value() * scale); };

    std::vector<Edge> sub;
    auto collect = [&](int v) {
      const int lv = local_[v];
      for (int k : adj_.out(v)) {
        const Edge& e = edges[k];
        const int c = cls(e.head);
        if (c == kSrc) continue;
        sub.push_back({lv, mapped(e.head), scaled(e.capacity)});
      }
      for (int k : adj_.in(v)) {
        const Edge& e = edges[k];
        if (cls(e.tail) != kSrc) continue;
        sub.push_back({FlowNetwork::kSource, lv, scaled(e.capacity)});
      }
    };
    for (int r = lo; r < hi; ++r) collect(net_.ground_node(lay.order[r]));
    for (int v : kept_aux) collect(v);
    for (int r = lo; r < hi; ++r) {
      const int i = lay.order[r];
      const double m = spec_.modular_shift()[i] * scale - alpha_term * b_[i];
      if (m > 0.0) {
        sub.push_back({2 + (r - lo), FlowNetwork::kSink, Capacity(m)});
      } else if (m < 0.0) {
        sub.push_back({FlowNetwork::kSource, 2 + (r - lo), Capacity(-m)});
      }
    }

    for (int r = lo; r < hi; ++r) local_[net_.ground_node(lay.order[r])] = -1;
    for (int v : kept_aux) local_[v] = -1;

    const FlowNetwork subnet = build_network(free_count, static_cast<int>(kept_aux.size()), sub);
    MaxFlowSolver solver(subnet);
    ++flow_solves;
    const std::vector<char> side = solver.maximal_source_side();
    return std::vector<char>(side.begin() + 2, side.begin() + 2 + free_count);
  }

  // f(order[0..mid)) given f(order[0..lo)).
  double value_after(const Layout& lay, int lo, int mid, double f_lo) {
    if (!cut_only_) {
      ++flow_solves;
      return spec_.evaluate(GroundSubset(std::vector<int>(lay.order.begin(), lay.order.begin() + mid)));
    }
    std::vector<int> moved;
    double shift = 0.0;
    for (int r = lo; r < mid; ++r) {
      moved.push_back(net_.ground_node(lay.order[r]));
      shift += spec_.modular_shift()[lay.order[r]];
    }
    auto before = [&](int v) {
      return v == FlowNetwork::kSource || (net_.is_ground(v) && lay.pos[net_.ground_index(v)] < lo);
    };
    auto after = [&](int v) {
      return v == FlowNetwork::kSource || (net_.is_ground(v) && lay.pos[net_.ground_index(v)] < mid);
    };
    return f_lo + detail::cut_delta(net_, adj_, moved, before, after) + shift;
  }

 private:
  const SubmodularSpec& spec_;
  const Eigen::VectorXd& b_;
  const FlowNetwork& net_;
  const Adjacency& adj_;
  std::vector<int> local_;
  bool exact_ = false;
  bool cut_only_ = false;
};

class TableIntervals {
 public:
  TableIntervals(const TableFunction& f, const Eigen::VectorXd& b) : f_(f), b_(b) {}

  int flow_solves = 0;

  double value_full() { return f_.at((std::uint64_t{1} << f_.size()) - 1); }
  double value_empty() { return f_.at(0); }

  std::vector<char> minimize(const Layout& lay, int lo, int hi, double f_lo, double f_hi) {
    const int k = hi - lo;
    std::uint64_t base = 0;
    for (int r = 0; r < lo; ++r) base |= std::uint64_t{1} << lay.order[r];
    double b_free = 0.0;
    for (int r = lo; r < hi; ++r) b_free += b_[lay.order[r]];
    const double alpha = (f_hi - f_lo) / b_free;

    std::vector<double> vals(std::size_t{1} << k);
    double best = 0.0;
    for (std::uint64_t sub = 0; sub < vals.size(); ++sub) {
      std::uint64_t mask = base;
      double bx = 0.0;
      for (int j = 0; j < k; ++j) {
        if (sub >> j & 1U) {
          mask |= std::uint64_t{1} << lay.order[lo + j];
          bx += b_[lay.order[lo + j]];
        }
      }
      vals[sub] = f_.at(mask) - alpha * bx;
      if (sub == 0 || vals[sub] < best) best = vals[sub];
    }
    std::uint64_t maximal = 0;
    for (std::uint64_t sub = 0; sub < vals.size(); ++sub) {
      if (values_tied(vals[sub], best)) maximal |= sub;
    }
    std::vector<char> in_x(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) in_x[j] = static_cast<char>(maximal >> j & 1U);
    return in_x;
  }

  double value_after(const Layout& lay, int, int mid, double) {
    std::uint64_t mask = 0;
    for (int r = 0; r < mid; ++r) mask |= std::uint64_t{1} << lay.order[r];
    return f_.at(mask);
  }

 private:
  const TableFunction& f_;
  const Eigen::VectorXd& b_;
};

template <typename Intervals>
Chain run(int n, const Eigen::VectorXd& b, Intervals& iv) {
  Layout lay(n);
  Chain chain;
  const double f_empty = iv.value_empty();
  chain.ends.push_back(0);
  chain.f_values.push_back(f_empty);
  if (n == 0) {
    chain.flow_solves = iv.flow_solves;
    return chain;
  }
  const double f_full = iv.value_full();

  struct Task {
    int lo, hi;
    double f_lo, f_hi;
  };
  std::vector<Task> stack{{0, n, f_empty, f_full}};
  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    std::vector<char> in_x = iv.minimize(lay, t.lo, t.hi, t.f_lo, t.f_hi);
    ++chain.minimization_count;
    const auto picked = std::count(in_x.begin(), in_x.end(), char{1});
    if (picked == 0 || picked == t.hi - t.lo) {
      // [T, T'] is a single block of the chain.
      chain.ends.push_back(t.hi);
      chain.f_values.push_back(t.f_hi);
      double b_block = 0.0;
      for (int r = t.lo; r < t.hi; ++r) b_block += b[lay.order[r]];
      chain.breakpoints.push_back((t.f_hi - t.f_lo) / b_block);
      continue;
    }
    const int mid = lay.partition(t.lo, t.hi, in_x);
    const double f_mid = iv.value_after(lay, t.lo, mid, t.f_lo);
    stack.push_back({mid, t.hi, f_mid, t.f_hi});
    stack.push_back({t.lo, mid, t.f_lo, f_mid});
  }
  chain.order = std::move(lay.order);
  chain.flow_solves = iv.flow_solves;

  g_runs.fetch_add(1, std::memory_order_relaxed);
  if (chain.minimization_count > 2 * n - 1) g_budget_violations.fetch_add(1, std::memory_order_relaxed);
  return chain;
}

}  // namespace

GroundSubset Chain::set(int j) const {
  return GroundSubset(std::vector<int>(order.begin(), order.begin() + ends[j]));
}

Chain decompose(const SubmodularSpec& spec, const Eigen::VectorXd& b, const DecomposeOptions& options) {
  check_weights(b, spec.size());
  GraphIntervals iv(spec, b, options.allow_exact);
  return run(spec.size(), b, iv);
}

Chain decompose(const TableFunction& f, const Eigen::VectorXd& b) {
  check_weights(b, f.size());
  TableIntervals iv(f, b);
  return run(f.size(), b, iv);
}

BaseVector base_from_chain(const Chain& chain, const Eigen::VectorXd& b) {
  BaseVector out;
  out.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.order.size()));
  for (int j = 0; j < chain.length(); ++j) {
    const double r = chain.breakpoints[j];
    const auto blk = chain.block(j);
    for (int i : blk) out.x[i] = r * b[i];
    if (!out.ratios.empty() && values_tied(out.ratios.back(), r)) {
      out.blocks.back().insert(out.blocks.back().end(), blk.begin(), blk.end());
    } else {
      out.blocks.emplace_back(blk.begin(), blk.end());
      out.ratios.push_back(r);
    }
  }
  for (auto& blk : out.blocks) std::sort(blk.begin(), blk.end());
  return out;
}

DecompositionAudit decomposition_audit() {
  return {g_runs.load(std::memory_order_relaxed), g_budget_violations.load(std::memory_order_relaxed)};
}

// ---------------------------------------------------------------------------

bool ObjectiveVariant::maximizes() const {
  return kind == Kind::kLogBarrier || (kind == Kind::kPower && p < 0.0);
}

bool ObjectiveVariant::needs_positive() const {
  return kind == Kind::kLogBarrier || kind == Kind::kPerspective || (kind == Kind::kPower && p < 0.0);
}

double objective_value(const ObjectiveVariant& variant, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  if (x.size() != b.size()) throw Error(Errc::kInvalidDims, "objective_value: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i], bi = b[i];
    switch (variant.kind) {
      case ObjectiveVariant::Kind::kQuadraticOverB:
        total += xi * xi / bi;
        break;
      case ObjectiveVariant::Kind::kPower:
        total += std::pow(xi, variant.p + 1.0) / std::pow(bi, variant.p);
        break;
      case ObjectiveVariant::Kind::kLogBarrier:
        total += bi * std::log(xi);
        break;
      case ObjectiveVariant::Kind::kKL:
        total += (xi > 0.0 ? xi * std::log(xi / bi) : 0.0) + bi - xi;
        break;
      case ObjectiveVariant::Kind::kPerspective:
        total += xi * variant.g0(bi / xi);
        break;
    }
  }
  return total;
}

void check_variant_domain(const ObjectiveVariant& variant, const BaseVector& base) {
  if (variant.kind == ObjectiveVariant::Kind::kPower &&
      (variant.p == 0.0 || variant.p == -1.0 || !std::isfinite(variant.p))) {
    throw Error(Errc::kInvalidArgument, "power variant needs p > 0 or p < 0 with p != -1");
  }
  if (variant.kind == ObjectiveVariant::Kind::kPerspective && !variant.g0) {
    throw Error(Errc::kInvalidArgument, "perspective variant needs g0");
  }
  const bool strict = variant.needs_positive();
  const bool nonneg = strict || variant.kind == ObjectiveVariant::Kind::kKL ||
                      (variant.kind == ObjectiveVariant::Kind::kPower && std::floor(variant.p) != variant.p);
  for (double r : base.ratios) {
    if ((strict && !(r > 0.0)) || (nonneg && r < 0.0)) {
      throw Error(Errc::kPositivityViolated,
                  "block ratio " + std::to_string(r) + " outside the domain of the objective");
    }
  }
}

BaseVector solve_family(const SubmodularSpec& spec, const Eigen::VectorXd& b, const ObjectiveVariant& variant) {
  check_variant_domain(variant, BaseVector{});
  BaseVector base = base_from_chain(decompose(spec, b), b);
  check_variant_domain(variant, base);
  return base;
}

// ---------------------------------------------------------------------------

Chain brute_force_chain(const TableFunction& f, const Eigen::VectorXd& b) {
  const int n = f.size();
  if (n > 12) throw Error(Errc::kGroundSetTooLarge, "brute_force_chain needs n <= 12");
  check_weights(b, n);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  std::vector<double> bsum(full + 1, 0.0);
  for (std::uint64_t m = 1; m <= full; ++m) {
    const int low = std::countr_zero(m);
    bsum[m] = bsum[m & (m - 1)] + b[low];
  }

  std::vector<double> cand;
  for (std::uint64_t a = 1; a <= full; ++a) {
    for (std::uint64_t s = (a - 1) & a;; s = (s - 1) & a) {
      cand.push_back((f.at(a) - f.at(s)) / (bsum[a] - bsum[s]));
      if (s == 0) break;
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(), values_tied), cand.end());

  std::vector<double> probes;
  if (!cand.empty()) {
    probes.push_back(cand.front() - 1.0 - std::abs(cand.front()));
    for (std::size_t k = 0; k < cand.size(); ++k) {
      if (k > 0) probes.push_back(0.5 * (cand[k - 1] + cand[k]));
      probes.push_back(cand[k]);
    }
    probes.push_back(cand.back() + 1.0 + std::abs(cand.back()));
  }

  int minimizations = 0;
  std::map<std::size_t, std::uint64_t> memo;
  auto maximal_at = [&](std::size_t k) {
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    ++minimizations;
    const double alpha = probes[k];
    double best = 0.0;
    for (std::uint64_t m = 0; m <= full; ++m) {
      const double v = f.at(m) - alpha * bsum[m];
      if (m == 0 || v < best) best = v;
    }
    std::uint64_t maximal = 0;
    for (std::uint64_t m = 0; m <= full; ++m) {
      if (values_tied(f.at(m) - alpha * bsum[m], best)) maximal |= m;
    }
    memo[k] = maximal;
    return maximal;
  };

  // The maximal minimizer only grows with alpha, so equal sets at both ends
  // of a probe range settle everything in between.
  std::vector<std::uint64_t> sets{0};
  auto push = [&](std::uint64_t m) {
    if (m != sets.back()) sets.push_back(m);
  };
  auto scan = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    if (maximal_at(i) == maximal_at(j)) return;
    if (j == i + 1) {
      push(maximal_at(j));
      return;
    }
    const std::size_t mid = (i + j) / 2;
    self(self, i, mid);
    self(self, mid, j);
  };
  if (!probes.empty()) {
    push(maximal_at(0));
    scan(scan, 0, probes.size() - 1);
  }
  push(full);

  Chain chain;
  chain.ends.push_back(0);
  chain.f_values.push_back(f.at(0));
  for (std::size_t j = 1; j < sets.size(); ++j) {
    const std::uint64_t prev = sets[j - 1], cur = sets[j];
    if ((prev & ~cur) != 0) throw Error(Errc::kInvalidArgument, "maximal minimizers are not nested");
    for (int i = 0; i < n; ++i) {
      if ((cur & ~prev) >> i & 1U) chain.order.push_back(i);
    }
    chain.ends.push_back(static_cast<int>(chain.order.size()));
    chain.f_values.push_back(f.at(cur));
    chain.breakpoints.push_back((f.at(cur) - f.at(prev)) / (bsum[cur] - bsum[prev]));
  }
  chain.minimization_count = minimizations;
  return chain;
}

}  // namespace subflow
