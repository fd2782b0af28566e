#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "subflow/error.hpp"
#include "subflow/graph.hpp"
#include "subflow/subset.hpp"

namespace subflow {

/// Anything that maps subsets of {0..n-1} to reals.
template <typename F>
concept SetFunction = requires(const F& f, const GroundSubset& s) {
  { f.size() } -> std::convertible_to<int>;
  { f.evaluate(s) } -> std::convertible_to<double>;
};

/// Graph-backed set function
///   f(S) = min_{W subset U} cut({s} u S u W) + modular_shift(S) - offset,
/// i.e. a generalized graph cut plus a modular term, shifted so f(empty) = 0
/// for the normalizing constructors.
class SubmodularSpec {
 public:
  SubmodularSpec() = default;
  SubmodularSpec(FlowNetwork net, Eigen::VectorXd modular_shift, double offset);

  /// Builds the spec and sets offset to the raw value at the empty set.
  static SubmodularSpec normalized(FlowNetwork net, Eigen::VectorXd modular_shift);
  static SubmodularSpec normalized(FlowNetwork net);

  int size() const { return net_.ground_count(); }
  const FlowNetwork& network() const { return net_; }
  const Eigen::VectorXd& modular_shift() const { return shift_; }
  double offset() const { return offset_; }
  const Adjacency& adjacency() const { return *adj_; }

  double evaluate(const GroundSubset& s) const;
  /// The generalized cut value of S alone (no modular part, no offset).
  double cut_value(const GroundSubset& s) const;

  /// Same graph, modular part increased by delta.
  SubmodularSpec shifted(const Eigen::VectorXd& delta) const;

  /// Smallest k <= 16 such that every capacity and shift entry times 2^k is an
  /// integer, or -1. Dyadic data lets the decomposition run in exact arithmetic.
  int dyadic_exponent() const;

 private:
  FlowNetwork net_;
  Eigen::VectorXd shift_;
  double offset_ = 0.0;
  std::shared_ptr<const Adjacency> adj_;
};

inline double evaluate(const SubmodularSpec& spec, const GroundSubset& s) { return spec.evaluate(s); }

/// Explicit value table over all 2^n subsets, indexed by bitmask. n <= 20.
class TableFunction {
 public:
  TableFunction(int n, std::vector<double> values);

  int size() const { return n_; }
  double at(std::uint64_t mask) const { return values_[mask]; }
  double evaluate(const GroundSubset& s) const { return values_[s.mask()]; }
  std::span<const double> values() const { return values_; }

 private:
  int n_;
  std::vector<double> values_;
};

inline constexpr int kMaxEnumeration = 20;

template <SetFunction F>
TableFunction tabulate(const F& f) {
  const int n = f.size();
  if (n > kMaxEnumeration) {
    throw Error(Errc::kGroundSetTooLarge, "tabulating needs n <= 20, got " + std::to_string(n));
  }
  std::vector<double> values(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
    values[mask] = f.evaluate(GroundSubset::from_mask(mask, n));
  }
  return TableFunction(n, std::move(values));
}

inline TableFunction tabulate(const TableFunction& f) { return f; }

// ---------------------------------------------------------------------------
// Constructors

/// A generalized cut function given directly by its graph, normalized so
/// f(empty) = 0.
SubmodularSpec from_generalized_cut(FlowNetwork net);

/// kappa + a for a cut function kappa on a ground-only directed graph, realized
/// on the augmented graph G_a: (i, t) with capacity a_i where a_i > 0 and
/// (s, i) with capacity -a_i where a_i < 0.
SubmodularSpec from_transformed_cut(const FlowNetwork& graph, const Eigen::VectorXd& a);

/// tau(S) = -d(S) + sum_j min{y_j, w^j(S)} on the graph with edges (s, i) = d_i,
/// (i, u_j) = w^j_i and (u_j, t) = y_j.
SubmodularSpec from_decomposable(const Eigen::VectorXd& d, std::span<const Eigen::VectorXd> w,
                                 const Eigen::VectorXd& y);

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// -theta(S) = kappa_bar(S)/2 - m(S)/2 where theta(S) is the total weight of the
/// subgraph induced by S.
SubmodularSpec from_negated_density(int n, std::span<const WeightedEdge> edges);

/// Total weight of edges with both endpoints in S.
double induced_weight(std::span<const WeightedEdge> edges, const GroundSubset& s);

struct ShiftedSpec {
  SubmodularSpec spec;
  double beta = 0.0;
};

/// f + beta*b with beta = max{0, max_i (f(V - i) - f(V)) / b_i}, which makes f
/// nondecreasing.
ShiftedSpec nondecreasing_shift(const SubmodularSpec& spec, const Eigen::VectorXd& b);

/// For every i, f(V - {i}) - f(V).
Eigen::VectorXd removal_gains(const SubmodularSpec& spec);

// ---------------------------------------------------------------------------
// Lovasz extension and greedy vertices

/// Indices sorted by nonincreasing z, ties broken by index.
template <typename Derived>
std::vector<int> descending_order(const Eigen::MatrixBase<Derived>& z) {
  std::vector<int> order(static_cast<std::size_t>(z.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return z(a) > z(b); });
  return order;
}

/// f-increments along a permutation: the greedy vertex of B(f - f(empty)).
template <SetFunction F>
Eigen::VectorXd greedy_vertex(const F& f, std::span<const int> order) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.size());
  std::vector<int> prefix;
  double prev = f.evaluate(GroundSubset{});
  for (int i : order) {
    prefix.push_back(i);
    const double cur = f.evaluate(GroundSubset(prefix));
    x[i] = cur - prev;
    prev = cur;
  }
  return x;
}

Eigen::VectorXd greedy_vertex(const SubmodularSpec& f, std::span<const int> order);

template <SetFunction F, typename Derived>
double lovasz_extension(const F& f, const Eigen::MatrixBase<Derived>& z) {
  if (z.size() != f.size()) throw Error(Errc::kInvalidDims, "lovasz_extension: length mismatch");
  const std::vector<int> order = descending_order(z);
  const Eigen::VectorXd g = greedy_vertex(f, order);
  return g.dot(z.template cast<double>());
}

// ---------------------------------------------------------------------------
// Enumeration oracles

struct BruteForceMin {
  double value = 0.0;
  GroundSubset minimal;
  GroundSubset maximal;
};

/// Two set-function values are tied when they differ by at most
/// 1e-9 * (1 + magnitude).
inline bool values_tied(double a, double b) {
  return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

BruteForceMin brute_force_min(const TableFunction& f, const Eigen::VectorXd& shift);

template <SetFunction F>
BruteForceMin brute_force_min(const F& f, const Eigen::VectorXd& shift) {
  return brute_force_min(tabulate(f), shift);
}

/// Whether g(S) + g(T) >= g(S u T) + g(S n T) for all pairs, up to
/// tolerance * (1 + |values|). n <= 12.
bool check_submodular(const TableFunction& f, double tolerance = 1e-9);

template <SetFunction F>
bool check_submodular(const F& f, double tolerance = 1e-9) {
  if (f.size() > 12) {
    throw Error(Errc::kGroundSetTooLarge, "check_submodular needs n <= 12");
  }
  return check_submodular(tabulate(f), tolerance);
}

}  // namespace subflow
