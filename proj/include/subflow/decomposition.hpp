#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "subflow/submodular.hpp"

namespace subflow {

/// Nested maximal minimizers of f - alpha*b as alpha grows:
///   empty = S_0 < S_1 < ... < S_l = V.
/// Stored as a permutation of the ground set plus prefix lengths, so that S_j
/// is the first ends[j] entries of order.
struct Chain {
  std::vector<int> order;
  std::vector<int> ends;            // 0 = ends[0] < ... < ends[l] = n
  std::vector<double> f_values;     // f(S_j)
  std::vector<double> breakpoints;  // alpha_1 .. alpha_l, the block ratios
  int minimization_count = 0;       // number of f_alpha minimizations
  int flow_solves = 0;              // max-flow runs, including value lookups

  int length() const { return static_cast<int>(ends.size()) - 1; }
  GroundSubset set(int j) const;
  /// Ground elements of S_{j+1} \ S_j.
  std::span<const int> block(int j) const {
    return {order.data() + ends[j], order.data() + ends[j + 1]};
  }
};

/// A point of B(f - f(empty)) together with its block structure.
struct BaseVector {
  Eigen::VectorXd x;
  std::vector<std::vector<int>> blocks;  // consecutive equal-ratio blocks merged
  std::vector<double> ratios;            // x_i / b_i inside each block
};

struct DecomposeOptions {
  /// Run in exact (dyadic) arithmetic when the data allow it.
  bool allow_exact = true;
};

/// The decomposition algorithm: DA(empty, V) with one maximal minimum cut per
/// step. Works for any submodular spec; breakpoints may be negative when f is
/// not nondecreasing.
Chain decompose(const SubmodularSpec& spec, const Eigen::VectorXd& b,
                const DecomposeOptions& options = {});

/// Same recursion with interval minimization by enumeration (n <= 20).
Chain decompose(const TableFunction& f, const Eigen::VectorXd& b);

/// Block-wise x_i = (f(S_{j+1}) - f(S_j)) / b(S_{j+1} \ S_j) * b_i.
BaseVector base_from_chain(const Chain& chain, const Eigen::VectorXd& b);

/// Totals of decompose() calls in this process and how many exceeded the
/// 2n - 1 minimization budget.
struct DecompositionAudit {
  std::uint64_t runs = 0;
  std::uint64_t budget_violations = 0;
};
DecompositionAudit decomposition_audit();

// ---------------------------------------------------------------------------
// Equivalent separable objectives

struct ObjectiveVariant {
  enum class Kind {
    kQuadraticOverB,  // min sum x^2 / b
    kPower,           // p > 0: min sum x^(p+1) / b^p;  p < 0, p != -1: max
    kLogBarrier,      // max sum b ln x
    kKL,              // min sum x ln(x / b) + b - x
    kPerspective,     // min sum x g0(b / x)
  };

  Kind kind = Kind::kQuadraticOverB;
  double p = 1.0;
  std::function<double(double)> g0;

  static ObjectiveVariant quadratic_over_b() { return {}; }
  static ObjectiveVariant power(double p) { return {Kind::kPower, p, {}}; }
  static ObjectiveVariant log_barrier() { return {Kind::kLogBarrier, 1.0, {}}; }
  static ObjectiveVariant kl() { return {Kind::kKL, 1.0, {}}; }
  static ObjectiveVariant perspective(std::function<double(double)> g0) {
    return {Kind::kPerspective, 1.0, std::move(g0)};
  }

  bool maximizes() const;
  /// Whether the objective is only defined for x > 0.
  bool needs_positive() const;
};

double objective_value(const ObjectiveVariant& variant, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& b);

/// Throws PositivityViolated when a block ratio lies outside the variant's
/// domain, InvalidArgument for bad variant parameters.
void check_variant_domain(const ObjectiveVariant& variant, const BaseVector& base);

/// The common optimum of the equivalent family; checks the variant's domain
/// against the block ratios.
BaseVector solve_family(const SubmodularSpec& spec, const Eigen::VectorXd& b,
                        const ObjectiveVariant& variant);

// ---------------------------------------------------------------------------
// Enumeration oracle

/// Chain by brute force: every ratio (f(A) - f(B)) / b(A \ B) over nested
/// pairs B < A is a candidate breakpoint; maximal minimizers are enumerated at
/// candidates and midpoints. n <= 12.
Chain brute_force_chain(const TableFunction& f, const Eigen::VectorXd& b);

template <SetFunction F>
Chain brute_force_chain(const F& f, const Eigen::VectorXd& b) {
  if (f.size() > 12) throw Error(Errc::kGroundSetTooLarge, "brute_force_chain needs n <= 12");
  return brute_force_chain(tabulate(f), b);
}

}  // namespace subflow
