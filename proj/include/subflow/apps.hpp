#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "subflow/decomposition.hpp"
#include "subflow/submodular.hpp"

namespace subflow {

// ---------------------------------------------------------------------------
// Dense subgraphs

struct DensityLevel {
  GroundSubset set;
  int k = 0;
  double weight = 0.0;     // theta(S)
  double intensity = 0.0;  // theta(S) / |S|
};

struct DensityReport {
  std::vector<DensityLevel> levels;  // nonempty chain members, sizes increasing
  Chain chain;
};

/// Level sets of the min-norm base of -theta.
DensityReport densest_levels(int n, std::span<const WeightedEdge> edges);

// ---------------------------------------------------------------------------
// Proximal operators

/// sum_i w_i |beta_i - beta_{i+1}|; empty weights mean all ones.
struct FusedReg {
  std::vector<double> weights;
};

/// sum_g d_g max_{i in g} |beta_i|.
struct GroupLinfReg {
  std::vector<std::vector<int>> groups;
  std::vector<double> d;
};

/// Lovasz extension of an arbitrary graph-representable g with g(empty) = 0.
struct GraphCutReg {
  SubmodularSpec g;
};

using Regularizer = std::variant<FusedReg, GroupLinfReg, GraphCutReg>;

struct ProxProblem {
  Eigen::VectorXd s;
  double lambda = 1.0;
  Regularizer reg;
};

struct ProxResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd t;  // min-norm point of B(g - s/lambda); beta = -lambda * t
  Chain chain;
};

/// The submodular function whose Lovasz extension is the regularizer.
SubmodularSpec regularizer_spec(const Regularizer& reg, int n);

/// Omega(beta), without the lambda factor.
double penalty(const Regularizer& reg, const Eigen::VectorXd& beta);

/// argmin_beta 1/2 |beta - s|^2 + lambda * Omega(beta).
ProxResult prox(const ProxProblem& p);

// ---------------------------------------------------------------------------
// Minimum ratio

struct MinRatio {
  double xi = 0.0;
  GroundSubset set;
};

/// min over nonempty S of (g(S) - g(empty)) / b(S) and its largest minimizer.
MinRatio min_ratio(const SubmodularSpec& g, const Eigen::VectorXd& b);

// ---------------------------------------------------------------------------
// Regression

struct RegressionOptions {
  double tolerance = 1e-4;  // relative objective change
  int max_iterations = 5000;
};

struct RegressionRun {
  Eigen::MatrixXd design;
  Eigen::VectorXd targets;
  double lambda = 0.0;
  std::vector<double> history;  // objective after every iteration
  Eigen::VectorXd beta;
  int iterations = 0;
  bool converged = false;
  double lipschitz = 0.0;
  long long prox_minimizations = 0;  // summed over all prox calls
  long long prox_flow_solves = 0;
};

/// Least-squares loss 1/2 |X beta - y|^2 plus lambda * Omega, minimized by
/// accelerated proximal gradient with function-value restart.
RegressionRun fista_regress(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets, double lambda,
                            const Regularizer& reg, const RegressionOptions& options = {});

/// Objective of fista_regress at beta.
double regression_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets, double lambda,
                            const Regularizer& reg, const Eigen::VectorXd& beta);

// ---------------------------------------------------------------------------
// Synthetic data

struct Dataset {
  Eigen::MatrixXd design;  // N x n
  Eigen::VectorXd targets;
  Eigen::VectorXd true_beta;
  std::vector<std::vector<int>> groups;  // group data only
  std::vector<double> weights;           // d_g, group data only
  std::uint64_t seed = 0;
};

/// Fused-structured support: random start, then each next feature is a
/// neighbor of the last one with probability 0.4 each, otherwise uniform over
/// the remaining features.
Dataset gen_fused_data(int n, int N, int k, double sigma, std::uint64_t seed);

/// Overlapping contiguous groups; the support is the union of two groups,
/// which get weight 2 (others 1). stride <= 0 spreads the groups evenly.
Dataset gen_group_data(int n, int N, int n_groups, int group_size, std::uint64_t seed, double sigma = 0.1,
                       int stride = 0);

/// Writes design.csv, targets.csv and meta.json into dir.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);

}  // namespace subflow
