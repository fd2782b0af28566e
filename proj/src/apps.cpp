#include "subflow/apps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "subflow/error.hpp"

namespace subflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw Error(Errc::kNonFiniteInput, std::string(what) + " has non-finite entries");
}

}  // namespace

DensityReport densest_levels(int n, std::span<const WeightedEdge> edges) {
  for (const WeightedEdge& e : edges) {
    if (!(e.weight >= 0.0)) throw Error(Errc::kNegativeWeight, "edge weights must be nonnegative");
  }
  const SubmodularSpec f = from_negated_density(n, edges);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const ShiftedSpec shifted = nondecreasing_shift(f, ones);
  DensityReport report;
  report.chain = decompose(shifted.spec, ones);
  for (int j = 1; j <= report.chain.length(); ++j) {
    DensityLevel level;
    level.set = report.chain.set(j);
    level.k = static_cast<int>(level.set.size());
    level.weight = induced_weight(edges, level.set);
    level.intensity = level.weight / level.k;
    report.levels.push_back(std::move(level));
  }
  return report;
}

// ---------------------------------------------------------------------------

SubmodularSpec regularizer_spec(const Regularizer& reg, int n) {
  return std::visit(
      overloaded{
          [n](const FusedReg& r) {
            if (!r.weights.empty() && static_cast<int>(r.weights.size()) != std::max(0, n - 1)) {
              throw Error(Errc::kInvalidDims, "fused weights need n - 1 entries");
            }
            std::vector<Edge> edges;
            for (int i = 0; i + 1 < n; ++i) {
              const double w = r.weights.empty() ? 1.0 : r.weights[i];
              if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::kNegativeWeight, "fused weight out of range");
              edges.push_back({2 + i, 3 + i, Capacity(w)});
              edges.push_back({3 + i, 2 + i, Capacity(w)});
            }
            return from_generalized_cut(build_network(n, 0, edges));
          },
          [n](const GroupLinfReg& r) {
            if (r.groups.size() != r.d.size()) throw Error(Errc::kInvalidDims, "one weight per group");
            const int k = static_cast<int>(r.groups.size());
            std::vector<Edge> edges;
            for (int g = 0; g < k; ++g) {
              const double d = r.d[g];
              if (!(d > 0.0) || !std::isfinite(d)) {
                throw Error(Errc::kNonPositiveThreshold, "group weight must be positive");
              }
              const int aux = 2 + n + g;
              for (int i : r.groups[g]) {
                if (i < 0 || i >= n) throw Error(Errc::kInvalidArgument, "group member outside the ground set");
                edges.push_back({2 + i, aux, Capacity(d)});
              }
              edges.push_back({aux, FlowNetwork::kSink, Capacity(d)});
            }
            return from_generalized_cut(build_network(n, k, edges));
          },
          [n](const GraphCutReg& r) {
            if (r.g.size() != n) throw Error(Errc::kInvalidDims, "regularizer size mismatch");
            return r.g;
          },
      },
      reg);
}

double penalty(const Regularizer& reg, const Eigen::VectorXd& beta) {
  return std::visit(
      overloaded{
          [&](const FusedReg& r) {
            double total = 0.0;
            for (Eigen::Index i = 0; i + 1 < beta.size(); ++i) {
              const double w = r.weights.empty() ? 1.0 : r.weights[i];
              total += w * std::abs(beta[i] - beta[i + 1]);
            }
            return total;
          },
          [&](const GroupLinfReg& r) {
            double total = 0.0;
            for (std::size_t g = 0; g < r.groups.size(); ++g) {
              double m = 0.0;
              for (int i : r.groups[g]) m = std::max(m, std::abs(beta[i]));
              total += r.d[g] * m;
            }
            return total;
          },
          [&](const GraphCutReg& r) { return lovasz_extension(r.g, beta); },
      },
      reg);
}

namespace {

ProxResult prox_lovasz(const SubmodularSpec& g, const Eigen::VectorXd& s, double lambda) {
  const int n = g.size();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const ShiftedSpec shifted = nondecreasing_shift(g.shifted(-s / lambda), ones);
  ProxResult out;
  out.chain = decompose(shifted.spec, ones);
  out.t = base_from_chain(out.chain, ones).x - shifted.beta * ones;
  out.beta = -lambda * out.t;
  return out;
}

}  // namespace

ProxResult prox(const ProxProblem& p) {
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) throw Error(Errc::kInvalidArgument, "lambda must be positive");
  check_finite(p.s, "s");
  const int n = static_cast<int>(p.s.size());
  const SubmodularSpec g = regularizer_spec(p.reg, n);
  if (!std::holds_alternative<GroupLinfReg>(p.reg)) return prox_lovasz(g, p.s, p.lambda);

  // The group norm is the Lovasz extension evaluated at |beta|; solve on |s|
  // with a nonnegativity clamp and restore the signs.
  ProxResult out = prox_lovasz(g, p.s.cwiseAbs(), p.lambda);
  for (int i = 0; i < n; ++i) {
    const double mag = std::max(0.0, out.beta[i]);
    out.beta[i] = p.s[i] < 0.0 ? -mag : mag;
  }
  return out;
}

// ---------------------------------------------------------------------------

MinRatio min_ratio(const SubmodularSpec& g, const Eigen::VectorXd& b) {
  if (g.size() == 0) throw Error(Errc::kInvalidArgument, "min_ratio needs a nonempty ground set");
  const Chain chain = decompose(g, b);
  const BaseVector base = base_from_chain(chain, b);
  return {base.ratios.front(), GroundSubset(base.blocks.front())};
}

// ---------------------------------------------------------------------------

double regression_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets, double lambda,
                            const Regularizer& reg, const Eigen::VectorXd& beta) {
  return 0.5 * (design * beta - targets).squaredNorm() + lambda * penalty(reg, beta);
}

namespace {

double largest_squared_singular_value(const Eigen::MatrixXd& x) {
  if (x.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(x.cols()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = x.transpose() * (x * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(norm - estimate) <= 1e-10 * norm) {
      estimate = norm;
      break;
    }
    estimate = norm;
  }
  return estimate;
}

}  // namespace

RegressionRun fista_regress(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets, double lambda,
                            const Regularizer& reg, const RegressionOptions& options) {
  if (!design.allFinite()) throw Error(Errc::kNonFiniteInput, "design has non-finite entries");
  check_finite(targets, "targets");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::kInvalidArgument, "lambda must be positive");
  if (design.rows() != targets.size()) throw Error(Errc::kInvalidDims, "design rows != target count");

  RegressionRun run;
  run.design = design;
  run.targets = targets;
  run.lambda = lambda;
  // Power iteration approaches from below; the margin keeps 1/L a safe step.
  run.lipschitz = std::max(1.02 * largest_squared_singular_value(design), 1e-12);
  const double L = run.lipschitz;

  auto objective = [&](const Eigen::VectorXd& beta) {
    return regression_objective(design, targets, lambda, reg, beta);
  };
  auto step = [&](const Eigen::VectorXd& from) {
    const Eigen::VectorXd grad = design.transpose() * (design * from - targets);
    ProxResult r = prox({from - grad / L, lambda / L, reg});
    run.prox_minimizations += r.chain.minimization_count;
    run.prox_flow_solves += r.chain.flow_solves;
    return r.beta;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.cols());
  Eigen::VectorXd w = beta;
  double f = objective(beta);
  double t = 1.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd z = step(w);
    double fz = objective(z);
    if (fz > f) {
      // Restart the momentum from the last accepted point.
      t = 1.0;
      z = step(beta);
      fz = objective(z);
      if (fz > f) {
        z = beta;
        fz = f;
      }
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    w = z + ((t - 1.0) / t_next) * (z - beta);
    const double change = (f - fz) / std::max(std::abs(fz), 1e-300);
    beta = std::move(z);
    f = fz;
    t = t_next;
    run.history.push_back(f);
    run.iterations = it;
    if (change < options.tolerance) {
      run.converged = true;
      break;
    }
  }
  run.beta = std::move(beta);
  return run;
}

// ---------------------------------------------------------------------------

namespace {

void fill_design_and_targets(Dataset& data, int N, double sigma, std::mt19937_64& rng) {
  const int n = static_cast<int>(data.true_beta.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  data.design.resize(N, n);
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < n; ++c) data.design(r, c) = normal(rng);
  }
  data.targets = data.design * data.true_beta;
  for (int r = 0; r < N; ++r) data.targets[r] += sigma * normal(rng);
}

}  // namespace

Dataset gen_fused_data(int n, int N, int k, double sigma, std::uint64_t seed) {
  if (n < 1 || N < 1 || k < 0 || k > n) throw Error(Errc::kInvalidDims, "need n >= 1, N >= 1, 0 <= k <= n");
  if (!(sigma >= 0.0)) throw Error(Errc::kInvalidArgument, "sigma must be nonnegative");
  std::mt19937_64 rng(seed);
  Dataset data;
  data.seed = seed;
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  std::vector<int> support;
  auto take = [&](int i) {
    chosen[i] = 1;
    support.push_back(i);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any(0, n - 1);
  if (k > 0) take(any(rng));
  long long misses = 0;
  while (static_cast<int>(support.size()) < k) {
    const int last = support.back();
    const double u = unit(rng);
    int next;
    if (u < 0.4) {
      next = last - 1;
    } else if (u < 0.8) {
      next = last + 1;
    } else {
      // uniform over the features other than the two neighbors
      do {
        next = any(rng);
      } while (n > 2 && std::abs(next - last) == 1);
    }
    if (next >= 0 && next < n && !chosen[next]) {
      take(next);
      misses = 0;
    } else if (++misses > 1000LL * n) {
      for (int i = 0; i < n && static_cast<int>(support.size()) < k; ++i) {
        if (!chosen[i]) take(i);
      }
    }
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  data.true_beta = Eigen::VectorXd::Zero(n);
  std::sort(support.begin(), support.end());
  for (int i : support) data.true_beta[i] = normal(rng);
  fill_design_and_targets(data, N, sigma, rng);
  return data;
}

Dataset gen_group_data(int n, int N, int n_groups, int group_size, std::uint64_t seed, double sigma, int stride) {
  if (n < 1 || N < 1 || n_groups < 1 || group_size < 1 || group_size > n) {
    throw Error(Errc::kInvalidDims, "need n, N, n_groups >= 1 and 1 <= group_size <= n");
  }
  if (!(sigma >= 0.0)) throw Error(Errc::kInvalidArgument, "sigma must be nonnegative");
  if (stride <= 0) stride = n_groups == 1 ? 1 : std::max(1, (n - group_size) / (n_groups - 1));
  std::mt19937_64 rng(seed);
  Dataset data;
  data.seed = seed;
  for (int g = 0; g < n_groups; ++g) {
    std::vector<int> members;
    for (int j = 0; j < group_size; ++j) members.push_back((g * stride + j) % n);
    std::sort(members.begin(), members.end());
    data.groups.push_back(std::move(members));
  }
  data.weights.assign(static_cast<std::size_t>(n_groups), 1.0);
  std::uniform_int_distribution<int> pick(0, n_groups - 1);
  const int first = pick(rng);
  int second = first;
  while (n_groups > 1 && second == first) second = pick(rng);
  data.weights[first] = data.weights[second] = 2.0;

  std::vector<char> causal(static_cast<std::size_t>(n), 0);
  for (int i : data.groups[first]) causal[i] = 1;
  for (int i : data.groups[second]) causal[i] = 1;
  std::normal_distribution<double> normal(0.0, 1.0);
  data.true_beta = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (causal[i]) data.true_beta[i] = normal(rng);
  }
  fill_design_and_targets(data, N, sigma, rng);
  return data;
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error(Errc::kInvalidArgument, "cannot write " + (dir / name).string());
    out.precision(17);
    return out;
  };
  {
    std::ofstream out = open("design.csv");
    for (Eigen::Index r = 0; r < data.design.rows(); ++r) {
      for (Eigen::Index c = 0; c < data.design.cols(); ++c) {
        if (c > 0) out << ',';
        out << data.design(r, c);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out = open("targets.csv");
    for (Eigen::Index r = 0; r < data.targets.size(); ++r) out << data.targets[r] << '\n';
  }
  nlohmann::json meta;
  meta["seed"] = data.seed;
  meta["n"] = data.design.cols();
  meta["N"] = data.design.rows();
  meta["true_beta"] = std::vector<double>(data.true_beta.data(), data.true_beta.data() + data.true_beta.size());
  // 1-based, like every index in the file formats
  std::vector<std::vector<int>> groups = data.groups;
  for (auto& g : groups) {
    for (int& i : g) ++i;
  }
  meta["groups"] = groups;
  meta["weights"] = data.weights;
  std::ofstream out = open("meta.json");
  out << meta.dump(2) << '\n';
}

}  // namespace subflow
