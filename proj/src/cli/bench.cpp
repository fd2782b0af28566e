#include <atomic>
#include <chrono>
#include <random>
#include <sstream>
#include <thread>

#include "subflow/cli.hpp"
#include "subflow/error.hpp"

namespace subflow::cli {

namespace {

struct Row {
  int n = 0;
  long long m = 0;
  std::uint64_t seed = 0;
  long long minimizations = 0;
  long long flow_solves = 0;
  int chain_length = 0;
  int iterations = 0;
  double value = 0.0;
  double wall_ms = 0.0;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

Row fused_instance(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd s(n);
  double level = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i % 100 == 0) level = 3.0 * normal(rng);
    s[i] = level + normal(rng);
  }
  const ProxProblem p{s, 0.5, FusedReg{}};
  const auto t0 = Clock::now();
  const ProxResult r = prox(p);
  Row row;
  row.wall_ms = since(t0);
  row.n = n;
  row.m = 2LL * (n - 1);
  row.seed = seed;
  row.minimizations = r.chain.minimization_count;
  row.flow_solves = r.chain.flow_solves;
  row.chain_length = r.chain.length();
  row.value = 0.5 * (r.beta - s).squaredNorm() + p.lambda * penalty(p.reg, r.beta);
  return row;
}

Row table1_instance(int n, int N, int k, std::uint64_t seed) {
  const Dataset d = gen_fused_data(n, N, k, 0.1, seed);
  const auto t0 = Clock::now();
  const RegressionRun run = fista_regress(d.design, d.targets, 1.0, FusedReg{});
  Row row;
  row.wall_ms = since(t0);
  row.n = n;
  row.m = 2LL * (n - 1);
  row.seed = seed;
  row.minimizations = run.prox_minimizations;
  row.flow_solves = run.prox_flow_solves;
  row.iterations = run.iterations;
  row.value = run.history.empty() ? 0.0 : run.history.back();
  return row;
}

Row densest_instance(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> node(0, n - 1), weight(1, 5);
  std::vector<WeightedEdge> edges;
  for (long long e = 0; e < 4LL * n; ++e) {
    const int u = node(rng), v = node(rng);
    if (u != v) edges.push_back({u, v, static_cast<double>(weight(rng))});
  }
  const auto t0 = Clock::now();
  const DensityReport r = densest_levels(n, edges);
  Row row;
  row.wall_ms = since(t0);
  row.n = n;
  row.m = static_cast<long long>(edges.size());
  row.seed = seed;
  row.minimizations = r.chain.minimization_count;
  row.flow_solves = r.chain.flow_solves;
  row.chain_length = r.chain.length();
  for (const DensityLevel& l : r.levels) row.value = std::max(row.value, l.intensity);
  return row;
}

}  // namespace

std::string bench_csv(const std::string& profile, int jobs, std::uint64_t seed) {
  std::vector<std::function<Row()>> tasks;
  if (profile == "fused-scaling") {
    for (int n : {1000, 10000, 100000}) tasks.push_back([n, s = seed + tasks.size()] { return fused_instance(n, s); });
  } else if (profile == "table1-desk") {
    tasks.push_back([s = seed] { return table1_instance(500, 500, 20, s); });
    tasks.push_back([s = seed + 1] { return table1_instance(1000, 1000, 20, s); });
  } else if (profile == "densest") {
    for (int n : {1000, 5000, 20000}) tasks.push_back([n, s = seed + tasks.size()] { return densest_instance(n, s); });
  } else {
    throw Error(Errc::kUnknownProfile, "--profile: unknown profile '" + profile + "'");
  }

  std::vector<Row> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        rows[i] = tasks[i]();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs && j < static_cast<int>(tasks.size()); ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::string& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }

  std::ostringstream csv;
  csv.precision(17);
  csv << "profile,instance,n,m,seed,minimizations,flow_solves,chain_length,iterations,value,wall_ms\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv << profile << ',' << i << ',' << r.n << ',' << r.m << ',' << r.seed << ',' << r.minimizations << ','
        << r.flow_solves << ',' << r.chain_length << ',' << r.iterations << ',' << r.value << ',' << r.wall_ms
        << '\n';
  }
  return csv.str();
}

}  // namespace subflow::cli
