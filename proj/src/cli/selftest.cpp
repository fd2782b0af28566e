#include <functional>
#include <ostream>

#include "subflow/cli.hpp"
#include "subflow/maxflow.hpp"
#include "subflow/oracle.hpp"

namespace subflow::cli {

namespace {

struct Tally {
  int checks = 0;
  int failures = 0;

  void expect(bool ok) {
    ++checks;
    if (!ok) ++failures;
  }
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

}  // namespace

bool selftest(const SelftestOptions& options, std::ostream& out) {
  const double tol = 1e-9 * options.tolerance_scale;
  oracle::Rng rng(options.seed);

  const std::vector<std::pair<const char*, std::function<void(Tally&)>>> suites{
      {"maxflow-vs-enumeration",
       [&](Tally& t) {
         for (int rep = 0; rep < 60; ++rep) {
           const FlowNetwork net = oracle::random_network(rng, oracle::uniform_int(rng, 0, 6),
                                                          oracle::uniform_int(rng, 0, 3));
           const oracle::EnumeratedCut truth = oracle::enumerate_min_cuts(net);
           MaxFlowSolver solver(net);
           t.expect(close(solver.value(), truth.value, tol));
           const std::uint64_t hi = oracle::side_mask(solver.maximal_source_side());
           const std::uint64_t lo = oracle::side_mask(solver.minimal_source_side());
           for (std::uint64_t m : truth.minimizers) t.expect((m & ~hi) == 0 && (lo & ~m) == 0);
         }
       }},
      {"generalized-cut-evaluation",
       [&](Tally& t) {
         for (int rep = 0; rep < 30; ++rep) {
           const int n = oracle::uniform_int(rng, 1, 6);
           const FlowNetwork net = oracle::random_network(rng, n, oracle::uniform_int(rng, 0, 3));
           const SubmodularSpec f = from_generalized_cut(net);
           const double empty = oracle::naive_generalized_cut(net, 0);
           for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
             t.expect(close(f.evaluate(GroundSubset::from_mask(m, n)), oracle::naive_generalized_cut(net, m) - empty,
                            tol));
           }
         }
       }},
      {"submodularity",
       [&](Tally& t) {
         for (int rep = 0; rep < 20; ++rep) {
           const int n = oracle::uniform_int(rng, 1, 7);
           const auto data = oracle::random_decomposable(rng, n, 3);
           t.expect(check_submodular(from_decomposable(data.d, data.w, data.y), tol));
           t.expect(check_submodular(from_transformed_cut(oracle::random_ground_graph(rng, n),
                                                          oracle::random_integer_vector(rng, n, -5, 5)),
                                     tol));
           t.expect(check_submodular(from_negated_density(n, oracle::random_undirected(rng, n)), tol));
           t.expect(check_submodular(from_generalized_cut(oracle::random_network(rng, n, 2)), tol));
         }
       }},
      {"chain-vs-brute-force",
       [&](Tally& t) {
         for (int rep = 0; rep < 40; ++rep) {
           const int n = oracle::uniform_int(rng, 1, 7);
           const SubmodularSpec f = from_generalized_cut(oracle::random_network(rng, n, oracle::uniform_int(rng, 0, 3)));
           const Eigen::VectorXd b = oracle::random_integer_vector(rng, n, 1, 3);
           const Chain a = decompose(f, b);
           const Chain c = brute_force_chain(f, b);
           bool same = a.length() == c.length();
           for (int j = 0; same && j <= a.length(); ++j) same = a.set(j) == c.set(j);
           for (int j = 0; same && j < a.length(); ++j) same = close(a.breakpoints[j], c.breakpoints[j], tol);
           t.expect(same);
           t.expect(a.minimization_count <= 2 * n - 1);
         }
       }},
      {"base-membership",
       [&](Tally& t) {
         for (int rep = 0; rep < 30; ++rep) {
           const int n = oracle::uniform_int(rng, 1, 8);
           const SubmodularSpec f = from_generalized_cut(oracle::random_network(rng, n, 2));
           const Eigen::VectorXd b = oracle::random_integer_vector(rng, n, 1, 3);
           const BaseVector x = base_from_chain(decompose(f, b), b);
           const TableFunction table = tabulate(f);
           t.expect(oracle::base_violation(table, x.x) <= tol);
           t.expect(close(x.x.sum(), table.at((std::uint64_t{1} << n) - 1), tol));
         }
       }},
      {"prox-certificate",
       [&](Tally& t) {
         for (int rep = 0; rep < 10; ++rep) {
           const int n = oracle::uniform_int(rng, 1, 8);
           Eigen::VectorXd s(n);
           for (int i = 0; i < n; ++i) s[i] = oracle::uniform_real(rng, -3, 3);
           const double lambda = oracle::uniform_real(rng, 0.1, 2.0);
           const ProxProblem fused{s, lambda, FusedReg{}};
           t.expect(oracle::prox_certificate(rng, fused, prox(fused).beta, 200) <= 1e3 * tol);
           const ProxProblem group{s, lambda, GroupLinfReg{{{0}, {0, n - 1}}, {1.0, 2.0}}};
           t.expect(oracle::prox_certificate(rng, group, prox(group).beta, 200) <= 1e3 * tol);
         }
       }},
      {"min-ratio",
       [&](Tally& t) {
         for (int rep = 0; rep < 30; ++rep) {
           const int n = oracle::uniform_int(rng, 1, 8);
           const auto data = oracle::random_decomposable(rng, n, 2);
           const SubmodularSpec g =
               nondecreasing_shift(from_decomposable(data.d, data.w, data.y), Eigen::VectorXd::Ones(n)).spec;
           const Eigen::VectorXd b = oracle::random_integer_vector(rng, n, 1, 4);
           t.expect(close(min_ratio(g, b).xi, oracle::min_ratio_by_enumeration(tabulate(g), b), tol));
         }
       }},
      {"densest-levels",
       [&](Tally& t) {
         for (int rep = 0; rep < 20; ++rep) {
           const int n = oracle::uniform_int(rng, 2, 9);
           const auto edges = oracle::random_undirected(rng, n);
           const auto best = oracle::max_theta_by_size(n, edges);
           for (const DensityLevel& l : densest_levels(n, edges).levels) t.expect(close(l.weight, best[l.k], tol));
         }
       }},
  };

  int failed = 0;
  for (const auto& [name, body] : suites) {
    Tally tally;
    try {
      body(tally);
    } catch (const std::exception& e) {
      out << "suite " << name << ": FAIL (exception: " << e.what() << ")\n";
      ++failed;
      continue;
    }
    if (tally.failures == 0) {
      out << "suite " << name << ": PASS (" << tally.checks << " checks)\n";
    } else {
      out << "suite " << name << ": FAIL (" << tally.failures << " of " << tally.checks << " checks)\n";
      ++failed;
    }
  }
  out << "selftest: " << suites.size() << " suites, " << (failed == 0 ? "all passed" : std::to_string(failed) + " failed")
      << "\n";
  return failed == 0;
}

}  // namespace subflow::cli
