#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "subflow/cli.hpp"
#include "subflow/error.hpp"
#include "subflow/maxflow.hpp"

namespace subflow::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_color_st("subflow");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SUBFLOW_LOG")) l->set_level(spdlog::level::from_str(env));
    return l;
  }();
  return log;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kUsageError, "--input: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_problem(const std::string& path, const std::string& kind) {
  json problem;
  try {
    problem = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(Errc::kSchemaError, "--input: " + std::string(e.what()));
  }
  check_problem_header(problem, kind);
  return problem;
}

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd weights_or_ones(const json& problem, int n) {
  if (!problem.contains("b")) return Eigen::VectorXd::Ones(n);
  const std::vector<double> b = problem["b"].get<std::vector<double>>();
  if (static_cast<int>(b.size()) != n) throw Error(Errc::kInvalidDims, "b: length must equal the ground set size");
  return Eigen::Map<const Eigen::VectorXd>(b.data(), n);
}

json chain_json(const Chain& c) {
  json sets = json::array();
  for (int j = 0; j <= c.length(); ++j) sets.push_back(to_json(c.set(j)));
  return sets;
}

json blocks_json(const BaseVector& x) {
  json blocks = json::array();
  for (const auto& blk : x.blocks) {
    json b = json::array();
    for (int i : blk) b.push_back(i + 1);
    blocks.push_back(b);
  }
  return blocks;
}

json cmd_maxflow(const std::string& input, const std::string& cut_flag, bool flows, json& problem) {
  const std::string text = read_file(input);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  FlowNetwork net;
  std::string cut = "maximal";
  if (first != std::string::npos && text[first] == '{') {
    try {
      problem = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(Errc::kSchemaError, "--input: " + std::string(e.what()));
    }
    check_problem_header(problem, "maxflow");
    if (!problem.contains("network")) throw Error(Errc::kSchemaError, "problem: missing \"network\"");
    net = network_from_json(problem["network"]);
    if (problem.contains("cut")) cut = problem["cut"].get<std::string>();
  } else {
    net = parse_dimacs(text);
    problem = {{"version", kFormatVersion}, {"kind", "maxflow"}, {"network", {{"dimacs", text}}}};
  }
  if (!cut_flag.empty()) cut = cut_flag;
  if (cut != "maximal" && cut != "minimal") throw Error(Errc::kUsageError, "--cut: expected maximal or minimal");
  problem["cut"] = cut;

  MaxFlowSolver solver(net);
  const std::vector<char> side = cut == "maximal" ? solver.maximal_source_side() : solver.minimal_source_side();
  json ground = json::array(), aux = json::array();
  for (int i = 0; i < net.ground_count(); ++i) {
    if (side[net.ground_node(i)]) ground.push_back(i + 1);
  }
  for (int j = 0; j < net.aux_count(); ++j) {
    if (side[net.aux_node(j)]) aux.push_back(j + 1);
  }
  json out{{"value", solver.value()}, {"cut", cut}, {"side", ground}, {"aux_side", aux}};
  if (flows) {
    auto label = [&](int v) -> std::string {
      if (v == FlowNetwork::kSource) return "s";
      if (v == FlowNetwork::kSink) return "t";
      if (net.is_ground(v)) return "g" + std::to_string(net.ground_index(v) + 1);
      return "a" + std::to_string(v - 1 - net.ground_count());
    };
    const std::vector<double> f = solver.edge_flows();
    json list = json::array();
    for (std::size_t k = 0; k < f.size(); ++k) {
      list.push_back({label(net.edges()[k].tail), label(net.edges()[k].head), f[k]});
    }
    out["flows"] = list;
  }
  return out;
}

json cmd_solve(const json& problem) {
  const FunctionInput f = function_from_json(problem.at("function"));
  const int n = f.size();
  const Eigen::VectorXd b = weights_or_ones(problem, n);
  const ObjectiveVariant variant = variant_from_json(problem.value("variant", json()));
  const bool shift = problem.value("make_nondecreasing", false);

  Chain chain;
  BaseVector x;
  double beta = 0.0;
  if (f.spec) {
    SubmodularSpec spec = *f.spec;
    if (shift) {
      ShiftedSpec s = nondecreasing_shift(spec, b);
      spec = std::move(s.spec);
      beta = s.beta;
    }
    check_variant_domain(variant, BaseVector{});
    chain = decompose(spec, b);
  } else {
    if (shift) throw Error(Errc::kUsageError, "make_nondecreasing needs a graph-backed function");
    chain = decompose(*f.table, b);
  }
  x = base_from_chain(chain, b);
  check_variant_domain(variant, x);
  json out{{"n", n},
           {"chain", chain_json(chain)},
           {"breakpoints", chain.breakpoints},
           {"x", vec(x.x - beta * b)},
           {"blocks", blocks_json(x)},
           {"ratios", x.ratios},
           {"shift_beta", beta},
           {"objective", objective_value(variant, x.x, b)},
           {"minimization_count", chain.minimization_count},
           {"flow_solves", chain.flow_solves}};
  return out;
}

json cmd_prox(const json& problem) {
  const std::vector<double> s = problem.at("s").get<std::vector<double>>();
  const int n = static_cast<int>(s.size());
  ProxProblem p{Eigen::Map<const Eigen::VectorXd>(s.data(), n), problem.at("lambda").get<double>(),
                regularizer_from_json(problem.at("regularizer"), n)};
  const ProxResult r = prox(p);
  const double pen = penalty(p.reg, r.beta);
  return {{"beta", vec(r.beta)},
          {"t", vec(r.t)},
          {"penalty", pen},
          {"objective", 0.5 * (r.beta - p.s).squaredNorm() + p.lambda * pen},
          {"minimization_count", r.chain.minimization_count}};
}

json cmd_densest(const json& problem) {
  const json& g = problem.at("graph");
  json wrapped = g;
  wrapped["type"] = "negated_density";
  // reuse the function reader for validation of the edge list
  const FunctionInput f = function_from_json(wrapped);
  const int n = f.size();
  std::vector<WeightedEdge> edges;
  for (const json& e : g.at("edges")) edges.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1, e[2].get<double>()});
  const DensityReport r = densest_levels(n, edges);
  json levels = json::array();
  for (const DensityLevel& l : r.levels) {
    levels.push_back({{"set", to_json(l.set)}, {"k", l.k}, {"weight", l.weight}, {"intensity", l.intensity}});
  }
  return {{"levels", levels}, {"minimization_count", r.chain.minimization_count}};
}

json cmd_minratio(const json& problem) {
  const FunctionInput f = function_from_json(problem.at("function"));
  const Eigen::VectorXd b = weights_or_ones(problem, f.size());
  MinRatio r;
  if (f.spec) {
    r = min_ratio(*f.spec, b);
  } else {
    if (f.size() == 0) throw Error(Errc::kInvalidArgument, "min_ratio needs a nonempty ground set");
    const BaseVector x = base_from_chain(decompose(*f.table, b), b);
    r = {x.ratios.front(), GroundSubset(x.blocks.front())};
  }
  return {{"xi", r.xi}, {"set", to_json(r.set)}};
}

json cmd_regress(const json& problem) {
  const json& data = problem.at("data");
  const std::uint64_t seed = problem.value("seed", std::uint64_t{0});
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  json extra = json::object();
  if (data.contains("generate")) {
    const std::string kind = data["generate"].get<std::string>();
    Dataset d;
    if (kind == "fused") {
      d = gen_fused_data(data.at("n").get<int>(), data.at("N").get<int>(), data.at("k").get<int>(),
                         data.value("sigma", 0.1), seed);
    } else if (kind == "group") {
      d = gen_group_data(data.at("n").get<int>(), data.at("N").get<int>(), data.at("n_groups").get<int>(),
                         data.value("group_size", 15), seed, data.value("sigma", 0.1), data.value("stride", 0));
    } else {
      throw Error(Errc::kSchemaError, "data.generate: expected fused or group");
    }
    x = d.design;
    y = d.targets;
    extra["true_beta"] = vec(d.true_beta);
  } else {
    const auto rows = data.at("design").get<std::vector<std::vector<double>>>();
    const std::vector<double> t = data.at("targets").get<std::vector<double>>();
    const int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    x.resize(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(rows[r].size()) != cols) throw Error(Errc::kInvalidDims, "data.design: ragged rows");
      for (int c = 0; c < cols; ++c) x(static_cast<Eigen::Index>(r), c) = rows[r][c];
    }
    y = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  }
  const Regularizer reg = regularizer_from_json(problem.at("regularizer"), static_cast<int>(x.cols()));
  RegressionOptions opt;
  opt.tolerance = problem.value("tolerance", opt.tolerance);
  opt.max_iterations = problem.value("max_iterations", opt.max_iterations);
  const RegressionRun run = fista_regress(x, y, problem.at("lambda").get<double>(), reg, opt);
  json out{{"beta", vec(run.beta)},
           {"history", run.history},
           {"iterations", run.iterations},
           {"converged", run.converged},
           {"lipschitz", run.lipschitz}};
  out.update(extra);
  return out;
}

void emit(const json& result, const std::string& out_path, std::ostream& out) {
  const std::string text = result.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path);
  if (!file) throw Error(Errc::kUsageError, "--out: cannot write '" + out_path + "'");
  file << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"subflow: separable convex minimization over submodular base polytopes via parametric flows"};
  app.require_subcommand(1);

  std::string input, out_path, cut, profile = "fused-scaling", gen_kind;
  bool flows = false;
  int jobs = 1;
  std::uint64_t seed = 1;
  int gen_n = 500, gen_N = 500, gen_k = 20, gen_groups = 20, gen_size = 15, gen_stride = 0;
  double gen_sigma = 0.1, inject_scale = 1.0;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--input", input, "problem file (JSON)")->required();
    sub->add_option("--out", out_path, "write the result here instead of stdout");
  };
  CLI::App* maxflow = app.add_subcommand("maxflow", "maximum flow and minimum cut");
  add_io(maxflow);
  maxflow->add_option("--cut", cut, "maximal or minimal source side");
  maxflow->add_flag("--flows", flows, "include edge flows");
  CLI::App* solve = app.add_subcommand("solve", "minimum-norm base via the decomposition algorithm");
  add_io(solve);
  CLI::App* proxc = app.add_subcommand("prox", "proximal operator of a structured norm");
  add_io(proxc);
  CLI::App* densest = app.add_subcommand("densest", "dense subgraph level sets");
  add_io(densest);
  CLI::App* minratio = app.add_subcommand("minratio", "minimum ratio g(S)/b(S)");
  add_io(minratio);
  CLI::App* regress = app.add_subcommand("regress", "structured regression by accelerated proximal gradient");
  add_io(regress);

  CLI::App* gen = app.add_subcommand("gen", "synthetic regression data");
  gen->add_option("kind", gen_kind, "fused or group")->required()->check(CLI::IsMember({"fused", "group"}));
  gen->add_option("--n", gen_n, "feature count");
  gen->add_option("--N", gen_N, "sample count");
  gen->add_option("--k", gen_k, "causal features (fused)");
  gen->add_option("--groups", gen_groups, "group count (group)");
  gen->add_option("--group-size", gen_size, "group size (group)");
  gen->add_option("--stride", gen_stride, "group offset stride, 0 = even spread (group)");
  gen->add_option("--sigma", gen_sigma, "noise level");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out_path, "output directory")->required();

  CLI::App* bench = app.add_subcommand("bench", "timing profiles as CSV");
  bench->add_option("--profile", profile, "fused-scaling, table1-desk or densest");
  bench->add_option("--jobs", jobs, "instances run in parallel")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--out", out_path, "write the CSV here instead of stdout");

  CLI::App* self = app.add_subcommand("selftest", "oracle equivalence suites");
  self->add_option("--seed", seed, "random seed");
  self->add_option("--inject-tolerance-scale", inject_scale)->group("");  // hidden: corrupts tolerances

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << "\n";
    return kExitInput;
  }

  const auto start = Clock::now();
  auto log = logger();
  try {
    if (*bench) {
      log->info("bench profile {}", profile);
      const std::string csv = bench_csv(profile, jobs, seed);
      if (out_path.empty()) {
        out << csv;
      } else {
        std::ofstream file(out_path);
        if (!file) throw Error(Errc::kUsageError, "--out: cannot write '" + out_path + "'");
        file << csv;
      }
      return kExitOk;
    }
    if (*self) {
      SelftestOptions opt;
      opt.seed = seed;
      opt.tolerance_scale = inject_scale;
      return selftest(opt, out) ? kExitOk : kExitFailure;
    }

    json problem;
    json outputs;
    std::string kind;
    if (*gen) {
      kind = "gen";
      const Dataset d = gen_kind == "fused"
                            ? gen_fused_data(gen_n, gen_N, gen_k, gen_sigma, seed)
                            : gen_group_data(gen_n, gen_N, gen_groups, gen_size, seed, gen_sigma, gen_stride);
      write_dataset(d, out_path);
      problem = {{"version", kFormatVersion}, {"kind", "gen"}, {"generator", gen_kind}, {"n", gen_n},
                 {"N", gen_N}, {"k", gen_k}, {"groups", gen_groups}, {"group_size", gen_size},
                 {"stride", gen_stride}, {"sigma", gen_sigma}, {"seed", seed}};
      outputs = {{"dir", out_path}, {"n", gen_n}, {"N", gen_N},
                 {"nonzeros", (d.true_beta.array() != 0.0).count()}};
      out_path.clear();
    } else if (*maxflow) {
      kind = "maxflow";
      outputs = cmd_maxflow(input, cut, flows, problem);
    } else {
      CLI::App* sub = app.get_subcommands().front();
      kind = sub->get_name();
      problem = read_problem(input, kind);
      log->info("{}: read {}", kind, input);
      if (kind == "solve") outputs = cmd_solve(problem);
      if (kind == "prox") outputs = cmd_prox(problem);
      if (kind == "densest") outputs = cmd_densest(problem);
      if (kind == "minratio") outputs = cmd_minratio(problem);
      if (kind == "regress") outputs = cmd_regress(problem);
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    json result{{"tool_version", kToolVersion},
                {"kind", kind},
                {"config_hash", config_hash(problem)},
                {"outputs", outputs},
                {"timings", {{"total_ms", ms}}}};
    validate_result(result);
    emit(result, out_path, out);
    log->info("{} finished in {:.3f} ms", kind, ms);
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "SchemaError: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace subflow::cli
