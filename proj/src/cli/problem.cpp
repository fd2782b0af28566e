#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "subflow/cli.hpp"
#include "subflow/error.hpp"

namespace subflow::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(Errc::kSchemaError, where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing \"") + key + "\"");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

Capacity capacity(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return Capacity::infinite();
  return Capacity(number(j, where));
}

Eigen::VectorXd vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<int> index_list(const json& j, int n, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of 1-based indices");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const int v = integer(j[i], where + "[" + std::to_string(i) + "]");
    if (v < 1 || v > n) fail(where, "index " + std::to_string(v) + " outside 1.." + std::to_string(n));
    out.push_back(v - 1);
  }
  return out;
}

// "s", "t", "g<i>", "a<j>" or a bare 1-based ground index.
int node_label(const json& j, int n_ground, int n_aux, const std::string& where) {
  if (j.is_number_integer()) {
    const int i = j.get<int>();
    if (i < 1 || i > n_ground) fail(where, "ground index " + std::to_string(i) + " out of range");
    return 1 + i;
  }
  if (!j.is_string()) fail(where, "expected a node label");
  const std::string s = j.get<std::string>();
  if (s == "s") return FlowNetwork::kSource;
  if (s == "t") return FlowNetwork::kSink;
  if (s.size() >= 2 && (s[0] == 'g' || s[0] == 'a')) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(s.substr(1), &used);
      if (used != s.size() - 1) k = 0;
    } catch (const std::exception&) {
      k = 0;
    }
    const int limit = s[0] == 'g' ? n_ground : n_aux;
    if (k < 1 || k > limit) fail(where, "node label '" + s + "' out of range");
    return s[0] == 'g' ? 1 + k : 1 + n_ground + k;
  }
  fail(where, "unknown node label '" + s + "'");
}

std::vector<Edge> edge_list(const json& j, int n_ground, int n_aux, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of [from, to, capacity]");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    const json& e = j[k];
    if (!e.is_array() || e.size() != 3) fail(at, "expected [from, to, capacity]");
    edges.push_back({node_label(e[0], n_ground, n_aux, at), node_label(e[1], n_ground, n_aux, at),
                     capacity(e[2], at)});
  }
  return edges;
}

}  // namespace

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kNoFiniteCut:
    case Errc::kNonFiniteRatio:
    case Errc::kPositivityViolated:
      return kExitSolver;
    default:
      return kExitInput;
  }
}

FlowNetwork network_from_json(const json& j) {
  if (j.is_object() && j.contains("dimacs")) {
    const json& text = j["dimacs"];
    if (!text.is_string()) fail("network.dimacs", "expected DIMACS text");
    return parse_dimacs(text.get<std::string>());
  }
  const int n_ground = integer(field(j, "n_ground", "network"), "network.n_ground");
  const int n_aux = j.contains("n_aux") ? integer(j["n_aux"], "network.n_aux") : 0;
  if (n_ground < 0 || n_aux < 0) fail("network", "node counts must be nonnegative");
  return build_network(n_ground, n_aux, edge_list(field(j, "edges", "network"), n_ground, n_aux, "network.edges"));
}

FunctionInput function_from_json(const json& j) {
  const std::string where = "function";
  const json& type_field = field(j, "type", where);
  if (!type_field.is_string()) fail(where + ".type", "expected a string");
  const std::string type = type_field.get<std::string>();
  FunctionInput out;
  if (type == "generalized_cut") {
    const FlowNetwork net = network_from_json(j);
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(net.ground_count());
    if (j.contains("shift")) {
      shift = vector(j["shift"], where + ".shift");
      if (shift.size() != net.ground_count()) fail(where + ".shift", "length must equal n_ground");
    }
    out.spec = SubmodularSpec::normalized(net, shift);
  } else if (type == "transformed_cut") {
    const int n = integer(field(j, "n", where), where + ".n");
    if (n < 0) fail(where + ".n", "must be nonnegative");
    std::vector<Edge> edges = edge_list(field(j, "edges", where), n, 0, where + ".edges");
    for (const Edge& e : edges) {
      if (e.tail < 2 || e.head < 2) fail(where + ".edges", "transformed cuts take ground-to-ground edges only");
    }
    const Eigen::VectorXd a = vector(field(j, "a", where), where + ".a");
    out.spec = from_transformed_cut(build_network(n, 0, edges), a);
  } else if (type == "decomposable") {
    const Eigen::VectorXd d = vector(field(j, "d", where), where + ".d");
    const json& wj = field(j, "w", where);
    if (!wj.is_array()) fail(where + ".w", "expected an array of weight vectors");
    std::vector<Eigen::VectorXd> w;
    for (std::size_t k = 0; k < wj.size(); ++k) w.push_back(vector(wj[k], where + ".w[" + std::to_string(k) + "]"));
    const Eigen::VectorXd y = vector(field(j, "y", where), where + ".y");
    out.spec = from_decomposable(d, w, y);
  } else if (type == "negated_density") {
    const int n = integer(field(j, "n", where), where + ".n");
    if (n < 0) fail(where + ".n", "must be nonnegative");
    const json& ej = field(j, "edges", where);
    if (!ej.is_array()) fail(where + ".edges", "expected an array of [u, v, weight]");
    std::vector<WeightedEdge> edges;
    for (std::size_t k = 0; k < ej.size(); ++k) {
      const std::string at = where + ".edges[" + std::to_string(k) + "]";
      if (!ej[k].is_array() || ej[k].size() != 3) fail(at, "expected [u, v, weight]");
      const int u = integer(ej[k][0], at), v = integer(ej[k][1], at);
      if (u < 1 || u > n || v < 1 || v > n) throw Error(Errc::kDanglingEndpoint, at + ": endpoint out of range");
      edges.push_back({u - 1, v - 1, number(ej[k][2], at)});
    }
    out.spec = from_negated_density(n, edges);
  } else if (type == "table") {
    const int n = integer(field(j, "n", where), where + ".n");
    if (n < 0 || n > kMaxEnumeration) fail(where + ".n", "table functions need 0 <= n <= 20");
    const Eigen::VectorXd values = vector(field(j, "values", where), where + ".values");
    if (values.size() != (Eigen::Index{1} << n)) fail(where + ".values", "need 2^n values indexed by bitmask");
    out.table = TableFunction(n, std::vector<double>(values.data(), values.data() + values.size()));
  } else {
    fail(where + ".type", "unknown function type '" + type + "'");
  }
  return out;
}

ObjectiveVariant variant_from_json(const json& j) {
  if (j.is_null()) return ObjectiveVariant::quadratic_over_b();
  const std::string type = j.is_string() ? j.get<std::string>() : field(j, "type", "variant").get<std::string>();
  if (type == "quadratic_over_b") return ObjectiveVariant::quadratic_over_b();
  if (type == "power") return ObjectiveVariant::power(number(field(j, "p", "variant"), "variant.p"));
  if (type == "log_barrier") return ObjectiveVariant::log_barrier();
  if (type == "kl") return ObjectiveVariant::kl();
  if (type == "perspective") {
    const std::string g0 = field(j, "g0", "variant").get<std::string>();
    if (g0 == "square") return ObjectiveVariant::perspective([](double u) { return u * u; });
    if (g0 == "neg_log") return ObjectiveVariant::perspective([](double u) { return -std::log(u); });
    fail("variant.g0", "known g0 functions are square and neg_log");
  }
  fail("variant.type", "unknown variant '" + type + "'");
}

Regularizer regularizer_from_json(const json& j, int n) {
  const std::string where = "regularizer";
  const std::string type = field(j, "type", where).get<std::string>();
  if (type == "fused") {
    FusedReg r;
    if (j.contains("weights")) {
      const Eigen::VectorXd w = vector(j["weights"], where + ".weights");
      r.weights.assign(w.data(), w.data() + w.size());
    }
    return r;
  }
  if (type == "group_linf") {
    GroupLinfReg r;
    const json& gj = field(j, "groups", where);
    if (!gj.is_array()) fail(where + ".groups", "expected an array of index arrays");
    for (std::size_t g = 0; g < gj.size(); ++g) {
      r.groups.push_back(index_list(gj[g], n, where + ".groups[" + std::to_string(g) + "]"));
    }
    if (j.contains("d")) {
      const Eigen::VectorXd d = vector(j["d"], where + ".d");
      r.d.assign(d.data(), d.data() + d.size());
    } else {
      r.d.assign(r.groups.size(), 1.0);
    }
    return r;
  }
  if (type == "graph_cut") {
    FunctionInput f = function_from_json(field(j, "function", where));
    if (!f.spec) fail(where + ".function", "a graph-backed function is required");
    return GraphCutReg{*f.spec};
  }
  fail(where + ".type", "unknown regularizer '" + type + "'");
}

void check_problem_header(const json& problem, const std::string& expected_kind) {
  if (!problem.is_object()) fail("problem", "expected a JSON object");
  const json& version = field(problem, "version", "problem");
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    fail("problem.version", "unsupported format version (this tool reads version 1)");
  }
  if (problem.contains("kind")) {
    if (!problem["kind"].is_string() || problem["kind"].get<std::string>() != expected_kind) {
      fail("problem.kind", "expected \"" + expected_kind + "\"");
    }
  }
}

std::string config_hash(const json& problem) {
  const std::string canonical = problem.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::kInvalidArgument, "SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

void validate_result(const json& j) {
  if (!j.is_object()) fail("result", "expected an object");
  if (!field(j, "tool_version", "result").is_string()) fail("result.tool_version", "expected a string");
  if (!field(j, "kind", "result").is_string()) fail("result.kind", "expected a string");
  const json& hash = field(j, "config_hash", "result");
  if (!hash.is_string() || hash.get<std::string>().size() != 64) fail("result.config_hash", "expected SHA-256 hex");
  if (!field(j, "outputs", "result").is_object()) fail("result.outputs", "expected an object");
  const json& timings = field(j, "timings", "result");
  if (!timings.is_object()) fail("result.timings", "expected an object");
  for (const auto& [key, value] : timings.items()) {
    if (!value.is_number()) fail("result.timings." + key, "expected a number");
  }
  static const std::map<std::string, std::vector<const char*>> required{
      {"maxflow", {"value", "cut", "side"}},
      {"solve", {"chain", "breakpoints", "x", "blocks", "minimization_count"}},
      {"prox", {"beta", "t", "objective"}},
      {"densest", {"levels"}},
      {"minratio", {"xi", "set"}},
      {"regress", {"beta", "history", "iterations", "converged"}},
      {"gen", {"dir", "n", "N"}},
  };
  const auto it = required.find(j["kind"].get<std::string>());
  if (it == required.end()) fail("result.kind", "unknown kind");
  for (const char* key : it->second) field(j["outputs"], key, "result.outputs");
}

json to_json(const GroundSubset& s) {
  json out = json::array();
  for (int i : s) out.push_back(i + 1);
  return out;
}

}  // namespace subflow::cli
