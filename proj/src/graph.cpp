#include "subflow/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

#include "subflow/error.hpp"

namespace subflow {

double FlowNetwork::max_finite_capacity() const {
  double m = 0.0;
  for (const Edge& e : edges_) {
    if (!e.capacity.is_infinite()) m = std::max(m, e.capacity.value());
  }
  return m;
}

bool FlowNetwork::integral() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) {
    return e.capacity.is_infinite() || std::floor(e.capacity.value()) == e.capacity.value();
  });
}

bool FlowNetwork::exact_arithmetic() const {
  double total = 0.0;
  for (const Edge& e : edges_) {
    if (e.capacity.is_infinite()) continue;
    const double scaled = std::ldexp(e.capacity.value(), 16);
    if (std::floor(scaled) != scaled) return false;
    total += e.capacity.value();
  }
  return total < std::ldexp(1.0, 36);
}

FlowNetwork build_network(int n_ground, int n_aux, std::span<const Edge> edges) {
  if (n_ground < 0 || n_aux < 0) {
    throw Error(Errc::kInvalidArgument, "node counts must be nonnegative");
  }
  FlowNetwork net;
  net.n_ground_ = n_ground;
  net.n_aux_ = n_aux;
  const int nodes = net.node_count();

  std::vector<Edge> sorted;
  sorted.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.tail < 0 || e.tail >= nodes || e.head < 0 || e.head >= nodes) {
      throw Error(Errc::kDanglingEndpoint,
                  "edge (" + std::to_string(e.tail) + ", " + std::to_string(e.head) +
                      ") outside [0, " + std::to_string(nodes) + ")");
    }
    const double c = e.capacity.value();
    if (std::isnan(c) || c < 0.0) {
      throw Error(Errc::kNegativeCapacity, "edge (" + std::to_string(e.tail) + ", " +
                                               std::to_string(e.head) + ") has capacity " +
                                               std::to_string(c));
    }
    if (e.tail == e.head) continue;
    sorted.push_back(e);
  }
  std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
    return a.tail != b.tail ? a.tail < b.tail : a.head < b.head;
  });
  for (const Edge& e : sorted) {
    if (!net.edges_.empty() && net.edges_.back().tail == e.tail && net.edges_.back().head == e.head) {
      net.edges_.back().capacity += e.capacity;
    } else {
      net.edges_.push_back(e);
    }
  }
  return net;
}

namespace {

FlowNetwork with_terminal_edges(const FlowNetwork& net, const Eigen::VectorXd& weights,
                                bool from_source) {
  if (weights.size() != net.ground_count()) {
    throw Error(Errc::kInvalidDims, "weight vector length " + std::to_string(weights.size()) +
                                        " != ground count " + std::to_string(net.ground_count()));
  }
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  for (int i = 0; i < net.ground_count(); ++i) {
    const double w = weights[i];
    if (std::isnan(w) || w < 0.0) {
      throw Error(Errc::kNegativeWeight, "weight " + std::to_string(i) + " is " + std::to_string(w));
    }
    if (w == 0.0) continue;
    const int v = net.ground_node(i);
    edges.push_back(from_source ? Edge{FlowNetwork::kSource, v, Capacity(w)}
                                : Edge{v, FlowNetwork::kSink, Capacity(w)});
  }
  return build_network(net.ground_count(), net.aux_count(), edges);
}

}  // namespace

FlowNetwork add_source_adjacent(const FlowNetwork& net, const Eigen::VectorXd& weights) {
  return with_terminal_edges(net, weights, true);
}

FlowNetwork add_sink_adjacent(const FlowNetwork& net, const Eigen::VectorXd& weights) {
  return with_terminal_edges(net, weights, false);
}

FlowNetwork contract(const FlowNetwork& net, const GroundSubset& force_source,
                     const GroundSubset& force_sink) {
  const int n = net.ground_count();
  if (!force_source.fits(n) || !force_sink.fits(n)) {
    throw Error(Errc::kInvalidArgument, "forced set outside the ground set");
  }
  for (int i : force_source) {
    if (force_sink.contains(i)) {
      throw Error(Errc::kOverlappingForcedSets, "ground node " + std::to_string(i) +
                                                    " forced to both terminals");
    }
  }
  std::vector<Edge> edges(net.edges().begin(), net.edges().end());
  for (int i : force_source) {
    edges.push_back({FlowNetwork::kSource, net.ground_node(i), Capacity::infinite()});
  }
  for (int i : force_sink) {
    edges.push_back({net.ground_node(i), FlowNetwork::kSink, Capacity::infinite()});
  }
  return build_network(n, net.aux_count(), edges);
}

Capacity cut_capacity(const FlowNetwork& net, const std::vector<char>& on_source_side) {
  auto side = [&](int v) {
    if (v == FlowNetwork::kSource) return true;
    if (v == FlowNetwork::kSink) return false;
    return on_source_side[static_cast<std::size_t>(v)] != 0;
  };
  Capacity total;
  for (const Edge& e : net.edges()) {
    if (side(e.tail) && !side(e.head)) total += e.capacity;
  }
  return total;
}

Adjacency::Adjacency(const FlowNetwork& net) {
  const int nodes = net.node_count();
  out_start.assign(static_cast<std::size_t>(nodes) + 1, 0);
  in_start.assign(static_cast<std::size_t>(nodes) + 1, 0);
  const auto edges = net.edges();
  for (const Edge& e : edges) {
    ++out_start[static_cast<std::size_t>(e.tail) + 1];
    ++in_start[static_cast<std::size_t>(e.head) + 1];
  }
  for (int v = 0; v < nodes; ++v) {
    out_start[v + 1] += out_start[v];
    in_start[v + 1] += in_start[v];
  }
  out_edges.resize(edges.size());
  in_edges.resize(edges.size());
  std::vector<int> out_fill(out_start.begin(), out_start.end() - 1);
  std::vector<int> in_fill(in_start.begin(), in_start.end() - 1);
  for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
    out_edges[out_fill[edges[k].tail]++] = k;
    in_edges[in_fill[edges[k].head]++] = k;
  }
}

// ---------------------------------------------------------------------------
// DIMACS

namespace {

double parse_capacity_token(const std::string& tok, int line_no) {
  if (tok == "inf" || tok == "infinity" || tok == "Inf") return Capacity::infinite().value();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(Errc::kMalformedHeader,
                "line " + std::to_string(line_no) + ": bad capacity '" + tok + "'");
  }
  return v;
}

int parse_node_token(std::istringstream& ss, int line_no) {
  long long id = 0;
  if (!(ss >> id)) {
    throw Error(Errc::kMalformedHeader, "line " + std::to_string(line_no) + ": expected node id");
  }
  return static_cast<int>(id);
}

}  // namespace

FlowNetwork parse_dimacs(std::istream& in) {
  enum class Role { kUnset, kGround, kAux };
  int n_nodes = -1;
  long long n_arcs = -1;
  int source = -1, sink = -1;
  std::map<int, Role> roles;
  struct RawArc {
    int u, v;
    double cap;
    int line;
  };
  std::vector<RawArc> arcs;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind)) continue;
    if (kind == "c") {
      std::string directive;
      if (ss >> directive && (directive == "ground" || directive == "aux")) {
        const int id = parse_node_token(ss, line_no);
        roles[id] = directive == "ground" ? Role::kGround : Role::kAux;
      }
      continue;
    }
    if (kind == "p") {
      std::string problem;
      if (n_nodes >= 0 || !(ss >> problem >> n_nodes >> n_arcs) || problem != "max" ||
          n_nodes < 2 || n_arcs < 0) {
        throw Error(Errc::kMalformedHeader,
                    "line " + std::to_string(line_no) + ": expected 'p max N M'");
      }
      continue;
    }
    if (n_nodes < 0) {
      throw Error(Errc::kMalformedHeader,
                  "line " + std::to_string(line_no) + ": '" + kind + "' before problem line");
    }
    if (kind == "n") {
      const int id = parse_node_token(ss, line_no);
      std::string which;
      if (!(ss >> which) || (which != "s" && which != "t")) {
        throw Error(Errc::kMalformedHeader,
                    "line " + std::to_string(line_no) + ": expected 'n <id> s|t'");
      }
      if (id < 1 || id > n_nodes) {
        throw Error(Errc::kDanglingEndpoint, "terminal id " + std::to_string(id) + " out of range");
      }
      (which == "s" ? source : sink) = id;
    } else if (kind == "a") {
      const int u = parse_node_token(ss, line_no);
      const int v = parse_node_token(ss, line_no);
      std::string tok;
      if (!(ss >> tok)) {
        throw Error(Errc::kMalformedHeader, "line " + std::to_string(line_no) + ": missing capacity");
      }
      arcs.push_back({u, v, parse_capacity_token(tok, line_no), line_no});
    } else {
      throw Error(Errc::kUnknownLineType,
                  "line " + std::to_string(line_no) + ": unknown line type '" + kind + "'");
    }
  }
  if (n_nodes < 0) throw Error(Errc::kMalformedHeader, "missing 'p max' line");
  if (source < 0 || sink < 0) {
    throw Error(Errc::kMissingTerminal, source < 0 ? "no source line" : "no sink line");
  }
  if (source == sink) throw Error(Errc::kMalformedHeader, "source and sink coincide");
  if (static_cast<long long>(arcs.size()) != n_arcs) {
    throw Error(Errc::kMalformedHeader, "header declares " + std::to_string(n_arcs) +
                                            " arcs, found " + std::to_string(arcs.size()));
  }
  for (const auto& [id, role] : roles) {
    if (id < 1 || id > n_nodes) {
      throw Error(Errc::kDanglingEndpoint, "role directive for unknown node " + std::to_string(id));
    }
    if (id == source || id == sink) {
      throw Error(Errc::kMalformedHeader, "role directive on terminal node " + std::to_string(id));
    }
  }

  std::vector<int> ground, aux;
  for (int id = 1; id <= n_nodes; ++id) {
    if (id == source || id == sink) continue;
    auto it = roles.find(id);
    (it != roles.end() && it->second == Role::kAux ? aux : ground).push_back(id);
  }
  std::vector<int> canon(static_cast<std::size_t>(n_nodes) + 1, -1);
  canon[source] = FlowNetwork::kSource;
  canon[sink] = FlowNetwork::kSink;
  int next = 2;
  for (int id : ground) canon[id] = next++;
  for (int id : aux) canon[id] = next++;

  std::vector<Edge> edges;
  edges.reserve(arcs.size());
  for (const RawArc& a : arcs) {
    if (a.u < 1 || a.u > n_nodes || a.v < 1 || a.v > n_nodes) {
      throw Error(Errc::kDanglingEndpoint,
                  "line " + std::to_string(a.line) + ": arc endpoint outside [1, " +
                      std::to_string(n_nodes) + "]");
    }
    edges.push_back({canon[a.u], canon[a.v], Capacity(a.cap)});
  }
  return build_network(static_cast<int>(ground.size()), static_cast<int>(aux.size()), edges);
}

FlowNetwork parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

std::string write_dimacs(const FlowNetwork& net) {
  std::ostringstream out;
  // Canonical node v is written as DIMACS id v + 1.
  out << "p max " << net.node_count() << ' ' << net.edges().size() << '\n';
  out << "n 1 s\nn 2 t\n";
  for (int j = 0; j < net.aux_count(); ++j) out << "c aux " << net.aux_node(j) + 1 << '\n';
  char buf[64];
  for (const Edge& e : net.edges()) {
    out << "a " << e.tail + 1 << ' ' << e.head + 1 << ' ';
    if (e.capacity.is_infinite()) {
      out << "inf";
    } else {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, e.capacity.value());
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace subflow
