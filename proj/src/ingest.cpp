#include "hypograph/ingest.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hypograph {

std::string ParseError::locate(const std::string& what, int line, int column) {
  std::string out = "line " + std::to_string(line);
  if (column >= 0) out += ", column " + std::to_string(column);
  out += ": " + what;
  return out;
}

std::vector<double> Dataset::targets() const {
  std::vector<double> y;
  y.reserve(samples.size());
  for (const Sample& s : samples) y.push_back(s.y);
  return y;
}

void Dataset::validate() const {
  std::set<std::string> ids;
  for (const Sample& s : samples) {
    if (!ids.insert(s.graph.id).second)
      throw GraphError("dataset '" + name + "': duplicate graph id '" +
                       s.graph.id + "'");
    if (!std::isfinite(s.y))
      throw GraphError("dataset '" + name + "': non-finite target for '" +
                       s.graph.id + "'");
    s.graph.validate();
  }
}

// ---------------------------------------------------------------------------
// JSON lines

ParsedLine parse_graph_jsonl(const std::string& line, int line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_number);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", line_number);
  ParsedLine out;
  try {
    if (!j.contains("id") || !j["id"].is_string())
      throw ParseError("missing string field 'id'", line_number);
    out.graph.id = j["id"].get<std::string>();
    if (!j.contains("nodes") || !j["nodes"].is_array())
      throw ParseError("missing array field 'nodes'", line_number);
    for (const auto& jn : j["nodes"]) {
      if (!jn.is_object() || !jn.contains("kind") || !jn["kind"].is_string())
        throw ParseError("node without string 'kind'", line_number);
      NodeLabel nl;
      nl.kind = jn["kind"].get<std::string>();
      if (jn.contains("attrs")) {
        if (!jn["attrs"].is_object())
          throw ParseError("node 'attrs' must be an object", line_number);
        for (const auto& [k, v] : jn["attrs"].items()) {
          if (!v.is_string())
            throw ParseError("node attr '" + k + "' must be a string",
                             line_number);
          nl.attrs[k] = v.get<std::string>();
        }
      }
      out.graph.nodes.push_back(std::move(nl));
    }
    if (!j.contains("edges") || !j["edges"].is_array())
      throw ParseError("missing array field 'edges'", line_number);
    for (const auto& je : j["edges"]) {
      if (!je.is_array() || je.size() != 3 || !je[0].is_number_integer() ||
          !je[1].is_number_integer() || !je[2].is_object() ||
          !je[2].contains("kind") || !je[2]["kind"].is_string())
        throw ParseError("edge must be [u, v, {\"kind\": str}]", line_number);
      out.graph.edges.push_back({je[0].get<int>(), je[1].get<int>(),
                                 {je[2]["kind"].get<std::string>()}});
    }
    if (j.contains("y")) {
      if (!j["y"].is_number())
        throw ParseError("field 'y' must be a number", line_number);
      out.y = j["y"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field: ") + e.what(), line_number);
  }
  try {
    out.graph.validate();
  } catch (const GraphError& e) {
    throw ParseError(e.what(), line_number);
  }
  return out;
}

std::string graph_to_jsonl(const LabeledGraph& g, std::optional<double> y) {
  nlohmann::ordered_json j;
  j["id"] = g.id;
  j["nodes"] = nlohmann::json::array();
  for (const NodeLabel& nl : g.nodes) {
    nlohmann::ordered_json jn;
    jn["kind"] = nl.kind;
    if (!nl.attrs.empty()) {
      nlohmann::ordered_json ja;
      for (const auto& [k, v] : nl.attrs) ja[k] = v;
      jn["attrs"] = ja;
    }
    j["nodes"].push_back(jn);
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges)
    j["edges"].push_back({e.u, e.v, {{"kind", e.label.kind}}});
  if (y) j["y"] = *y;
  return j.dump();
}

Dataset load_jsonl_dataset(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open dataset file '" + path + "'");
  Dataset ds;
  ds.name = name.empty() ? path : name;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    ParsedLine pl = parse_graph_jsonl(line, lineno);
    if (!pl.y)
      throw ParseError("missing target field 'y'", lineno);
    ds.samples.push_back({std::move(pl.graph), *pl.y});
  }
  ds.validate();
  return ds;
}

void save_jsonl_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphError("cannot write dataset file '" + path + "'");
  for (const Sample& s : ds.samples) out << graph_to_jsonl(s.graph, s.y) << '\n';
}

// ---------------------------------------------------------------------------
// Molecular line notation

namespace {

const char* kSingle = "single";
const char* kDouble = "double";
const char* kTriple = "triple";
const char* kAromatic = "aromatic";

bool organic_element(const std::string& sym) {
  static const std::set<std::string> allowed = {"B", "C", "N",  "O",  "P",
                                                "S", "F", "Cl", "Br", "I"};
  return allowed.count(sym) > 0;
}

bool aromatic_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

struct MoleculeBuilder {
  LabeledGraph g;
  int line;

  int add_atom(const std::string& element, bool aromatic, int charge,
               const std::string& hcount) {
    NodeLabel nl;
    nl.kind = element;
    nl.attrs["aromatic"] = aromatic ? "1" : "0";
    nl.attrs["charge"] = std::to_string(charge);
    nl.attrs["hcount"] = hcount;
    g.nodes.push_back(std::move(nl));
    return g.node_count() - 1;
  }

  bool is_aromatic(int v) const { return g.nodes[v].attrs.at("aromatic") == "1"; }

  void add_bond(int u, int v, const std::string& kind, int column) {
    if (u == v) throw ParseError("ring bond forms a self-loop", line, column);
    if (g.has_edge(u, v))
      throw ParseError("duplicate bond between atoms", line, column);
    g.edges.push_back({u, v, {kind}});
  }

  std::string default_bond(int u, int v) const {
    return (is_aromatic(u) && is_aromatic(v)) ? kAromatic : kSingle;
  }
};

}  // namespace

LabeledGraph parse_molecule(const std::string& s, int line_number) {
  MoleculeBuilder mb;
  mb.line = line_number;
  mb.g.id = s;
  int prev = -1;
  std::optional<std::string> pending_bond;
  std::vector<int> branch_stack;
  struct RingOpen {
    int atom;
    std::optional<std::string> bond;
    int column;
  };
  std::map<int, RingOpen> rings;

  std::size_t i = 0;
  auto col = [&]() { return static_cast<int>(i) + 1; };

  auto attach = [&](int atom, int column) {
    if (prev >= 0) {
      std::string kind = pending_bond ? *pending_bond : mb.default_bond(prev, atom);
      mb.add_bond(prev, atom, kind, column);
      pending_bond.reset();
    } else if (pending_bond) {
      throw ParseError("bond symbol with no preceding atom", line_number, column);
    }
    prev = atom;
  };

  auto close_ring = [&](int num, int column) {
    if (prev < 0)
      throw ParseError("ring-closure digit before any atom", line_number, column);
    auto it = rings.find(num);
    if (it == rings.end()) {
      rings[num] = {prev, pending_bond, column};
      pending_bond.reset();
      return;
    }
    RingOpen open = it->second;
    rings.erase(it);
    std::string kind;
    if (open.bond && pending_bond && *open.bond != *pending_bond)
      throw ParseError("conflicting bond symbols on ring closure " +
                           std::to_string(num),
                       line_number, column);
    if (open.bond)
      kind = *open.bond;
    else if (pending_bond)
      kind = *pending_bond;
    else
      kind = mb.default_bond(open.atom, prev);
    pending_bond.reset();
    mb.add_bond(open.atom, prev, kind, column);
  };

  while (i < s.size()) {
    const char c = s[i];
    if (c == '(') {
      if (prev < 0)
        throw ParseError("branch before any atom", line_number, col());
      branch_stack.push_back(prev);
      ++i;
    } else if (c == ')') {
      if (branch_stack.empty())
        throw ParseError("unbalanced parentheses", line_number, col());
      if (pending_bond)
        throw ParseError("dangling bond before ')'", line_number, col());
      prev = branch_stack.back();
      branch_stack.pop_back();
      ++i;
    } else if (c == '-' || c == '=' || c == '#' || c == ':') {
      if (pending_bond)
        throw ParseError("two consecutive bond symbols", line_number, col());
      switch (c) {
        case '-': pending_bond = kSingle; break;
        case '=': pending_bond = kDouble; break;
        case '#': pending_bond = kTriple; break;
        case ':': pending_bond = kAromatic; break;
      }
      ++i;
    } else if (c >= '1' && c <= '9') {
      close_ring(c - '0', col());
      ++i;
    } else if (c == '%') {
      if (i + 2 >= s.size() || !std::isdigit((unsigned char)s[i + 1]) ||
          !std::isdigit((unsigned char)s[i + 2]))
        throw ParseError("'%' must be followed by two digits", line_number, col());
      close_ring((s[i + 1] - '0') * 10 + (s[i + 2] - '0'), col());
      i += 3;
    } else if (c == '[') {
      const int start_col = col();
      ++i;
      bool aromatic = false;
      std::string element;
      if (i < s.size() && aromatic_symbol(s[i])) {
        aromatic = true;
        element = std::string(1, std::toupper((unsigned char)s[i]));
        ++i;
      } else if (i < s.size() && std::isupper((unsigned char)s[i])) {
        element = std::string(1, s[i]);
        ++i;
        if (i < s.size() && std::islower((unsigned char)s[i]) &&
            organic_element(element + s[i])) {
          element += s[i];
          ++i;
        }
      }
      if (element.empty() || !organic_element(element))
        throw ParseError("unknown atom symbol in brackets", line_number, start_col);
      std::string hcount = "0";
      if (i < s.size() && s[i] == 'H') {
        ++i;
        int h = 1;
        if (i < s.size() && std::isdigit((unsigned char)s[i])) {
          h = s[i] - '0';
          ++i;
        }
        hcount = std::to_string(h);
      }
      int charge = 0;
      if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        int sign = (s[i] == '+') ? 1 : -1;
        ++i;
        int mag = 1;
        if (i < s.size() && std::isdigit((unsigned char)s[i])) {
          mag = s[i] - '0';
          ++i;
        }
        charge = sign * mag;
      }
      if (i >= s.size() || s[i] != ']')
        throw ParseError("missing ']' in bracket atom", line_number, col());
      ++i;
      attach(mb.add_atom(element, aromatic, charge, hcount), start_col);
    } else if (std::isupper((unsigned char)c)) {
      const int start_col = col();
      std::string element(1, c);
      ++i;
      if (i < s.size() && std::islower((unsigned char)s[i]) &&
          organic_element(element + s[i])) {
        element += s[i];
        ++i;
      }
      if (!organic_element(element))
        throw ParseError("unknown atom symbol '" + element + "'", line_number,
                         start_col);
      attach(mb.add_atom(element, false, 0, "default"), start_col);
    } else if (aromatic_symbol(c)) {
      const int start_col = col();
      ++i;
      attach(mb.add_atom(std::string(1, std::toupper((unsigned char)c)), true, 0,
                         "default"),
             start_col);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'",
                       line_number, col());
    }
  }
  if (!branch_stack.empty())
    throw ParseError("unbalanced parentheses at end of input", line_number,
                     col());
  if (!rings.empty())
    throw ParseError("unclosed ring bond " + std::to_string(rings.begin()->first),
                     line_number, rings.begin()->second.column);
  if (pending_bond)
    throw ParseError("dangling bond at end of input", line_number, col());
  if (mb.g.nodes.empty())
    throw ParseError("empty molecule", line_number, 1);
  mb.g.validate();
  return mb.g;
}

namespace {

struct MoleculeWriter {
  const LabeledGraph& g;
  std::vector<std::vector<std::pair<int, int>>> adj;  // neighbor, edge idx
  std::vector<char> visited;
  std::vector<char> edge_used;
  std::map<int, std::vector<std::pair<int, int>>> ring_at;  // atom -> (number, edge)
  std::string out;
  int next_ring = 1;

  explicit MoleculeWriter(const LabeledGraph& graph)
      : g(graph), adj(graph.adjacency()), visited(graph.node_count(), 0),
        edge_used(graph.edge_count(), 0) {}

  bool aromatic(int v) const {
    auto it = g.nodes[v].attrs.find("aromatic");
    return it != g.nodes[v].attrs.end() && it->second == "1";
  }

  std::string attr(int v, const char* key, const char* fallback) const {
    auto it = g.nodes[v].attrs.find(key);
    return it != g.nodes[v].attrs.end() ? it->second : fallback;
  }

  std::string bond_char(int ei, int u, int v) const {
    const std::string& kind = g.edges[ei].label.kind;
    const std::string dflt =
        (aromatic(u) && aromatic(v)) ? kAromatic : kSingle;
    if (kind == dflt) return "";
    if (kind == kSingle) return "-";
    if (kind == kDouble) return "=";
    if (kind == kTriple) return "#";
    if (kind == kAromatic) return ":";
    throw GraphError("write_molecule: unsupported bond kind '" + kind + "'");
  }

  std::string atom_text(int v) const {
    std::string sym = g.nodes[v].kind;
    if (!organic_element(sym))
      throw GraphError("write_molecule: unsupported element '" + sym + "'");
    if (aromatic(v))
      for (char& c : sym) c = static_cast<char>(std::tolower((unsigned char)c));
    const std::string charge = attr(v, "charge", "0");
    const std::string hcount = attr(v, "hcount", "default");
    if (charge == "0" && hcount == "default") return sym;
    std::string out = "[" + sym;
    if (hcount != "default" && hcount != "0") {
      out += 'H';
      if (hcount != "1") out += hcount;
    }
    if (charge != "0") {
      long c = std::stol(charge);
      out += (c > 0) ? '+' : '-';
      if (std::labs(c) != 1) out += std::to_string(std::labs(c));
    }
    out += ']';
    return out;
  }

  // Pre-pass: classify edges into tree/ring via DFS, assigning ring numbers.
  void classify(int root) {
    struct Frame { int v; std::size_t next; };
    std::vector<Frame> stack{{root, 0}};
    visited[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next >= adj[v].size()) {
        stack.pop_back();
        continue;
      }
      auto [u, ei] = adj[v][next++];
      if (edge_used[ei]) continue;
      edge_used[ei] = 1;
      if (!visited[u]) {
        visited[u] = 1;
        stack.push_back({u, 0});
      } else {
        if (next_ring > 99)
          throw GraphError("write_molecule: more than 99 ring closures");
        ring_at[v].push_back({next_ring, ei});
        ring_at[u].push_back({next_ring, ei});
        ++next_ring;
      }
    }
  }

  void emit(int v, int parent_edge) {
    out += atom_text(v);
    if (auto it = ring_at.find(v); it != ring_at.end()) {
      for (auto [num, ei] : it->second) {
        out += bond_char(ei, g.edges[ei].u, g.edges[ei].v);
        if (num > 9) {
          out += '%';
          out += char('0' + num / 10);
          out += char('0' + num % 10);
        } else {
          out += char('0' + num);
        }
      }
    }
    std::vector<std::pair<int, int>> children;
    for (auto [u, ei] : adj[v]) {
      if (ei == parent_edge) continue;
      bool is_ring = false;
      if (auto it = ring_at.find(v); it != ring_at.end())
        for (auto [num, rei] : it->second)
          if (rei == ei) is_ring = true;
      if (!is_ring) children.push_back({u, ei});
    }
    for (std::size_t k = 0; k < children.size(); ++k) {
      auto [u, ei] = children[k];
      const bool last = (k + 1 == children.size());
      if (!last) out += '(';
      out += bond_char(ei, v, u);
      emit(u, ei);
      if (!last) out += ')';
    }
  }
};

}  // namespace

std::string write_molecule(const LabeledGraph& g) {
  if (g.node_count() == 0) throw GraphError("write_molecule: empty graph");
  if (g.component_count() != 1)
    throw GraphError("write_molecule: graph is not connected");
  MoleculeWriter w(g);
  w.classify(0);
  w.emit(0, -1);
  return w.out;
}

Dataset load_molecule_dataset(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open molecule file '" + path + "'");
  Dataset ds;
  ds.name = name.empty() ? path : name;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("expected '<notation>\\t<y>'", lineno);
    LabeledGraph g = parse_molecule(line.substr(0, tab), lineno);
    g.id = "m" + std::to_string(ds.samples.size());
    double y;
    try {
      y = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError("malformed target value", lineno,
                       static_cast<int>(tab) + 2);
    }
    ds.samples.push_back({std::move(g), y});
  }
  ds.validate();
  return ds;
}

double n_qubits(const SchmidtRanks& r) {
  if (r.d1 < 1 || r.d2 < 1 || r.d3 < 1)
    throw GraphError("n_qubits: Schmidt ranks must be >= 1");
  return std::log2(static_cast<double>(r.d1) * r.d2 * r.d3);
}

}  // namespace hypograph
