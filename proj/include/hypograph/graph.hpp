#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hypograph {

struct GraphError : std::runtime_error {
  explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

struct NodeLabel {
  std::string kind;
  std::map<std::string, std::string> attrs;

  bool operator==(const NodeLabel&) const = default;
  auto operator<=>(const NodeLabel&) const = default;

  // Flat token "kind|k=v|k=v" with attrs in key order; the unit the
  // fingerprint hash and canonicalization consume.
  std::string token() const;
};

struct EdgeLabel {
  std::string kind;

  bool operator==(const EdgeLabel&) const = default;
  auto operator<=>(const EdgeLabel&) const = default;
};

struct Edge {
  int u = 0;
  int v = 0;
  EdgeLabel label;
};

// Undirected labeled graph. No self-loops, no parallel edges.
struct LabeledGraph {
  std::string id;
  std::vector<NodeLabel> nodes;
  std::vector<Edge> edges;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  bool has_edge(int u, int v) const;
  const EdgeLabel* edge_label(int u, int v) const;

  // adjacency()[v] lists (neighbor, edge index), in edge insertion order.
  std::vector<std::vector<std::pair<int, int>>> adjacency() const;

  int component_count() const;

  // Throws GraphError on any structural invariant violation.
  void validate() const;
};

// Rooted environment subgraph: all nodes within `radius` hops of `root`.
struct EnvironmentDescriptor {
  std::vector<NodeLabel> nodes;
  std::vector<Edge> edges;
  int radius = 0;
  int root = 0;

  LabeledGraph as_graph(const std::string& id = "env") const;
};

// Canonical byte string, equal iff graphs are label-isomorphic (exact for
// graphs where color refinement plus individualization discriminates; that
// covers everything this project generates). May contain the control-byte
// markers \x01 (root) and \x02 (individualization); report writers escape.
std::string canonical_form(const LabeledGraph& g, int node_budget = 64);

// Same, with `root` pre-individualized: equality means rooted isomorphism.
std::string canonical_form_rooted(const LabeledGraph& g, int root,
                                  int node_budget = 64);

// Canonical node ordering (permutation old index -> position).
std::vector<int> canonical_order(const LabeledGraph& g, int node_budget = 64);

// Induced subgraph on the r-ball around root, root mapped to index 0,
// remaining nodes in BFS-distance then index order.
EnvironmentDescriptor extract_environment(const LabeledGraph& g, int root,
                                          int radius);

// True iff some node of g has an exact `env.radius`-hop environment that is
// rooted-label-isomorphic to env. Matches the fingerprint semantics: a node
// emits an environment id only for its full r-ball.
bool contains_environment(const LabeledGraph& g,
                          const EnvironmentDescriptor& env);

enum class MutationKind {
  NodeRelabel,
  EdgeRelabel,
  EdgeAdd,
  EdgeDelete,
  LeafAdd,
  LeafDelete,
};

const char* mutation_kind_name(MutationKind k);

struct MutationSpec {
  std::vector<std::pair<MutationKind, double>> kinds;  // kind, weight
  std::vector<NodeLabel> node_alphabet;
  std::vector<EdgeLabel> edge_alphabet;
  int max_attempts = 100;

  static MutationSpec all_kinds(std::vector<NodeLabel> node_alphabet,
                                std::vector<EdgeLabel> edge_alphabet);
};

struct MutationError : GraphError {
  explicit MutationError(const std::string& what) : GraphError(what) {}
};

// One random single-edit mutation. Edits that would increase the number of
// connected components are rejected and retried; after spec.max_attempts
// failed attempts a MutationError is thrown.
LabeledGraph mutate(const LabeledGraph& g, std::uint64_t seed,
                    const MutationSpec& spec);

}  // namespace hypograph
