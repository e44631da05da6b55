#include "hypograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "hypograph/rng.hpp"

namespace hypograph {

std::string NodeLabel::token() const {
  std::string out = kind;
  for (const auto& [k, v] : attrs) {
    out += '|';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

bool LabeledGraph::has_edge(int u, int v) const {
  return edge_label(u, v) != nullptr;
}

const EdgeLabel* LabeledGraph::edge_label(int u, int v) const {
  for (const Edge& e : edges) {
    if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) return &e.label;
  }
  return nullptr;
}

std::vector<std::vector<std::pair<int, int>>> LabeledGraph::adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(nodes.size());
  for (int i = 0; i < edge_count(); ++i) {
    adj[edges[i].u].emplace_back(edges[i].v, i);
    adj[edges[i].v].emplace_back(edges[i].u, i);
  }
  return adj;
}

int LabeledGraph::component_count() const {
  const int n = node_count();
  if (n == 0) return 0;
  auto adj = adjacency();
  std::vector<char> seen(n, 0);
  int components = 0;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    std::deque<int> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (auto [u, ei] : adj[v]) {
        if (!seen[u]) {
          seen[u] = 1;
          queue.push_back(u);
        }
      }
    }
  }
  return components;
}

void LabeledGraph::validate() const {
  const int n = node_count();
  for (int i = 0; i < n; ++i) {
    if (nodes[i].kind.empty())
      throw GraphError("graph '" + id + "': node " + std::to_string(i) +
                       " has empty kind");
  }
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw GraphError("graph '" + id + "': edge endpoint out of range");
    if (e.u == e.v)
      throw GraphError("graph '" + id + "': self-loop at node " +
                       std::to_string(e.u));
    if (e.label.kind.empty())
      throw GraphError("graph '" + id + "': edge with empty kind");
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert({key.first, key.second}).second)
      throw GraphError("graph '" + id + "': duplicate edge " +
                       std::to_string(e.u) + "-" + std::to_string(e.v));
  }
}

LabeledGraph EnvironmentDescriptor::as_graph(const std::string& id) const {
  LabeledGraph g;
  g.id = id;
  g.nodes = nodes;
  g.edges = edges;
  return g;
}

namespace {

// One round of color refinement. Colors are canonical: each node's new color
// is the rank of its signature in the sorted signature set, so the result
// depends only on the labeled structure, not on node numbering.
using Signature = std::pair<int, std::vector<std::pair<std::string, int>>>;

bool refine_once(const LabeledGraph& g,
                 const std::vector<std::vector<std::pair<int, int>>>& adj,
                 std::vector<int>& colors) {
  const int n = g.node_count();
  std::vector<Signature> sigs(n);
  for (int v = 0; v < n; ++v) {
    std::vector<std::pair<std::string, int>> neigh;
    neigh.reserve(adj[v].size());
    for (auto [u, ei] : adj[v]) neigh.emplace_back(g.edges[ei].label.kind, colors[u]);
    std::sort(neigh.begin(), neigh.end());
    sigs[v] = {colors[v], std::move(neigh)};
  }
  std::vector<Signature> uniq = sigs;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<int> next(n);
  for (int v = 0; v < n; ++v) {
    next[v] = static_cast<int>(
        std::lower_bound(uniq.begin(), uniq.end(), sigs[v]) - uniq.begin());
  }
  bool changed = next != colors;
  colors = std::move(next);
  return changed;
}

void refine(const LabeledGraph& g,
            const std::vector<std::vector<std::pair<int, int>>>& adj,
            std::vector<int>& colors) {
  while (refine_once(g, adj, colors)) {
  }
}

std::vector<int> initial_colors(const std::vector<std::string>& tokens) {
  std::vector<std::string> uniq = tokens;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<int> colors(tokens.size());
  for (std::size_t v = 0; v < tokens.size(); ++v) {
    colors[v] = static_cast<int>(
        std::lower_bound(uniq.begin(), uniq.end(), tokens[v]) - uniq.begin());
  }
  return colors;
}

bool is_discrete(const std::vector<int>& colors) {
  std::vector<char> used(colors.size(), 0);
  for (int c : colors) {
    if (used[c]) return false;
    used[c] = 1;
  }
  return true;
}

std::string emit(const LabeledGraph& g, const std::vector<std::string>& tokens,
                 const std::vector<int>& colors) {
  const int n = g.node_count();
  // position of node v is its color (discrete coloring => a permutation)
  std::string out;
  std::vector<int> by_pos(n);
  for (int v = 0; v < n; ++v) by_pos[colors[v]] = v;
  for (int p = 0; p < n; ++p) {
    if (p) out += '|';
    out += tokens[by_pos[p]];
  }
  out += ';';
  std::vector<std::string> edge_strs;
  edge_strs.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    int a = colors[e.u], b = colors[e.v];
    if (a > b) std::swap(a, b);
    edge_strs.push_back(std::to_string(a) + "-" + std::to_string(b) + ":" +
                        e.label.kind);
  }
  std::sort(edge_strs.begin(), edge_strs.end());
  for (std::size_t i = 0; i < edge_strs.size(); ++i) {
    if (i) out += ',';
    out += edge_strs[i];
  }
  return out;
}

// Returns the canonical string for the refinement of `tokens`; when the
// partition is not discrete, individualizes every node of the canonically
// chosen cell (smallest size, then lowest color) and takes the minimum.
std::string canonicalize(const LabeledGraph& g,
                         const std::vector<std::vector<std::pair<int, int>>>& adj,
                         std::vector<std::string> tokens, int depth) {
  std::vector<int> colors = initial_colors(tokens);
  refine(g, adj, colors);
  if (is_discrete(colors)) return emit(g, tokens, colors);

  const int n = g.node_count();
  std::vector<int> cell_size(n, 0);
  for (int c : colors) ++cell_size[c];
  int target = -1;
  for (int c = 0; c < n; ++c) {
    if (cell_size[c] < 2) continue;
    if (target < 0 || cell_size[c] < cell_size[target]) target = c;
  }
  // Twin pruning: two same-cell nodes with identical labeled neighborhoods
  // (excluding each other) are swapped by an automorphism, so only one of
  // them needs to be individualized. Keeps twin-heavy graphs (isolated-node
  // sets, monochromatic star leaves) from exploding factorially.
  auto profile = [&](int u, int skip) {
    std::vector<std::pair<int, std::string>> out;
    for (auto [w, ei] : adj[u])
      if (w != skip) out.emplace_back(w, g.edges[ei].label.kind);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto twins = [&](int u, int v) { return profile(u, v) == profile(v, u); };
  std::vector<int> reps;
  for (int v = 0; v < n; ++v) {
    if (colors[v] != target) continue;
    bool dup = false;
    for (int u : reps)
      if (twins(u, v)) {
        dup = true;
        break;
      }
    if (!dup) reps.push_back(v);
  }

  std::string best;
  const std::string marker = "\x02" + std::to_string(depth);
  for (int v : reps) {
    std::vector<std::string> branch = tokens;
    branch[v] += marker;
    std::string s = canonicalize(g, adj, std::move(branch), depth + 1);
    if (best.empty() || s < best) best = std::move(s);
  }
  return best;
}

std::vector<std::string> node_tokens(const LabeledGraph& g) {
  std::vector<std::string> tokens;
  tokens.reserve(g.nodes.size());
  for (const NodeLabel& nl : g.nodes) tokens.push_back(nl.token());
  return tokens;
}

void check_budget(const LabeledGraph& g, int node_budget) {
  if (g.node_count() > node_budget)
    throw GraphError("graph '" + g.id + "' exceeds canonicalization budget (" +
                     std::to_string(g.node_count()) + " > " +
                     std::to_string(node_budget) + " nodes)");
}

}  // namespace

std::string canonical_form(const LabeledGraph& g, int node_budget) {
  check_budget(g, node_budget);
  if (g.node_count() == 0) return "";
  return canonicalize(g, g.adjacency(), node_tokens(g), 0);
}

std::string canonical_form_rooted(const LabeledGraph& g, int root,
                                  int node_budget) {
  check_budget(g, node_budget);
  if (root < 0 || root >= g.node_count())
    throw GraphError("canonical_form_rooted: root out of range");
  auto tokens = node_tokens(g);
  tokens[root].insert(0, "\x01");
  return canonicalize(g, g.adjacency(), std::move(tokens), 0);
}

std::vector<int> canonical_order(const LabeledGraph& g, int node_budget) {
  check_budget(g, node_budget);
  const int n = g.node_count();
  // Recover a concrete permutation realizing the canonical string by
  // individualizing greedily: repeatedly fix the node whose forced string
  // equals the canonical one.
  std::vector<std::string> tokens = node_tokens(g);
  auto adj = g.adjacency();
  for (int step = 0; step < n; ++step) {
    std::vector<int> colors = initial_colors(tokens);
    refine(g, adj, colors);
    if (is_discrete(colors)) return colors;
    const std::string want = canonicalize(g, adj, tokens, 1000 + step);
    std::vector<int> cell_size(n, 0);
    for (int c : colors) ++cell_size[c];
    int target = -1;
    for (int c = 0; c < n; ++c) {
      if (cell_size[c] < 2) continue;
      if (target < 0 || cell_size[c] < cell_size[target]) target = c;
    }
    const std::string marker = "\x02" + std::to_string(1000 + step);
    for (int v = 0; v < n; ++v) {
      if (colors[v] != target) continue;
      std::vector<std::string> branch = tokens;
      branch[v] += marker;
      if (canonicalize(g, adj, branch, 1001 + step) == want) {
        tokens = std::move(branch);
        break;
      }
    }
  }
  std::vector<int> colors = initial_colors(tokens);
  refine(g, adj, colors);
  return colors;
}

EnvironmentDescriptor extract_environment(const LabeledGraph& g, int root,
                                          int radius) {
  if (root < 0 || root >= g.node_count())
    throw GraphError("extract_environment: root out of range");
  if (radius < 0) throw GraphError("extract_environment: negative radius");
  auto adj = g.adjacency();
  std::vector<int> dist(g.node_count(), -1);
  std::deque<int> queue{root};
  dist[root] = 0;
  std::vector<int> order{root};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (dist[v] == radius) continue;
    for (auto [u, ei] : adj[v]) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        order.push_back(u);
        queue.push_back(u);
      }
    }
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::pair(dist[a], a) < std::pair(dist[b], b); });
  std::vector<int> remap(g.node_count(), -1);
  EnvironmentDescriptor env;
  env.radius = radius;
  env.root = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    remap[order[i]] = static_cast<int>(i);
    env.nodes.push_back(g.nodes[order[i]]);
  }
  for (const Edge& e : g.edges) {
    if (remap[e.u] >= 0 && remap[e.v] >= 0) {
      int a = remap[e.u], b = remap[e.v];
      if (a > b) std::swap(a, b);
      env.edges.push_back({a, b, e.label});
    }
  }
  std::sort(env.edges.begin(), env.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v, a.label.kind) < std::tie(b.u, b.v, b.label.kind);
  });
  return env;
}

bool contains_environment(const LabeledGraph& g,
                          const EnvironmentDescriptor& env) {
  if (env.nodes.empty()) return false;
  const LabeledGraph env_graph = env.as_graph();
  std::vector<std::string> env_tokens = node_tokens(env_graph);
  std::sort(env_tokens.begin(), env_tokens.end());
  const std::string env_canon =
      canonical_form_rooted(env_graph, env.root,
                            std::max(64, env_graph.node_count()));
  const std::string root_token = env.nodes[env.root].token();
  for (int v = 0; v < g.node_count(); ++v) {
    if (g.nodes[v].token() != root_token) continue;
    EnvironmentDescriptor ball = extract_environment(g, v, env.radius);
    if (ball.nodes.size() != env.nodes.size() ||
        ball.edges.size() != env.edges.size())
      continue;
    LabeledGraph ball_graph = ball.as_graph();
    std::vector<std::string> ball_tokens = node_tokens(ball_graph);
    std::sort(ball_tokens.begin(), ball_tokens.end());
    if (ball_tokens != env_tokens) continue;
    if (canonical_form_rooted(ball_graph, 0,
                              std::max(64, ball_graph.node_count())) ==
        env_canon)
      return true;
  }
  return false;
}

const char* mutation_kind_name(MutationKind k) {
  switch (k) {
    case MutationKind::NodeRelabel: return "node-relabel";
    case MutationKind::EdgeRelabel: return "edge-relabel";
    case MutationKind::EdgeAdd: return "edge-add";
    case MutationKind::EdgeDelete: return "edge-delete";
    case MutationKind::LeafAdd: return "leaf-add";
    case MutationKind::LeafDelete: return "leaf-delete";
  }
  return "?";
}

MutationSpec MutationSpec::all_kinds(std::vector<NodeLabel> node_alphabet,
                                     std::vector<EdgeLabel> edge_alphabet) {
  MutationSpec spec;
  spec.kinds = {{MutationKind::NodeRelabel, 1.0}, {MutationKind::EdgeRelabel, 1.0},
                {MutationKind::EdgeAdd, 1.0},     {MutationKind::EdgeDelete, 1.0},
                {MutationKind::LeafAdd, 1.0},     {MutationKind::LeafDelete, 1.0}};
  spec.node_alphabet = std::move(node_alphabet);
  spec.edge_alphabet = std::move(edge_alphabet);
  return spec;
}

namespace {

bool try_mutation(const LabeledGraph& g, MutationKind kind,
                  const MutationSpec& spec, Rng& rng, LabeledGraph& out) {
  const int n = g.node_count();
  switch (kind) {
    case MutationKind::NodeRelabel: {
      if (n == 0 || spec.node_alphabet.empty()) return false;
      int v = static_cast<int>(rng.below(n));
      std::vector<const NodeLabel*> options;
      for (const NodeLabel& nl : spec.node_alphabet)
        if (!(nl == g.nodes[v])) options.push_back(&nl);
      if (options.empty()) return false;
      out = g;
      out.nodes[v] = *options[rng.below(options.size())];
      return true;
    }
    case MutationKind::EdgeRelabel: {
      if (g.edges.empty() || spec.edge_alphabet.empty()) return false;
      int ei = static_cast<int>(rng.below(g.edges.size()));
      std::vector<const EdgeLabel*> options;
      for (const EdgeLabel& el : spec.edge_alphabet)
        if (!(el == g.edges[ei].label)) options.push_back(&el);
      if (options.empty()) return false;
      out = g;
      out.edges[ei].label = *options[rng.below(options.size())];
      return true;
    }
    case MutationKind::EdgeAdd: {
      if (n < 2 || spec.edge_alphabet.empty()) return false;
      std::vector<std::pair<int, int>> candidates;
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (!g.has_edge(u, v)) candidates.emplace_back(u, v);
      if (candidates.empty()) return false;
      auto [u, v] = candidates[rng.below(candidates.size())];
      out = g;
      out.edges.push_back(
          {u, v, spec.edge_alphabet[rng.below(spec.edge_alphabet.size())]});
      return true;
    }
    case MutationKind::EdgeDelete: {
      if (g.edges.empty()) return false;
      int ei = static_cast<int>(rng.below(g.edges.size()));
      out = g;
      out.edges.erase(out.edges.begin() + ei);
      return out.component_count() <= g.component_count();
    }
    case MutationKind::LeafAdd: {
      if (n == 0 || spec.node_alphabet.empty() || spec.edge_alphabet.empty())
        return false;
      int anchor = static_cast<int>(rng.below(n));
      out = g;
      out.nodes.push_back(spec.node_alphabet[rng.below(spec.node_alphabet.size())]);
      out.edges.push_back(
          {anchor, n, spec.edge_alphabet[rng.below(spec.edge_alphabet.size())]});
      return true;
    }
    case MutationKind::LeafDelete: {
      std::vector<int> degree(n, 0);
      for (const Edge& e : g.edges) {
        ++degree[e.u];
        ++degree[e.v];
      }
      std::vector<int> leaves;
      for (int v = 0; v < n; ++v)
        if (degree[v] == 1) leaves.push_back(v);
      if (leaves.empty()) return false;
      int victim = leaves[rng.below(leaves.size())];
      out.id = g.id;
      out.nodes.clear();
      out.edges.clear();
      for (int v = 0; v < n; ++v)
        if (v != victim) out.nodes.push_back(g.nodes[v]);
      for (const Edge& e : g.edges) {
        if (e.u == victim || e.v == victim) continue;
        Edge copy = e;
        if (copy.u > victim) --copy.u;
        if (copy.v > victim) --copy.v;
        out.edges.push_back(copy);
      }
      return true;
    }
  }
  return false;
}

}  // namespace

LabeledGraph mutate(const LabeledGraph& g, std::uint64_t seed,
                    const MutationSpec& spec) {
  if (g.node_count() == 0) throw MutationError("mutate: empty graph");
  if (spec.kinds.empty()) throw MutationError("mutate: no mutation kinds");
  Rng rng(seed);
  std::vector<double> weights;
  for (const auto& [kind, w] : spec.kinds) weights.push_back(w);
  MutationKind last = spec.kinds.front().first;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    MutationKind kind = spec.kinds[rng.weighted(weights)].first;
    last = kind;
    LabeledGraph out;
    if (try_mutation(g, kind, spec, rng, out)) {
      out.validate();
      return out;
    }
  }
  throw MutationError(std::string("mutate: no legal edit found in ") +
                      std::to_string(spec.max_attempts) +
                      " attempts (last kind tried: " +
                      mutation_kind_name(last) + ")");
}

}  // namespace hypograph
