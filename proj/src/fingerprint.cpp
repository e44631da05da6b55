#include "hypograph/fingerprint.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "json_util.hpp"

namespace hypograph {

namespace {

// FNV-1a over a length-prefixed serialization; every field is framed so
// adjacent fields cannot alias.
class Hasher {
 public:
  void str(const std::string& s) {
    u64(s.size());
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::uint64_t digest() const { return h_; }

 private:
  void byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

FeatureId hash_node(const NodeLabel& nl) {
  Hasher h;
  h.str("N");
  h.str(nl.kind);
  h.u64(nl.attrs.size());
  for (const auto& [k, v] : nl.attrs) {
    h.str(k);
    h.str(v);
  }
  return h.digest();
}

FeatureId hash_shell(int radius, FeatureId center,
                     const std::vector<std::pair<std::string, FeatureId>>& neigh) {
  Hasher h;
  h.str("R");
  h.u64(static_cast<std::uint64_t>(radius));
  h.u64(center);
  h.u64(neigh.size());
  for (const auto& [kind, id] : neigh) {
    h.str(kind);
    h.u64(id);
  }
  return h.digest();
}

// Cheap structural signature for collision detection: node count, edge
// count, hashes of the sorted token and degree multisets. Environments that
// disagree here and still share a feature id are genuine hash collisions.
std::string env_signature(const EnvironmentDescriptor& env) {
  std::vector<std::string> tokens;
  tokens.reserve(env.nodes.size());
  for (const NodeLabel& nl : env.nodes) tokens.push_back(nl.token());
  std::sort(tokens.begin(), tokens.end());
  std::vector<int> degree(env.nodes.size(), 0);
  for (const Edge& e : env.edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  std::sort(degree.begin(), degree.end());
  Hasher h;
  h.u64(env.nodes.size());
  h.u64(env.edges.size());
  h.u64(static_cast<std::uint64_t>(env.radius));
  for (const std::string& t : tokens) h.str(t);
  for (int d : degree) h.u64(static_cast<std::uint64_t>(d));
  return std::to_string(env.nodes.size()) + "n" +
         std::to_string(env.edges.size()) + "e#" + std::to_string(h.digest());
}

}  // namespace

void SubgraphRegistry::add(FeatureId id, const EnvironmentDescriptor& env) {
  auto it = signatures_.find(id);
  if (it == signatures_.end()) {
    entries_[id] = env;
    signatures_[id] = env_signature(env);
    return;
  }
  std::string sig = env_signature(env);
  if (sig != it->second) collisions_.push_back({id, it->second, sig});
}

void SubgraphRegistry::merge(const SubgraphRegistry& other) {
  for (const auto& [id, env] : other.entries_) add(id, env);
  for (const Collision& c : other.collisions_) collisions_.push_back(c);
}

const EnvironmentDescriptor& SubgraphRegistry::at(FeatureId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end())
    throw GraphError("registry: unknown feature id " + std::to_string(id));
  return it->second;
}

std::string SubgraphRegistry::to_json() const {
  using detail::env_to_json;
  nlohmann::ordered_json j;
  j["hash_version"] = kHashVersion;
  nlohmann::ordered_json envs;
  for (const auto& [id, env] : entries_) envs[std::to_string(id)] = env_to_json(env);
  j["environments"] = envs;
  j["collisions"] = nlohmann::json::array();
  for (const Collision& c : collisions_)
    j["collisions"].push_back({{"id", std::to_string(c.id)},
                               {"kept", c.kept_signature},
                               {"dropped", c.dropped_signature}});
  return j.dump(2);
}

SubgraphRegistry SubgraphRegistry::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SubgraphRegistry reg;
  for (const auto& [key, jenv] : j.at("environments").items())
    reg.add(std::stoull(key), detail::env_from_json(jenv));
  return reg;
}

std::optional<std::uint32_t> FeatureMatrix::vocab_index(FeatureId id) const {
  auto it = std::lower_bound(vocab.begin(), vocab.end(), id);
  if (it == vocab.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - vocab.begin());
}

bool FeatureMatrix::present(std::size_t row, std::uint32_t vocab_idx) const {
  const auto& r = rows[row];
  return std::binary_search(r.begin(), r.end(), vocab_idx);
}

std::vector<std::uint8_t> FeatureMatrix::column(std::uint32_t vocab_idx) const {
  std::vector<std::uint8_t> col(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (present(i, vocab_idx)) col[i] = 1;
  return col;
}

std::set<FeatureId> FeatureMatrix::row_features(std::size_t row) const {
  std::set<FeatureId> out;
  for (std::uint32_t idx : rows[row]) out.insert(vocab[idx]);
  return out;
}

std::string FeatureMatrix::to_json() const {
  nlohmann::ordered_json j;
  j["hash_version"] = kHashVersion;
  j["vocab"] = nlohmann::json::array();
  for (FeatureId id : vocab) j["vocab"].push_back(std::to_string(id));
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(r);
  return j.dump();
}

std::vector<FeatureId> featurize(const LabeledGraph& g, int radius,
                                 SubgraphRegistry* registry) {
  if (radius < 0) throw GraphError("featurize: negative radius");
  const int n = g.node_count();
  std::set<FeatureId> out;
  if (n == 0) return {};
  auto adj = g.adjacency();
  std::vector<FeatureId> prev(n), cur(n);
  for (int v = 0; v < n; ++v) {
    prev[v] = hash_node(g.nodes[v]);
    if (out.insert(prev[v]).second && registry)
      registry->add(prev[v], extract_environment(g, v, 0));
  }
  for (int r = 1; r <= radius; ++r) {
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<std::string, FeatureId>> neigh;
      neigh.reserve(adj[v].size());
      for (auto [u, ei] : adj[v])
        neigh.emplace_back(g.edges[ei].label.kind, prev[u]);
      std::sort(neigh.begin(), neigh.end());
      cur[v] = hash_shell(r, prev[v], neigh);
      if (out.insert(cur[v]).second && registry)
        registry->add(cur[v], extract_environment(g, v, r));
    }
    prev = cur;
  }
  return {out.begin(), out.end()};
}

FeatureMatrix featurize_dataset(const Dataset& ds, int radius,
                                SubgraphRegistry& registry) {
  if (ds.samples.empty())
    throw GraphError("featurize_dataset: empty dataset");
  std::vector<std::vector<FeatureId>> per_sample;
  per_sample.reserve(ds.samples.size());
  std::set<FeatureId> vocab_set;
  for (const Sample& s : ds.samples) {
    per_sample.push_back(featurize(s.graph, radius, &registry));
    vocab_set.insert(per_sample.back().begin(), per_sample.back().end());
  }
  FeatureMatrix m;
  m.vocab.assign(vocab_set.begin(), vocab_set.end());
  m.rows.reserve(per_sample.size());
  for (const auto& feats : per_sample) {
    std::vector<std::uint32_t> row;
    row.reserve(feats.size());
    for (FeatureId id : feats) row.push_back(*m.vocab_index(id));
    std::sort(row.begin(), row.end());
    m.rows.push_back(std::move(row));
  }
  return m;
}

FeatureId node_environment_id(const LabeledGraph& g, int node, int radius) {
  if (node < 0 || node >= g.node_count())
    throw GraphError("node_environment_id: node out of range");
  if (radius < 0) throw GraphError("node_environment_id: negative radius");
  const int n = g.node_count();
  auto adj = g.adjacency();
  std::vector<FeatureId> prev(n), cur(n);
  for (int v = 0; v < n; ++v) prev[v] = hash_node(g.nodes[v]);
  for (int r = 1; r <= radius; ++r) {
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<std::string, FeatureId>> neigh;
      neigh.reserve(adj[v].size());
      for (auto [u, ei] : adj[v])
        neigh.emplace_back(g.edges[ei].label.kind, prev[u]);
      std::sort(neigh.begin(), neigh.end());
      cur[v] = hash_shell(r, prev[v], neigh);
    }
    prev = cur;
  }
  return prev[node];
}

FoldResult fold(const std::vector<FeatureId>& features, int length) {
  if (length < 64 || (length & (length - 1)) != 0)
    throw GraphError("fold: length must be a power of two >= 64");
  FoldResult out;
  out.bits.assign(length, 0);
  std::vector<FeatureId> first(length, 0);
  std::vector<FeatureId> sorted = features;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (FeatureId id : sorted) {
    const std::size_t bit = static_cast<std::size_t>(id % length);
    if (out.bits[bit]) {
      out.collisions.push_back({first[bit], id});
    } else {
      out.bits[bit] = 1;
      first[bit] = id;
    }
  }
  return out;
}

std::string feature_id_hex(FeatureId id) {
  static const char* digits = "0123456789abcdef";
  std::string out = "0x";
  for (int i = 15; i >= 0; --i) out += digits[(id >> (4 * i)) & 0xf];
  return out;
}

}  // namespace hypograph
