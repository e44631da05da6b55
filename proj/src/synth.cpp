#include "hypograph/synth.hpp"

#include <algorithm>
#include <deque>

#include <json.hpp>

#include "hypograph/rng.hpp"
#include "json_util.hpp"

namespace hypograph {

namespace {

const char* kind_name(PlantedRule::Kind k) {
  switch (k) {
    case PlantedRule::Kind::Additive: return "additive";
    case PlantedRule::Kind::XorPair: return "xor-pair";
    case PlantedRule::Kind::AbsencePair: return "absence-pair";
  }
  return "?";
}

PlantedRule::Kind kind_from_name(const std::string& s) {
  if (s == "additive") return PlantedRule::Kind::Additive;
  if (s == "xor-pair") return PlantedRule::Kind::XorPair;
  if (s == "absence-pair") return PlantedRule::Kind::AbsencePair;
  throw GraphError("unknown rule kind '" + s + "'");
}

std::size_t motif_count_for(PlantedRule::Kind k) {
  return k == PlantedRule::Kind::Additive ? 1 : 2;
}

// BFS distances from the environment root within the motif.
std::vector<int> motif_distances(const EnvironmentDescriptor& motif) {
  LabeledGraph g = motif.as_graph();
  auto adj = g.adjacency();
  std::vector<int> dist(g.node_count(), -1);
  std::deque<int> queue{motif.root};
  dist[motif.root] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (auto [u, ei] : adj[v])
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  return dist;
}

// Nodes where a host edge may land without disturbing the root's exact
// radius-ball: distance from root must be >= radius.
std::vector<int> attach_candidates(const EnvironmentDescriptor& motif) {
  auto dist = motif_distances(motif);
  std::vector<int> out;
  for (std::size_t v = 0; v < dist.size(); ++v)
    if (dist[v] >= motif.radius) out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace

double PlantedRule::contribution(const std::vector<bool>& present) const {
  switch (kind) {
    case Kind::Additive:
      return present[0] ? effect : 0.0;
    case Kind::XorPair:
      return (present[0] != present[1]) ? effect : 0.0;
    case Kind::AbsencePair:
      return (!present[0] && !present[1]) ? effect : 0.0;
  }
  return 0.0;
}

FeatureId motif_feature_id(const EnvironmentDescriptor& motif) {
  LabeledGraph g = motif.as_graph();
  return node_environment_id(g, motif.root, motif.radius);
}

double oracle_eval(const LabeledGraph& g, const std::vector<PlantedRule>& rules,
                   double baseline) {
  double y = baseline;
  for (const PlantedRule& rule : rules) {
    std::vector<bool> present;
    for (const EnvironmentDescriptor& motif : rule.motifs)
      present.push_back(contains_environment(g, motif));
    y += rule.contribution(present);
  }
  return y;
}

std::pair<Dataset, GroundTruth> gen_dataset(const SynthSpec& spec) {
  if (spec.node_alphabet.empty() || spec.edge_alphabet.empty())
    throw GraphError("gen_dataset: empty label alphabet");
  if (spec.min_nodes < 1 || spec.max_nodes < spec.min_nodes)
    throw GraphError("gen_dataset: bad node-count range");
  for (const PlantedRule& rule : spec.rules) {
    if (rule.motifs.size() != motif_count_for(rule.kind))
      throw GraphError("rule '" + rule.name + "': wrong motif count for kind");
    if (rule.effect == 0.0)
      throw GraphError("rule '" + rule.name + "': zero effect");
    for (const EnvironmentDescriptor& motif : rule.motifs) {
      if (motif.nodes.empty())
        throw GraphError("rule '" + rule.name + "': empty motif");
      if (static_cast<int>(motif.nodes.size()) > spec.min_nodes)
        throw GraphError("rule '" + rule.name +
                         "': motif larger than minimum graph size");
      if (attach_candidates(motif).empty())
        throw GraphError("rule '" + rule.name +
                         "': motif graft impossible, no attachment node at "
                         "distance >= radius from root");
    }
  }

  // flat motif list for planting bookkeeping
  struct MotifRef {
    std::size_t rule;
    std::size_t slot;
    const EnvironmentDescriptor* motif;
  };
  std::vector<MotifRef> motifs;
  for (std::size_t r = 0; r < spec.rules.size(); ++r)
    for (std::size_t s = 0; s < spec.rules[r].motifs.size(); ++s)
      motifs.push_back({r, s, &spec.rules[r].motifs[s]});

  Dataset ds;
  ds.name = spec.name;
  constexpr int kGraphRetries = 100;

  for (std::size_t i = 0; i < spec.n; ++i) {
    Rng rng(mix_seed(spec.seed, i));
    LabeledGraph accepted;
    bool ok = false;
    std::string blame;
    for (int attempt = 0; attempt < kGraphRetries && !ok; ++attempt) {
      // random connected base graph: random attachment tree + extra edges
      const int n = spec.min_nodes +
                    static_cast<int>(rng.below(spec.max_nodes - spec.min_nodes + 1));
      LabeledGraph g;
      g.id = "g" + std::to_string(i);
      for (int v = 0; v < n; ++v)
        g.nodes.push_back(
            {spec.node_alphabet[rng.below(spec.node_alphabet.size())], {}});
      for (int v = 1; v < n; ++v)
        g.edges.push_back(
            {static_cast<int>(rng.below(v)), v,
             {spec.edge_alphabet[rng.below(spec.edge_alphabet.size())]}});
      if (spec.extra_edge_prob > 0.0) {
        for (int u = 0; u < n; ++u)
          for (int v = u + 1; v < n; ++v)
            if (!g.has_edge(u, v) && rng.chance(spec.extra_edge_prob))
              g.edges.push_back(
                  {u, v, {spec.edge_alphabet[rng.below(spec.edge_alphabet.size())]}});
      }

      std::vector<bool> base_present(motifs.size());
      for (std::size_t m = 0; m < motifs.size(); ++m)
        base_present[m] = contains_environment(g, *motifs[m].motif);

      std::vector<bool> designated(motifs.size());
      for (std::size_t m = 0; m < motifs.size(); ++m)
        designated[m] = rng.chance(spec.rules[motifs[m].rule].fraction);

      const int base_n = n;
      for (std::size_t m = 0; m < motifs.size(); ++m) {
        if (!designated[m] || base_present[m]) continue;
        const EnvironmentDescriptor& motif = *motifs[m].motif;
        auto candidates = attach_candidates(motif);
        const int attach_local = candidates[rng.below(candidates.size())];
        const int offset = g.node_count();
        for (const NodeLabel& nl : motif.nodes) g.nodes.push_back(nl);
        for (const Edge& e : motif.edges)
          g.edges.push_back({e.u + offset, e.v + offset, e.label});
        g.edges.push_back(
            {static_cast<int>(rng.below(base_n)), attach_local + offset,
             {spec.edge_alphabet[rng.below(spec.edge_alphabet.size())]}});
      }

      // verify grafts landed and nothing unplanned appeared
      ok = true;
      for (std::size_t m = 0; m < motifs.size() && ok; ++m) {
        const bool now = contains_environment(g, *motifs[m].motif);
        if (designated[m] && !now) {
          ok = false;
          blame = spec.rules[motifs[m].rule].name;
        }
        if (!designated[m] && !base_present[m] && now) {
          ok = false;
          blame = spec.rules[motifs[m].rule].name;
        }
      }
      if (ok) accepted = std::move(g);
    }
    if (!ok)
      throw GraphError("gen_dataset: graph " + std::to_string(i) +
                       " failed planting after " +
                       std::to_string(kGraphRetries) +
                       " attempts (rule '" + blame + "')");
    accepted.validate();
    const double y = oracle_eval(accepted, spec.rules, spec.baseline) +
                     (spec.noise_sigma > 0.0 ? rng.normal(spec.noise_sigma) : 0.0);
    ds.samples.push_back({std::move(accepted), y});
  }

  GroundTruth gt;
  gt.baseline = spec.baseline;
  gt.noise_sigma = spec.noise_sigma;
  for (const PlantedRule& rule : spec.rules) {
    GroundTruthRule gr;
    gr.name = rule.name;
    gr.kind = rule.kind;
    gr.effect = rule.effect;
    for (const EnvironmentDescriptor& motif : rule.motifs) {
      gr.motif_ids.push_back(motif_feature_id(motif));
      std::size_t count = 0;
      for (const Sample& s : ds.samples)
        if (contains_environment(s.graph, motif)) ++count;
      gr.presence_counts.push_back(count);
    }
    gt.rules.push_back(std::move(gr));
  }
  return {std::move(ds), std::move(gt)};
}

EnvironmentDescriptor leaf_pair_motif(const std::string& root_kind,
                                      const std::string& edge_kind,
                                      const std::string& leaf_kind) {
  EnvironmentDescriptor env;
  env.nodes = {{root_kind, {}}, {leaf_kind, {}}};
  env.edges = {{0, 1, {edge_kind}}};
  env.radius = 1;
  env.root = 0;
  return env;
}

std::string SynthSpec::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["n"] = n;
  j["min_nodes"] = min_nodes;
  j["max_nodes"] = max_nodes;
  j["node_alphabet"] = node_alphabet;
  j["edge_alphabet"] = edge_alphabet;
  j["extra_edge_prob"] = extra_edge_prob;
  j["noise_sigma"] = noise_sigma;
  j["baseline"] = baseline;
  j["seed"] = seed;
  j["rules"] = nlohmann::json::array();
  for (const PlantedRule& rule : rules) {
    nlohmann::ordered_json jr;
    jr["name"] = rule.name;
    jr["kind"] = kind_name(rule.kind);
    jr["effect"] = rule.effect;
    jr["fraction"] = rule.fraction;
    jr["motifs"] = nlohmann::json::array();
    for (const EnvironmentDescriptor& motif : rule.motifs)
      jr["motifs"].push_back(detail::env_to_json(motif));
    j["rules"].push_back(jr);
  }
  return j.dump(2);
}

SynthSpec SynthSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SynthSpec spec;
  spec.name = j.value("name", std::string("synth"));
  spec.n = j.at("n").get<std::size_t>();
  spec.min_nodes = j.at("min_nodes").get<int>();
  spec.max_nodes = j.at("max_nodes").get<int>();
  spec.node_alphabet = j.at("node_alphabet").get<std::vector<std::string>>();
  spec.edge_alphabet = j.at("edge_alphabet").get<std::vector<std::string>>();
  spec.extra_edge_prob = j.value("extra_edge_prob", 0.0);
  spec.noise_sigma = j.value("noise_sigma", 0.0);
  spec.baseline = j.value("baseline", 0.0);
  spec.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("rules")) {
    for (const auto& jr : j["rules"]) {
      PlantedRule rule;
      rule.name = jr.value("name", std::string("rule"));
      rule.kind = kind_from_name(jr.at("kind").get<std::string>());
      rule.effect = jr.at("effect").get<double>();
      rule.fraction = jr.value("fraction", 0.5);
      for (const auto& jm : jr.at("motifs"))
        rule.motifs.push_back(detail::env_from_json(jm));
      spec.rules.push_back(std::move(rule));
    }
  }
  return spec;
}

std::string GroundTruth::to_json() const {
  nlohmann::ordered_json j;
  j["baseline"] = baseline;
  j["noise_sigma"] = noise_sigma;
  j["hash_version"] = kHashVersion;
  j["rules"] = nlohmann::json::array();
  for (const GroundTruthRule& r : rules) {
    nlohmann::ordered_json jr;
    jr["name"] = r.name;
    jr["kind"] = kind_name(r.kind);
    jr["effect"] = r.effect;
    jr["motif_ids"] = nlohmann::json::array();
    for (FeatureId id : r.motif_ids) jr["motif_ids"].push_back(std::to_string(id));
    jr["presence_counts"] = r.presence_counts;
    j["rules"].push_back(jr);
  }
  return j.dump(2);
}

}  // namespace hypograph
