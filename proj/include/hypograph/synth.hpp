#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypograph/fingerprint.hpp"
#include "hypograph/graph.hpp"
#include "hypograph/ingest.hpp"

namespace hypograph {

struct PlantedRule {
  enum class Kind { Additive, XorPair, AbsencePair };
  Kind kind = Kind::Additive;
  std::string name;
  std::vector<EnvironmentDescriptor> motifs;  // 1 for additive, 2 for pairs
  double effect = 0.0;
  double fraction = 0.5;  // planting probability per motif per graph

  double contribution(const std::vector<bool>& present) const;
};

struct SynthSpec {
  std::string name = "synth";
  std::size_t n = 100;
  int min_nodes = 8;
  int max_nodes = 20;
  std::vector<std::string> node_alphabet = {"A", "B", "C", "D"};
  std::vector<std::string> edge_alphabet = {"e"};
  double extra_edge_prob = 0.05;  // per non-tree node pair
  std::vector<PlantedRule> rules;
  double noise_sigma = 0.0;
  double baseline = 0.0;
  std::uint64_t seed = 0;

  std::string to_json() const;
  static SynthSpec from_json(const std::string& text);
};

struct GroundTruthRule {
  std::string name;
  PlantedRule::Kind kind;
  double effect = 0.0;
  std::vector<FeatureId> motif_ids;  // id of each motif's root environment
  std::vector<std::size_t> presence_counts;  // realized, per motif
};

struct GroundTruth {
  std::vector<GroundTruthRule> rules;
  double baseline = 0.0;
  double noise_sigma = 0.0;

  std::string to_json() const;
};

// Feature id the fingerprint assigns to this environment's root at the
// environment's own radius.
FeatureId motif_feature_id(const EnvironmentDescriptor& motif);

// Deterministic noiseless rule evaluation via contains_environment.
double oracle_eval(const LabeledGraph& g, const std::vector<PlantedRule>& rules,
                   double baseline);

std::pair<Dataset, GroundTruth> gen_dataset(const SynthSpec& spec);

// Convenience motif: root labeled `root_kind` whose radius-1 environment is
// exactly one `leaf_kind` neighbor over `edge_kind`.
EnvironmentDescriptor leaf_pair_motif(const std::string& root_kind,
                                      const std::string& edge_kind,
                                      const std::string& leaf_kind);

}  // namespace hypograph
