#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypograph/fingerprint.hpp"
#include "hypograph/graph.hpp"
#include "hypograph/hypothesis.hpp"
#include "hypograph/ingest.hpp"
#include "hypograph/synth.hpp"

namespace hypograph {

// Property oracle: graph in, target value out. Throws on failure.
using Oracle = std::function<double(const LabeledGraph&)>;

struct PairRecord {
  std::string sample_id;
  std::string partner_id;  // matched-pair partner; empty for mutation pairs
  double y_with = 0.0;
  double y_without = 0.0;
  int distance = 0;        // Hamming distance (matched pairs) or edits (=1)
  bool ok = true;
  std::string error;
};

struct VerificationReport {
  FeatureId feature = 0;
  std::string protocol;           // "mutation" or "matched-pair"
  std::size_t pair_count = 0;
  double paired_effect = 0.0;     // mean(y_with - y_without)
  bool agreement = false;         // sign matches hypothesis direction
  bool agreement_defined = false; // pair_count >= min_pairs
  std::size_t samples_tried = 0;
  std::size_t oracle_failures = 0;
  std::vector<PairRecord> pairs;

  std::string to_json() const;
};

struct MutationConfig {
  int attempts_per_sample = 200;
  std::uint64_t seed = 0;
  int radius = 3;                    // featurization radius for bit checks
  std::size_t min_pairs = 5;         // below this, agreement is undefined
  MutationSpec mutation;
  std::vector<FeatureId> guard;      // other top-k ids that must not flip
  Direction hypothesis_direction = Direction::None;
};

// For each sample, mutate until the target feature bit flips while every
// guard bit is unchanged; evaluate the oracle on both graphs.
VerificationReport mutation_test(const Dataset& ds, FeatureId feature,
                                 const Oracle& oracle,
                                 const MutationConfig& config);

struct MatchedPairConfig {
  int max_hamming = 2;               // over all features except the target
  std::size_t min_pairs = 5;
  Direction hypothesis_direction = Direction::None;
};

// Greedy minimum-distance matching of feature-present samples to
// feature-absent samples; each sample used at most once per side.
VerificationReport matched_pairs(const Dataset& ds, const FeatureMatrix& X,
                                 FeatureId feature,
                                 const MatchedPairConfig& config);

// Oracle spawning an external command per graph: the graph JSON object goes
// to the child's standard input, one decimal number is read from its
// standard output; nonzero exit status is a failure.
Oracle external_oracle(const std::string& command);

// Built-in noiseless oracle over planted rules.
Oracle synth_oracle(std::vector<PlantedRule> rules, double baseline);

}  // namespace hypograph
