#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypograph/graph.hpp"
#include "hypograph/ingest.hpp"

namespace hypograph {

using FeatureId = std::uint64_t;

// Version tag for the feature hash; recorded in every artifact so runs can
// be compared across builds.
inline constexpr const char* kHashVersion = "fnv1a64-v1";

// Registry from feature id to a displayable rooted environment. Structural
// disagreements between environments mapping to the same id (64-bit hash
// collisions) are logged, first writer wins.
class SubgraphRegistry {
 public:
  struct Collision {
    FeatureId id;
    std::string kept_signature;
    std::string dropped_signature;
  };

  void add(FeatureId id, const EnvironmentDescriptor& env);
  void merge(const SubgraphRegistry& other);

  bool contains(FeatureId id) const { return entries_.count(id) > 0; }
  const EnvironmentDescriptor& at(FeatureId id) const;
  const std::map<FeatureId, EnvironmentDescriptor>& entries() const {
    return entries_;
  }
  const std::vector<Collision>& collisions() const { return collisions_; }

  std::string to_json() const;
  static SubgraphRegistry from_json(const std::string& text);

 private:
  std::map<FeatureId, EnvironmentDescriptor> entries_;
  std::map<FeatureId, std::string> signatures_;  // cheap structural signature
  std::vector<Collision> collisions_;
};

// Sparse binary sample-by-feature matrix.
struct FeatureMatrix {
  std::vector<FeatureId> vocab;                   // sorted ascending
  std::vector<std::vector<std::uint32_t>> rows;   // sorted vocab indices

  std::size_t n() const { return rows.size(); }
  std::optional<std::uint32_t> vocab_index(FeatureId id) const;
  bool present(std::size_t row, std::uint32_t vocab_idx) const;
  // Dense 0/1 column for one vocabulary feature.
  std::vector<std::uint8_t> column(std::uint32_t vocab_idx) const;
  std::set<FeatureId> row_features(std::size_t row) const;

  std::string to_json() const;
};

// All environment ids of g for radii 0..radius. Optionally records the
// id -> environment mapping in `registry`.
std::vector<FeatureId> featurize(const LabeledGraph& g, int radius,
                                 SubgraphRegistry* registry = nullptr);

FeatureMatrix featurize_dataset(const Dataset& ds, int radius,
                                SubgraphRegistry& registry);

// The id featurize assigns to `node`'s environment at exactly `radius`.
FeatureId node_environment_id(const LabeledGraph& g, int node, int radius);

struct FoldResult {
  std::vector<std::uint8_t> bits;
  std::vector<std::pair<FeatureId, FeatureId>> collisions;  // first kept, later
};

// Dense folded bit vector; length must be a power of two >= 64.
FoldResult fold(const std::vector<FeatureId>& features, int length);

std::string feature_id_hex(FeatureId id);

}  // namespace hypograph
