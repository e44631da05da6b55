#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypograph/fingerprint.hpp"
#include "hypograph/gbrt.hpp"

namespace hypograph {

enum class Direction { Increase, Decrease, None };

const char* direction_name(Direction d);

struct EffectStats {
  std::size_t n1 = 0;        // samples with the feature/expression
  std::size_t n0 = 0;        // samples without
  double mean1 = 0.0;
  double mean0 = 0.0;
  double s = 0.0;            // mean1 - mean0, target units
  double d = 0.0;            // s / pooled standard deviation
  Direction direction = Direction::None;
  bool contrast = true;      // false when either side is empty
};

// d_min only decides the increase/decrease/none cutoff.
EffectStats effect_strength(const std::vector<std::uint8_t>& column,
                            const std::vector<double>& y, double d_min = 0.2);

struct HistogramPair {
  std::vector<double> edges;               // bins+1 edges over [min, max]
  std::vector<std::size_t> counts_true;    // expression holds
  std::vector<std::size_t> counts_false;
  bool degenerate = false;                 // all targets equal: single bin
};

// Equal-width bins over [min(y), max(y)]; left-closed, last bin right-closed.
HistogramPair conditional_histogram(const std::vector<std::uint8_t>& column,
                                    const std::vector<double>& y, int bins);

struct Hypothesis {
  std::size_t rank = 0;
  FeatureId feature = 0;
  double importance = 0.0;
  EffectStats stats;
  std::string subgraph_canonical;
  HistogramPair histogram;

  // "Feature <id> (<subgraph>) leads to <direction> of <property> ..."
  std::string sentence(const std::string& property) const;
};

struct HypothesisConfig {
  std::size_t top_k = 30;
  double d_min = 0.2;
  std::size_t support_min = 0;  // 0 = auto: max(5, 0.5% of n)
  int bins = 40;
};

std::size_t effective_support_min(std::size_t configured, std::size_t n);

// Top-k features by importance, support-filtered, ordered by importance.
// Entries with |d| < d_min stay in the list with direction None; report
// writers decide whether to show them.
std::vector<Hypothesis> generate_hypotheses(const BoostedEnsemble& ensemble,
                                            const FeatureMatrix& X,
                                            const std::vector<double>& y,
                                            const SubgraphRegistry& registry,
                                            const HypothesisConfig& config);

std::string hypotheses_to_csv(const std::vector<Hypothesis>& list);
std::string hypotheses_to_json(const std::vector<Hypothesis>& list,
                               const std::string& property);

}  // namespace hypograph
