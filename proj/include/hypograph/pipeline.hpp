#pragma once

#include <string>
#include <vector>

#include "hypograph/combine.hpp"
#include "hypograph/fingerprint.hpp"
#include "hypograph/gbrt.hpp"
#include "hypograph/hypothesis.hpp"
#include "hypograph/ingest.hpp"

namespace hypograph {

struct PipelineConfig {
  int radius = 3;
  BoostConfig boost;
  HypothesisConfig hypothesis;
  CombineConfig combine;
  double val_fraction = 0.1;  // held out, reported only
  std::string property = "y";
  int threads = 1;
};

struct PipelineResult {
  FeatureMatrix matrix;
  SubgraphRegistry registry;
  BoostedEnsemble ensemble;
  ImportanceTable importance;
  std::vector<Hypothesis> hypotheses;
  std::vector<MacroFeature> macro_features;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

// featurize -> fit on the train split -> hypotheses and macro-feature search
// over the full dataset. The validation MSE is reported, never acted on.
PipelineResult run_pipeline(const Dataset& ds, const PipelineConfig& config);

}  // namespace hypograph
