#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hypograph/fingerprint.hpp"

namespace hypograph {

// Regression tree over binary features, stored as an index arena.
// feature_index < 0 marks a leaf.
struct TreeNode {
  int feature_index = -1;      // vocab index at fit time
  FeatureId feature = 0;       // stable id, used for prediction
  int left = -1;               // feature absent
  int right = -1;              // feature present
  double value = 0.0;          // leaf prediction
  double gain = 0.0;           // SSE reduction achieved by this split
  std::size_t n_node = 0;      // training rows that reached this node
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root (when non-empty)

  double predict_row(const FeatureMatrix& X, std::size_t row) const;
  double predict(const std::set<FeatureId>& features) const;
};

struct BoostConfig {
  int stages = 200;
  double shrinkage = 0.1;
  int max_depth = 3;
  int min_leaf = 5;
  std::uint64_t seed = 0;
  double row_subsample = 1.0;  // fraction of rows per stage; 1 = off
  double col_subsample = 1.0;  // fraction of features per stage; 1 = off
};

struct BoostedEnsemble {
  double c0 = 0.0;
  struct Stage {
    Tree tree;
    double shrinkage = 1.0;
  };
  std::vector<Stage> stages;
  BoostConfig config;
  std::string hash_version = kHashVersion;
  std::vector<double> train_mse;  // MSE after each stage, element 0 = after c0

  double predict_row(const FeatureMatrix& X, std::size_t row) const;
  double predict(const std::set<FeatureId>& features) const;

  std::string to_json() const;
  static BoostedEnsemble from_json(const std::string& text);
};

// Greedy CART on squared error over binary features; residuals are fitted
// with mean-valued leaves. `row_index` selects the rows in play.
Tree fit_tree(const FeatureMatrix& X, const std::vector<std::size_t>& row_index,
              const std::vector<double>& residuals, int max_depth, int min_leaf,
              const std::vector<std::uint8_t>* feature_mask = nullptr);

BoostedEnsemble fit_ensemble(const FeatureMatrix& X,
                             const std::vector<double>& y,
                             const BoostConfig& config);

struct ImportanceTable {
  std::map<FeatureId, double> values;  // normalized, sum = 1 when nonempty

  // Descending by importance, ties by ascending id.
  std::vector<std::pair<FeatureId, double>> ranked() const;
};

ImportanceTable importances(const BoostedEnsemble& ensemble,
                            const FeatureMatrix& X);

}  // namespace hypograph
