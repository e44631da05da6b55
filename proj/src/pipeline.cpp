#include "hypograph/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "hypograph/rng.hpp"

namespace hypograph {

PipelineResult run_pipeline(const Dataset& ds, const PipelineConfig& config) {
  ds.validate();
  PipelineResult result;
  result.matrix = featurize_dataset(ds, config.radius, result.registry);
  const std::vector<double> y = ds.targets();
  const std::size_t n = ds.size();

  // Seeded split. The validation MSE is reported in the manifest only;
  // nothing downstream looks at it.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(config.boost.seed, 0x76616cULL));
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  std::size_t n_val = static_cast<std::size_t>(
      static_cast<double>(n) * std::clamp(config.val_fraction, 0.0, 0.5));
  if (n - n_val < 2) n_val = 0;
  result.n_val = n_val;
  result.n_train = n - n_val;

  FeatureMatrix train;
  train.vocab = result.matrix.vocab;
  std::vector<double> y_train;
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + n_val);
  std::vector<std::size_t> train_rows(order.begin() + n_val, order.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(val_rows.begin(), val_rows.end());
  for (std::size_t i : train_rows) {
    train.rows.push_back(result.matrix.rows[i]);
    y_train.push_back(y[i]);
  }

  result.ensemble = fit_ensemble(train, y_train, config.boost);
  result.train_mse = result.ensemble.train_mse.empty()
                         ? 0.0
                         : result.ensemble.train_mse.back();
  if (!val_rows.empty()) {
    double sse = 0.0;
    for (std::size_t i : val_rows) {
      const double e = result.ensemble.predict_row(result.matrix, i) - y[i];
      sse += e * e;
    }
    result.val_mse = sse / static_cast<double>(val_rows.size());
  }

  result.importance = importances(result.ensemble, train);
  result.hypotheses = generate_hypotheses(result.ensemble, result.matrix, y,
                                          result.registry, config.hypothesis);

  std::vector<FeatureId> candidates;
  for (const auto& [id, value] : result.importance.ranked()) {
    if (candidates.size() >= config.combine.k) break;
    (void)value;
    candidates.push_back(id);
  }
  result.macro_features =
      search_macro_features(candidates, result.matrix, y, config.combine);
  return result;
}

}  // namespace hypograph
