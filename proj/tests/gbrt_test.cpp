#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypograph/gbrt.hpp"
#include "hypograph/rng.hpp"

using namespace hypograph;

namespace {

// Matrix straight from dense 0/1 columns; vocab ids are 1-based column ids.
FeatureMatrix from_columns(const std::vector<std::vector<std::uint8_t>>& cols) {
  FeatureMatrix X;
  for (std::size_t c = 0; c < cols.size(); ++c)
    X.vocab.push_back(static_cast<FeatureId>(c + 1));
  const std::size_t n = cols.empty() ? 0 : cols[0].size();
  X.rows.resize(n);
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t i = 0; i < n; ++i)
      if (cols[c][i]) X.rows[i].push_back(static_cast<std::uint32_t>(c));
  return X;
}

FeatureMatrix random_matrix(Rng& rng, std::size_t n, std::size_t feats) {
  std::vector<std::vector<std::uint8_t>> cols(feats,
                                              std::vector<std::uint8_t>(n, 0));
  for (auto& col : cols)
    for (auto& bit : col) bit = rng.chance(0.5) ? 1 : 0;
  return from_columns(cols);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// Exhaustive single-split search: best (feature, SSE reduction) with the
// same tie-break as the tree (lowest id wins).
std::pair<int, double> oracle_best_split(const FeatureMatrix& X,
                                         const std::vector<double>& y,
                                         int min_leaf) {
  const std::size_t n = y.size();
  double s = 0.0;
  for (double v : y) s += v;
  int best_feat = -1;
  double best_gain = 0.0;
  for (std::size_t c = 0; c < X.vocab.size(); ++c) {
    double s1 = 0.0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (X.present(i, static_cast<std::uint32_t>(c))) {
        s1 += y[i];
        ++n1;
      }
    const std::size_t n0 = n - n1;
    if (n1 < static_cast<std::size_t>(min_leaf) ||
        n0 < static_cast<std::size_t>(min_leaf))
      continue;
    const double gain = s1 * s1 / n1 + (s - s1) * (s - s1) / n0 - s * s / n;
    if (gain > best_gain + 1e-12) {
      best_gain = gain;
      best_feat = static_cast<int>(c);
    }
  }
  return {best_feat, best_gain};
}

}  // namespace

TEST_CASE("fit_tree: constant residuals give a single leaf") {
  FeatureMatrix X = from_columns({{1, 0, 1, 0}});
  Tree t = fit_tree(X, all_rows(4), {3, 3, 3, 3}, 3, 1);
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].feature_index == -1);
  CHECK(t.nodes[0].value == doctest::Approx(3.0));
}

TEST_CASE("fit_tree: perfect split of {0,0,4,4}") {
  FeatureMatrix X = from_columns({{0, 0, 1, 1}});
  Tree t = fit_tree(X, all_rows(4), {0, 0, 4, 4}, 1, 1);
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].feature == 1);
  CHECK(t.predict_row(X, 0) == doctest::Approx(0.0));
  CHECK(t.predict_row(X, 3) == doctest::Approx(4.0));
  CHECK(t.nodes[0].n_node == 4);
  CHECK(t.nodes[0].gain == doctest::Approx(16.0));  // SSE drops 16 -> 0
}

TEST_CASE("fit_tree: depth-1 split equals exhaustive oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 8 + rng.below(57);
    const std::size_t feats = 2 + rng.below(31);
    FeatureMatrix X = random_matrix(rng, n, feats);
    std::vector<double> y(n);
    for (double& v : y) v = rng.uniform() * 4.0 - 2.0;
    Tree t = fit_tree(X, all_rows(n), y, 1, 1);
    auto [feat, gain] = oracle_best_split(X, y, 1);
    if (feat < 0) {
      CHECK(t.nodes.size() == 1);
    } else {
      REQUIRE(t.nodes.size() == 3);
      CHECK(t.nodes[0].feature_index == feat);
      CHECK(t.nodes[0].gain == doctest::Approx(gain).epsilon(1e-9));
    }
  }
}

TEST_CASE("fit_tree: tie-break picks the lowest feature id") {
  // two identical columns: ids 1 and 2
  FeatureMatrix X = from_columns({{1, 1, 0, 0}, {1, 1, 0, 0}});
  Tree t = fit_tree(X, all_rows(4), {5, 5, 1, 1}, 1, 1);
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].feature == 1);
}

TEST_CASE("fit_tree: min_leaf forbids unbalanced splits") {
  FeatureMatrix X = from_columns({{1, 0, 0, 0, 0, 0}});
  Tree t = fit_tree(X, all_rows(6), {9, 0, 0, 0, 0, 0}, 3, 2);
  CHECK(t.nodes.size() == 1);  // the only split would isolate one row
}

TEST_CASE("fit_tree: respects max depth") {
  // four distinct cells from two features
  FeatureMatrix X = from_columns({{0, 0, 1, 1}, {0, 1, 0, 1}});
  std::vector<double> y = {0, 1, 2, 7};
  Tree deep = fit_tree(X, all_rows(4), y, 2, 1);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(deep.predict_row(X, i) == doctest::Approx(y[i]));
  Tree shallow = fit_tree(X, all_rows(4), y, 1, 1);
  int splits = 0;
  for (const TreeNode& nd : shallow.nodes)
    if (nd.feature_index >= 0) ++splits;
  CHECK(splits == 1);
}

TEST_CASE("fit_ensemble: constant targets collapse to c0") {
  FeatureMatrix X = from_columns({{1, 0, 1, 0}});
  BoostConfig cfg;
  cfg.stages = 5;
  BoostedEnsemble e = fit_ensemble(X, {7, 7, 7, 7}, cfg);
  CHECK(e.c0 == doctest::Approx(7.0));
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(e.predict_row(X, i) == doctest::Approx(7.0));
  CHECK(e.train_mse.back() == doctest::Approx(0.0));
}

TEST_CASE("fit_ensemble: one perfect feature, gamma 1, one stage") {
  FeatureMatrix X = from_columns({{0, 0, 1, 1}});
  BoostConfig cfg;
  cfg.stages = 1;
  cfg.shrinkage = 1.0;
  cfg.max_depth = 1;
  cfg.min_leaf = 1;
  BoostedEnsemble e = fit_ensemble(X, {0, 0, 4, 4}, cfg);
  CHECK(e.c0 == doctest::Approx(2.0));
  CHECK(e.train_mse.back() == doctest::Approx(0.0));
  CHECK(e.predict_row(X, 0) == doctest::Approx(0.0));
  CHECK(e.predict_row(X, 2) == doctest::Approx(4.0));
  // id-set prediction path agrees
  CHECK(e.predict(std::set<FeatureId>{1}) == doctest::Approx(4.0));
  CHECK(e.predict(std::set<FeatureId>{}) == doctest::Approx(0.0));
  CHECK(e.predict(std::set<FeatureId>{99}) == doctest::Approx(0.0));
}

TEST_CASE("fit_ensemble: c0 is the target mean, errors on tiny input") {
  Rng rng(1);
  FeatureMatrix X = random_matrix(rng, 10, 3);
  std::vector<double> y(10);
  for (double& v : y) v = rng.uniform();
  BoostConfig cfg;
  cfg.stages = 3;
  BoostedEnsemble e = fit_ensemble(X, y, cfg);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 10.0;
  CHECK(e.c0 == doctest::Approx(mean).epsilon(1e-12));

  FeatureMatrix empty;
  CHECK_THROWS_AS(fit_ensemble(empty, {}, cfg), GraphError);
  FeatureMatrix one = from_columns({{1}});
  CHECK_THROWS_AS(fit_ensemble(one, {1.0}, cfg), GraphError);
}

TEST_CASE("fit_ensemble: training MSE non-increasing") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMatrix X = random_matrix(rng, 32, 8);
    std::vector<double> y(32);
    for (double& v : y) v = rng.uniform() * 10.0;
    for (double gamma : {0.1, 1.0}) {
      BoostConfig cfg;
      cfg.stages = 10;
      cfg.shrinkage = gamma;
      cfg.min_leaf = 2;
      BoostedEnsemble e = fit_ensemble(X, y, cfg);
      REQUIRE(e.train_mse.size() == 11);
      for (std::size_t m = 1; m < e.train_mse.size(); ++m)
        CHECK(e.train_mse[m] <= e.train_mse[m - 1] + 1e-9);
    }
  }
}

TEST_CASE("reconstruction identity") {
  Rng rng(21);
  FeatureMatrix X = random_matrix(rng, 40, 10);
  std::vector<double> y(40);
  for (double& v : y) v = rng.uniform() * 6.0 - 3.0;
  BoostConfig cfg;
  cfg.stages = 25;
  BoostedEnsemble e = fit_ensemble(X, y, cfg);
  for (std::size_t i = 0; i < X.n(); ++i) {
    double manual = e.c0;
    for (const auto& st : e.stages)
      manual += st.shrinkage * st.tree.predict_row(X, i);
    CHECK(std::fabs(e.predict_row(X, i) - manual) <= 1e-9);
  }
}

TEST_CASE("deterministic across repeated fits") {
  Rng rng(33);
  FeatureMatrix X = random_matrix(rng, 30, 6);
  std::vector<double> y(30);
  for (double& v : y) v = rng.uniform();
  BoostConfig cfg;
  cfg.stages = 12;
  BoostedEnsemble a = fit_ensemble(X, y, cfg);
  BoostedEnsemble b = fit_ensemble(X, y, cfg);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("model JSON round trip preserves predictions exactly") {
  Rng rng(41);
  FeatureMatrix X = random_matrix(rng, 24, 5);
  std::vector<double> y(24);
  for (double& v : y) v = rng.uniform() * 2.0;
  BoostConfig cfg;
  cfg.stages = 8;
  BoostedEnsemble e = fit_ensemble(X, y, cfg);
  BoostedEnsemble back = BoostedEnsemble::from_json(e.to_json());
  CHECK(back.c0 == e.c0);
  CHECK(back.stages.size() == e.stages.size());
  CHECK(back.hash_version == e.hash_version);
  for (std::size_t i = 0; i < X.n(); ++i)
    CHECK(back.predict_row(X, i) == e.predict_row(X, i));
}

TEST_CASE("importances: single split feature has importance 1") {
  FeatureMatrix X = from_columns({{0, 0, 1, 1}, {0, 1, 0, 1}});
  BoostConfig cfg;
  cfg.stages = 1;
  cfg.shrinkage = 1.0;
  cfg.max_depth = 1;
  cfg.min_leaf = 1;
  BoostedEnsemble e = fit_ensemble(X, {0, 0, 4, 4}, cfg);
  ImportanceTable t = importances(e, X);
  REQUIRE(t.values.count(1) == 1);
  CHECK(t.values.at(1) == doctest::Approx(1.0));
  CHECK(t.values.count(2) == 0);
}

TEST_CASE("importances: symmetric features split mass evenly") {
  // y = f1 + f2 on the four balanced cells; equal gains by symmetry
  FeatureMatrix X = from_columns({{0, 0, 1, 1}, {0, 1, 0, 1}});
  BoostConfig cfg;
  cfg.stages = 60;
  cfg.shrinkage = 0.5;
  cfg.max_depth = 2;
  cfg.min_leaf = 1;
  BoostedEnsemble e = fit_ensemble(X, {0, 1, 1, 2}, cfg);
  ImportanceTable t = importances(e, X);
  double sum = 0.0;
  for (const auto& [id, v] : t.values) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0));
  CHECK(t.values.at(1) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(t.values.at(2) == doctest::Approx(0.5).epsilon(0.02));

  auto ranked = t.ranked();
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].second >= ranked[1].second);

  BoostedEnsemble blank;
  CHECK(importances(blank, X).values.empty());
}
