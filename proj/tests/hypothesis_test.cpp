#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "hypograph/fingerprint.hpp"
#include "hypograph/hypothesis.hpp"

using namespace hypograph;

TEST_CASE("effect_strength: constant column flags no contrast") {
  EffectStats st = effect_strength({0, 0, 0, 0}, {1, 2, 3, 4});
  CHECK_FALSE(st.contrast);
  CHECK(st.direction == Direction::None);
  CHECK(st.n1 == 0);
  CHECK(st.n0 == 4);
  EffectStats all = effect_strength({1, 1}, {1.0, 2.0});
  CHECK_FALSE(all.contrast);
}

TEST_CASE("effect_strength: {1,1,5,5} exact means") {
  EffectStats st = effect_strength({0, 0, 1, 1}, {1, 1, 5, 5});
  CHECK(st.s == doctest::Approx(4.0));
  CHECK(st.mean1 == doctest::Approx(5.0));
  CHECK(st.mean0 == doctest::Approx(1.0));
  CHECK(st.n1 == 2);
  CHECK(st.n0 == 2);
  CHECK(st.direction == Direction::Increase);
  CHECK(st.d >= 1e6);  // zero within-group spread
}

TEST_CASE("effect_strength: antisymmetry under column negation") {
  std::vector<std::uint8_t> col = {1, 0, 1, 0, 0, 1};
  std::vector<double> y = {2.0, 1.0, 2.5, 0.5, 1.5, 3.0};
  std::vector<std::uint8_t> neg(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) neg[i] = col[i] ? 0 : 1;
  EffectStats a = effect_strength(col, y);
  EffectStats b = effect_strength(neg, y);
  CHECK(a.s == doctest::Approx(-b.s));
  CHECK(a.d == doctest::Approx(-b.d));
  CHECK(a.n1 == b.n0);
}

TEST_CASE("effect_strength: scale equivariance") {
  std::vector<std::uint8_t> col = {1, 0, 1, 0, 1, 0};
  std::vector<double> y = {3.0, 1.0, 2.5, 1.5, 3.5, 0.5};
  std::vector<double> scaled(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) scaled[i] = y[i] * 2.5;
  EffectStats a = effect_strength(col, y);
  EffectStats b = effect_strength(col, scaled);
  CHECK(b.s == doctest::Approx(2.5 * a.s));
  CHECK(b.d == doctest::Approx(a.d));
  CHECK(b.direction == a.direction);
}

TEST_CASE("effect_strength: d_min gates direction") {
  std::vector<std::uint8_t> col = {1, 1, 0, 0};
  std::vector<double> y = {1.0, 2.0, 0.9, 2.0};
  CHECK(effect_strength(col, y, 1.0).direction == Direction::None);
  CHECK(effect_strength(col, y, 0.01).direction == Direction::Increase);
  CHECK_THROWS_AS(effect_strength({1}, {1.0}), GraphError);
  CHECK_THROWS_AS(effect_strength({1, 0}, {1.0}), GraphError);
}

TEST_CASE("conditional_histogram: basic partition") {
  HistogramPair h = conditional_histogram({0, 1}, {0.0, 1.0}, 2);
  CHECK(h.counts_true == std::vector<std::size_t>{0, 1});
  CHECK(h.counts_false == std::vector<std::size_t>{1, 0});
  CHECK(h.edges.front() == doctest::Approx(0.0));
  CHECK(h.edges.back() == doctest::Approx(1.0));
  CHECK_FALSE(h.degenerate);
}

TEST_CASE("conditional_histogram: counts always sum to n") {
  std::vector<double> y = {0.1, 0.9, 0.2, 0.8, 0.5, 0.5, 1.0, 0.0};
  std::vector<std::uint8_t> col = {1, 0, 1, 0, 1, 0, 1, 0};
  for (int bins : {2, 3, 7, 40}) {
    HistogramPair h = conditional_histogram(col, y, bins);
    std::size_t total = 0;
    for (std::size_t b = 0; b < h.counts_true.size(); ++b)
      total += h.counts_true[b] + h.counts_false[b];
    CHECK(total == y.size());
  }
}

TEST_CASE("conditional_histogram: degenerate all-equal targets") {
  HistogramPair h = conditional_histogram({1, 0, 1}, {2.0, 2.0, 2.0}, 10);
  CHECK(h.degenerate);
  CHECK(h.counts_true == std::vector<std::size_t>{2});
  CHECK(h.counts_false == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(conditional_histogram({1}, {1.0}, 1), GraphError);
  CHECK_THROWS_AS(conditional_histogram({}, {}, 4), GraphError);
}

TEST_CASE("effective_support_min auto rule") {
  CHECK(effective_support_min(12, 10000) == 12);
  CHECK(effective_support_min(0, 100) == 5);
  CHECK(effective_support_min(0, 4000) == 20);
}

namespace {

// A tiny setup whose model uses exactly one feature.
struct SingleFeatureFixture {
  Dataset ds;
  FeatureMatrix X;
  SubgraphRegistry reg;
  BoostedEnsemble ensemble;
  std::vector<double> y;

  SingleFeatureFixture() {
    for (int i = 0; i < 20; ++i) {
      LabeledGraph g;
      g.id = "g" + std::to_string(i);
      g.nodes.push_back({i < 10 ? "A" : "B", {}});
      const double target = i < 10 ? 1.0 : 5.0;
      ds.samples.push_back({g, target});
      y.push_back(target);
    }
    X = featurize_dataset(ds, 0, reg);
    BoostConfig cfg;
    cfg.stages = 1;
    cfg.shrinkage = 1.0;
    cfg.max_depth = 1;
    ensemble = fit_ensemble(X, y, cfg);
  }
};

}  // namespace

TEST_CASE("generate_hypotheses: single-feature ensemble") {
  SingleFeatureFixture fx;
  HypothesisConfig cfg;
  auto list = generate_hypotheses(fx.ensemble, fx.X, fx.y, fx.reg, cfg);
  REQUIRE(list.size() == 1);
  const Hypothesis& h = list[0];
  CHECK(h.rank == 1);
  CHECK(h.importance == doctest::Approx(1.0));
  CHECK(std::abs(h.stats.s) == doctest::Approx(4.0));
  CHECK(h.stats.n1 == 10);
  CHECK_FALSE(h.subgraph_canonical.empty());
  const std::string sent = h.sentence("y");
  CHECK(sent.find("Feature 0x") == 0);
  CHECK(sent.find("of y") != std::string::npos);
  CHECK(sent.find("support = 10/20") != std::string::npos);
}

TEST_CASE("generate_hypotheses: support filter drops rare features") {
  SingleFeatureFixture fx;
  HypothesisConfig cfg;
  cfg.support_min = 11;  // neither side can reach 11 of 20
  CHECK(generate_hypotheses(fx.ensemble, fx.X, fx.y, fx.reg, cfg).empty());
}

TEST_CASE("generate_hypotheses: empty ensemble yields empty list") {
  SingleFeatureFixture fx;
  BoostedEnsemble blank;
  CHECK(generate_hypotheses(blank, fx.X, fx.y, fx.reg, HypothesisConfig{})
            .empty());
}

TEST_CASE("hypotheses CSV and JSON output") {
  SingleFeatureFixture fx;
  auto list = generate_hypotheses(fx.ensemble, fx.X, fx.y, fx.reg,
                                  HypothesisConfig{});
  const std::string csv = hypotheses_to_csv(list);
  CHECK(csv.find("rank,feature_expr,subgraph_canonical,importance,s,d,n1,n0,"
                 "mean1,mean0\n") == 0);
  CHECK(csv.find("\n1,0x") != std::string::npos);
  // control-byte markers in canonical strings are escaped
  CHECK(csv.find('\x01') == std::string::npos);
  CHECK(csv.find("\\x01") != std::string::npos);

  const std::string json = hypotheses_to_json(list, "melting_point");
  CHECK(json.find("\"property\": \"melting_point\"") != std::string::npos);
  CHECK(json.find("\"histogram\"") != std::string::npos);
  CHECK(json.find("\"sentence\"") != std::string::npos);
}
