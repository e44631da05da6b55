#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "hypograph/fingerprint.hpp"
#include "hypograph/ingest.hpp"
#include "hypograph/rng.hpp"

using namespace hypograph;

namespace {

LabeledGraph random_graph(Rng& rng, int n, int kinds) {
  LabeledGraph g;
  g.id = "rand";
  for (int v = 0; v < n; ++v)
    g.nodes.push_back({std::string(1, char('A' + rng.below(kinds))), {}});
  for (int v = 1; v < n; ++v)
    g.edges.push_back({static_cast<int>(rng.below(v)), v,
                       {rng.chance(0.5) ? "e" : "f"}});
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (!g.has_edge(u, v) && rng.chance(0.05))
        g.edges.push_back({u, v, {"e"}});
  return g;
}

LabeledGraph permuted(const LabeledGraph& g, const std::vector<int>& perm) {
  LabeledGraph out;
  out.id = g.id;
  out.nodes.resize(g.nodes.size());
  for (int v = 0; v < g.node_count(); ++v) out.nodes[perm[v]] = g.nodes[v];
  for (const Edge& e : g.edges)
    out.edges.push_back({perm[e.u], perm[e.v], e.label});
  return out;
}

std::set<FeatureId> as_set(const std::vector<FeatureId>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("featurize: empty graph gives empty set") {
  CHECK(featurize(LabeledGraph{}, 2).empty());
}

TEST_CASE("featurize: single node is one stable id") {
  LabeledGraph g;
  g.nodes.push_back({"C", {}});
  auto f1 = featurize(g, 0);
  auto f2 = featurize(g, 0);
  REQUIRE(f1.size() == 1);
  CHECK(f1 == f2);
  // radius 0 id ignores edges entirely but not attrs
  LabeledGraph h = g;
  h.nodes[0].attrs["charge"] = "-1";
  CHECK(featurize(h, 0) != f1);
}

TEST_CASE("featurize: path C-C-O at R=1 yields 5 distinct ids") {
  LabeledGraph g;
  g.nodes = {{"C", {}}, {"C", {}}, {"O", {}}};
  g.edges = {{0, 1, {"single"}}, {1, 2, {"single"}}};
  // radius 0: C, C, O -> 2 distinct; radius 1: terminal C, middle C, O -> 3
  CHECK(featurize(g, 1).size() == 5);
  CHECK(featurize(g, 0).size() == 2);
}

TEST_CASE("featurize output is sorted and duplicate-free") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    LabeledGraph g = random_graph(rng, 6 + (int)rng.below(6), 2);
    auto f = featurize(g, 3);
    CHECK(std::is_sorted(f.begin(), f.end()));
    CHECK(std::adjacent_find(f.begin(), f.end()) == f.end());
  }
}

TEST_CASE("featurize: node-order invariance") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + (int)rng.below(10);
    LabeledGraph g = random_graph(rng, n, 3);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    CHECK(featurize(g, 3) == featurize(permuted(g, perm), 3));
  }
}

TEST_CASE("featurize: radius monotonicity") {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    LabeledGraph g = random_graph(rng, 3 + (int)rng.below(9), 3);
    std::set<FeatureId> prev;
    for (int r = 0; r <= 4; ++r) {
      std::set<FeatureId> cur = as_set(featurize(g, r));
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = std::move(cur);
    }
  }
}

TEST_CASE("registry faithfulness on random graphs") {
  Rng rng(17);
  for (int t = 0; t < 25; ++t) {
    LabeledGraph g = random_graph(rng, 3 + (int)rng.below(7), 3);
    SubgraphRegistry reg;
    auto feats = featurize(g, 3, &reg);
    for (FeatureId id : feats) {
      REQUIRE(reg.contains(id));
      CHECK(contains_environment(g, reg.at(id)));
    }
    CHECK(reg.collisions().empty());
  }
}

TEST_CASE("node_environment_id matches featurize members") {
  LabeledGraph g;
  g.nodes = {{"C", {}}, {"O", {}}};
  g.edges = {{0, 1, {"double"}}};
  auto feats = as_set(featurize(g, 1));
  for (int v = 0; v < 2; ++v)
    for (int r = 0; r <= 1; ++r)
      CHECK(feats.count(node_environment_id(g, v, r)) == 1);
}

TEST_CASE("featurize_dataset: rows align, vocabulary sorted") {
  LabeledGraph a;
  a.id = "a";
  a.nodes = {{"C", {}}, {"O", {}}};
  a.edges = {{0, 1, {"double"}}};
  LabeledGraph b = a;
  b.id = "b";
  b.edges[0].label.kind = "single";
  Dataset ds;
  ds.samples = {{a, 0.0}, {b, 1.0}, {a, 2.0}};
  ds.samples[2].graph.id = "c";

  SubgraphRegistry reg;
  FeatureMatrix X = featurize_dataset(ds, 1, reg);
  REQUIRE(X.n() == 3);
  CHECK(std::is_sorted(X.vocab.begin(), X.vocab.end()));
  CHECK(X.rows[0] == X.rows[2]);     // identical graphs -> identical rows
  CHECK(X.rows[0] != X.rows[1]);     // bond kind differs at radius 1
  for (const auto& row : X.rows)
    for (std::uint32_t idx : row) CHECK(idx < X.vocab.size());
  // radius-0 ids shared, radius-1 ids differ
  auto fa = as_set(featurize(a, 1)), fb = as_set(featurize(b, 1));
  std::vector<FeatureId> common;
  std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(),
                        std::back_inserter(common));
  CHECK(common.size() == 2);
  for (FeatureId id : X.vocab) CHECK(reg.contains(id));
}

TEST_CASE("FeatureMatrix accessors and JSON export") {
  Dataset ds;
  LabeledGraph g;
  g.id = "a";
  g.nodes = {{"C", {}}};
  ds.samples = {{g, 0.0}};
  SubgraphRegistry reg;
  FeatureMatrix X = featurize_dataset(ds, 0, reg);
  REQUIRE(X.vocab.size() == 1);
  auto vi = X.vocab_index(X.vocab[0]);
  REQUIRE(vi.has_value());
  CHECK(X.present(0, *vi));
  CHECK_FALSE(X.vocab_index(12345).has_value());
  CHECK(X.column(*vi) == std::vector<std::uint8_t>{1});
  CHECK(X.row_features(0) == std::set<FeatureId>{X.vocab[0]});

  const std::string json = X.to_json();
  CHECK(json.find("\"vocab\"") != std::string::npos);
  CHECK(json.find("\"rows\"") != std::string::npos);
  CHECK(json.find(std::to_string(X.vocab[0])) != std::string::npos);
}

TEST_CASE("registry JSON round trip") {
  Rng rng(3);
  LabeledGraph g = random_graph(rng, 6, 2);
  SubgraphRegistry reg;
  featurize(g, 2, &reg);
  SubgraphRegistry back = SubgraphRegistry::from_json(reg.to_json());
  REQUIRE(back.entries().size() == reg.entries().size());
  for (const auto& [id, env] : reg.entries()) {
    REQUIRE(back.contains(id));
    CHECK(canonical_form_rooted(back.at(id).as_graph(), back.at(id).root) ==
          canonical_form_rooted(env.as_graph(), env.root));
  }
}

TEST_CASE("registry merge keeps first writer and unions entries") {
  LabeledGraph a;
  a.id = "a";
  a.nodes = {{"C", {}}};
  LabeledGraph b;
  b.id = "b";
  b.nodes = {{"N", {}}};
  SubgraphRegistry ra, rb;
  featurize(a, 0, &ra);
  featurize(b, 0, &rb);
  ra.merge(rb);
  CHECK(ra.entries().size() == 2);
  CHECK(ra.collisions().empty());
  CHECK_THROWS_AS(ra.at(999), GraphError);
}

TEST_CASE("fold: zero vector, single bit, collisions") {
  CHECK(fold({}, 64).bits == std::vector<std::uint8_t>(64, 0));

  FoldResult one = fold({5}, 1024);
  CHECK(one.bits[5] == 1);
  CHECK(std::count(one.bits.begin(), one.bits.end(), 1) == 1);
  CHECK(one.collisions.empty());

  FoldResult two = fold({5, 5 + 1024}, 1024);
  CHECK(std::count(two.bits.begin(), two.bits.end(), 1) == 1);
  REQUIRE(two.collisions.size() == 1);
  CHECK(two.collisions[0].first == 5);
  CHECK(two.collisions[0].second == 5 + 1024);

  CHECK_THROWS_AS(fold({1}, 100), GraphError);  // not a power of two
  CHECK_THROWS_AS(fold({1}, 32), GraphError);   // below minimum
}

TEST_CASE("feature_id_hex formatting") {
  CHECK(feature_id_hex(0) == "0x0000000000000000");
  CHECK(feature_id_hex(0xdeadbeefULL) == "0x00000000deadbeef");
}
