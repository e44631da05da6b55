#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "hypograph/report.hpp"
#include "hypograph/synth.hpp"

using namespace hypograph;

namespace {

HistogramPair sample_pair() {
  HistogramPair p;
  p.edges = {0.0, 0.5, 1.0, 1.5, 2.0};
  p.counts_true = {0, 1, 3, 2};
  p.counts_false = {4, 2, 0, 0};
  return p;
}

}  // namespace

TEST_CASE("histogram SVG structure and legend counts") {
  HistogramLabels labels;
  labels.title = "feature 0x12 vs y";
  labels.caption = "s = 1.5 & d > 1";
  const std::string svg = render_histogram_svg(sample_pair(), labels);
  CHECK(svg.rfind("<svg xmlns=", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("feature 0x12 vs y") != std::string::npos);
  CHECK(svg.find("(n1=6)") != std::string::npos);
  CHECK(svg.find("(n0=6)") != std::string::npos);
  CHECK(svg.find("feature present") != std::string::npos);
  CHECK(svg.find("feature absent") != std::string::npos);
  // caption is XML-escaped
  CHECK(svg.find("s = 1.5 &amp; d &gt; 1") != std::string::npos);
  // one red and one blue legend swatch plus the data bars
  CHECK(svg.find("#ee6677") != std::string::npos);
  CHECK(svg.find("#4477aa") != std::string::npos);
  // empty bins draw nothing: counts_true has one zero bin -> 3 red data bars
  std::size_t red = 0;
  for (std::size_t pos = svg.find("#ee6677"); pos != std::string::npos;
       pos = svg.find("#ee6677", pos + 1))
    ++red;
  CHECK(red == 4);  // 3 bars + legend swatch
}

TEST_CASE("histogram SVG flags degenerate distributions") {
  HistogramPair p;
  p.edges = {2.0, 2.0};
  p.counts_true = {3};
  p.counts_false = {2};
  p.degenerate = true;
  const std::string svg = render_histogram_svg(p, HistogramLabels{});
  CHECK(svg.find("[degenerate: all targets equal, single bin]") !=
        std::string::npos);
}

TEST_CASE("histogram SVG is deterministic") {
  HistogramLabels labels;
  labels.title = "t";
  CHECK(render_histogram_svg(sample_pair(), labels) ==
        render_histogram_svg(sample_pair(), labels));
}

TEST_CASE("DOT: single node environment") {
  EnvironmentDescriptor env;
  env.nodes = {{"C", {{"charge", "-1"}}}};
  env.radius = 0;
  env.root = 0;
  const std::string dot = render_subgraph_dot(env);
  CHECK(dot.rfind("graph environment {", 0) == 0);
  CHECK(dot.find("// radius 0") != std::string::npos);
  CHECK(dot.find("n0 [label=\"C\\ncharge=-1\", penwidth=3, color=red];") !=
        std::string::npos);
  CHECK(dot.find("--") == std::string::npos);
  CHECK(dot.back() == '\n');
}

TEST_CASE("DOT: carbonyl edge and root highlight") {
  EnvironmentDescriptor env;
  env.nodes = {{"C", {}}, {"O", {}}};
  env.edges = {{0, 1, {"double"}}};
  env.radius = 1;
  env.root = 0;
  const std::string dot = render_subgraph_dot(env);
  CHECK(dot.find("[label=\"double\"];") != std::string::npos);
  // exactly one node carries the root highlight, and it is the C
  const std::size_t mark = dot.find("penwidth=3, color=red");
  REQUIRE(mark != std::string::npos);
  CHECK(dot.find("penwidth=3", mark + 1) == std::string::npos);
  const std::size_t line_start = dot.rfind('\n', mark) + 1;
  CHECK(dot.substr(line_start, mark - line_start).find("label=\"C\"") !=
        std::string::npos);
}

TEST_CASE("DOT output is invariant to input node order") {
  EnvironmentDescriptor a;
  a.nodes = {{"C", {}}, {"O", {}}, {"N", {}}};
  a.edges = {{0, 1, {"e"}}, {0, 2, {"e"}}};
  a.radius = 1;
  a.root = 0;
  EnvironmentDescriptor b;
  b.nodes = {{"N", {}}, {"C", {}}, {"O", {}}};
  b.edges = {{1, 0, {"e"}}, {1, 2, {"e"}}};
  b.radius = 1;
  b.root = 1;
  CHECK(render_subgraph_dot(a) == render_subgraph_dot(b));
}

TEST_CASE("RunManifest JSON layout") {
  RunManifest m;
  m.tool_version = "hypograph 0.1.0";
  m.hash_version = kHashVersion;
  m.config["radius"] = "3";
  m.config["seed"] = "42";
  m.input_digests["data.jsonl"] = "00deadbeef001234";
  m.timings_ms["featurize"] = 12.5;
  const std::string j = m.to_json();
  CHECK(j.find("\"tool_version\": \"hypograph 0.1.0\"") != std::string::npos);
  CHECK(j.find("\"hash_version\": \"" + std::string(kHashVersion) + "\"") !=
        std::string::npos);
  CHECK(j.find("\"radius\": \"3\"") != std::string::npos);
  CHECK(j.find("\"data.jsonl\": \"00deadbeef001234\"") != std::string::npos);
  CHECK(j.find("\"featurize\": 12.5") != std::string::npos);
  CHECK(m.to_json() == j);
}

TEST_CASE("file_digest is stable and content-sensitive") {
  const std::string path = "digest_test.tmp";
  {
    std::ofstream out(path, std::ios::binary);
    out << "hello";
  }
  const std::string d1 = file_digest(path);
  CHECK(d1.size() == 16);
  CHECK(d1 == file_digest(path));
  // FNV-1a 64 of "hello" is a published reference value
  CHECK(d1 == "a430d84680aabd0b");
  {
    std::ofstream out(path, std::ios::binary);
    out << "hello!";
  }
  CHECK(file_digest(path) != d1);
  std::remove(path.c_str());
  CHECK_THROWS_AS(file_digest(path), GraphError);
}
