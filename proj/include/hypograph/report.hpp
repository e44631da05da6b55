#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypograph/graph.hpp"
#include "hypograph/hypothesis.hpp"

namespace hypograph {

struct HistogramLabels {
  std::string title;
  std::string x_label = "target";
  std::string series_true = "feature present";
  std::string series_false = "feature absent";
  std::string caption;
};

// Two overlaid semi-transparent histogram series; deterministic text output.
std::string render_histogram_svg(const HistogramPair& pair,
                                 const HistogramLabels& labels);

// Graphviz text for a rooted environment, canonical node order, root
// highlighted.
std::string render_subgraph_dot(const EnvironmentDescriptor& env);

struct RunManifest {
  std::map<std::string, std::string> config;        // flat key -> value
  std::map<std::string, std::string> input_digests; // path -> fnv64 hex
  std::string hash_version;
  std::string tool_version;
  std::map<std::string, double> timings_ms;

  std::string to_json() const;
};

// FNV-1a 64 over file bytes, hex string. Throws if unreadable.
std::string file_digest(const std::string& path);

}  // namespace hypograph
