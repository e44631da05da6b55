#include "hypograph/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace hypograph {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_histogram_svg(const HistogramPair& pair,
                                 const HistogramLabels& labels) {
  const int width = 640, height = 400;
  const int left = 60, right = 20, top = 40, bottom = 60;
  const int plot_w = width - left - right;
  const int plot_h = height - top - bottom;
  const std::size_t bins = pair.counts_true.size();

  std::size_t n1 = 0, n0 = 0, peak = 1;
  for (std::size_t b = 0; b < bins; ++b) {
    n1 += pair.counts_true[b];
    n0 += pair.counts_false[b];
    peak = std::max({peak, pair.counts_true[b], pair.counts_false[b]});
  }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!labels.title.empty())
    svg += "<text x=\"" + std::to_string(width / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           xml_escape(labels.title) + "</text>\n";

  auto bar = [&](std::size_t b, std::size_t count, const char* color) {
    if (count == 0) return;
    const double x = left + plot_w * static_cast<double>(b) / bins;
    const double w = static_cast<double>(plot_w) / bins;
    const double h = plot_h * static_cast<double>(count) / peak;
    svg += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(top + plot_h - h) +
           "\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"" +
           color + "\" fill-opacity=\"0.5\"/>\n";
  };
  for (std::size_t b = 0; b < bins; ++b) bar(b, pair.counts_false[b], "#4477aa");
  for (std::size_t b = 0; b < bins; ++b) bar(b, pair.counts_true[b], "#ee6677");

  // axes
  svg += "<line x1=\"" + std::to_string(left) + "\" y1=\"" +
         std::to_string(top + plot_h) + "\" x2=\"" +
         std::to_string(left + plot_w) + "\" y2=\"" +
         std::to_string(top + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + std::to_string(left) + "\" y1=\"" +
         std::to_string(top) + "\" x2=\"" + std::to_string(left) +
         "\" y2=\"" + std::to_string(top + plot_h) + "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int t = 0; t <= ticks; ++t) {
    const double frac = static_cast<double>(t) / ticks;
    const double x = left + plot_w * frac;
    const double value =
        pair.edges.front() + (pair.edges.back() - pair.edges.front()) * frac;
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + std::to_string(top + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           fmt(value) + "</text>\n";
    const double count = peak * frac;
    svg += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" +
           fmt(top + plot_h - plot_h * frac + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           fmt(count) + "</text>\n";
  }
  svg += "<text x=\"" + std::to_string(left + plot_w / 2) + "\" y=\"" +
         std::to_string(height - 24) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" +
         xml_escape(labels.x_label) + "</text>\n";

  // legend
  svg += "<rect x=\"" + std::to_string(left + 8) + "\" y=\"" +
         std::to_string(top + 6) +
         "\" width=\"12\" height=\"12\" fill=\"#ee6677\" "
         "fill-opacity=\"0.5\"/>\n";
  svg += "<text x=\"" + std::to_string(left + 24) + "\" y=\"" +
         std::to_string(top + 16) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" +
         xml_escape(labels.series_true) + " (n1=" + std::to_string(n1) +
         ")</text>\n";
  svg += "<rect x=\"" + std::to_string(left + 8) + "\" y=\"" +
         std::to_string(top + 24) +
         "\" width=\"12\" height=\"12\" fill=\"#4477aa\" "
         "fill-opacity=\"0.5\"/>\n";
  svg += "<text x=\"" + std::to_string(left + 24) + "\" y=\"" +
         std::to_string(top + 34) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" +
         xml_escape(labels.series_false) + " (n0=" + std::to_string(n0) +
         ")</text>\n";

  std::string caption = labels.caption;
  if (pair.degenerate) {
    if (!caption.empty()) caption += " ";
    caption += "[degenerate: all targets equal, single bin]";
  }
  if (!caption.empty())
    svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" +
           std::to_string(height - 8) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           xml_escape(caption) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::string render_subgraph_dot(const EnvironmentDescriptor& env) {
  const LabeledGraph g = env.as_graph();
  std::vector<int> order =
      g.node_count() > 0
          ? canonical_order(g, std::max(64, g.node_count()))
          : std::vector<int>{};
  // position -> original index
  std::vector<int> by_pos(g.node_count());
  for (int v = 0; v < g.node_count(); ++v) by_pos[order[v]] = v;

  std::string dot = "graph environment {\n";
  dot += "  // radius " + std::to_string(env.radius) + "\n";
  for (int p = 0; p < g.node_count(); ++p) {
    const int v = by_pos[p];
    std::string label = g.nodes[v].kind;
    for (const auto& [k, val] : g.nodes[v].attrs)
      label += "\\n" + k + "=" + val;
    dot += "  n" + std::to_string(p) + " [label=\"" + label + "\"";
    if (v == env.root) dot += ", penwidth=3, color=red";
    dot += "];\n";
  }
  std::vector<std::string> edge_lines;
  for (const Edge& e : g.edges) {
    int a = order[e.u], b = order[e.v];
    if (a > b) std::swap(a, b);
    edge_lines.push_back("  n" + std::to_string(a) + " -- n" +
                         std::to_string(b) + " [label=\"" + e.label.kind +
                         "\"];\n");
  }
  std::sort(edge_lines.begin(), edge_lines.end());
  for (const std::string& line : edge_lines) dot += line;
  dot += "}\n";
  return dot;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool_version"] = tool_version;
  j["hash_version"] = hash_version;
  nlohmann::ordered_json jc;
  for (const auto& [k, v] : config) jc[k] = v;
  j["config"] = jc;
  nlohmann::ordered_json jd;
  for (const auto& [k, v] : input_digests) jd[k] = v;
  j["input_digests"] = jd;
  nlohmann::ordered_json jt;
  for (const auto& [k, v] : timings_ms) jt[k] = v;
  j["timings_ms"] = jt;
  return j.dump(2);
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot read file for digest: '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[32];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace hypograph
