#include "hypograph/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace hypograph {

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Increase: return "increase";
    case Direction::Decrease: return "decrease";
    case Direction::None: return "none";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += "\"\"";
    } else if (static_cast<unsigned char>(c) < 0x20) {
      // canonical strings carry control-byte markers; keep the CSV printable
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\x%02x", static_cast<unsigned char>(c));
      out += buf;
    } else {
      out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

EffectStats effect_strength(const std::vector<std::uint8_t>& column,
                            const std::vector<double>& y, double d_min) {
  if (column.size() != y.size() || y.size() < 2)
    throw GraphError("effect_strength: need matched column and >= 2 targets");
  EffectStats st;
  double sum1 = 0.0, sum0 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (column[i]) {
      ++st.n1;
      sum1 += y[i];
    } else {
      ++st.n0;
      sum0 += y[i];
    }
  }
  if (st.n1 == 0 || st.n0 == 0) {
    st.contrast = false;
    st.direction = Direction::None;
    return st;
  }
  st.mean1 = sum1 / static_cast<double>(st.n1);
  st.mean0 = sum0 / static_cast<double>(st.n0);
  st.s = st.mean1 - st.mean0;
  double ss1 = 0.0, ss0 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (column[i]) {
      const double d = y[i] - st.mean1;
      ss1 += d * d;
    } else {
      const double d = y[i] - st.mean0;
      ss0 += d * d;
    }
  }
  const std::size_t dof = st.n1 + st.n0 - 2;
  const double pooled_var = dof > 0 ? (ss1 + ss0) / static_cast<double>(dof) : 0.0;
  if (pooled_var > 0.0) {
    st.d = st.s / std::sqrt(pooled_var);
  } else {
    // no within-group spread: any nonzero mean difference is infinitely sharp
    st.d = (st.s > 0.0) ? 1e9 : (st.s < 0.0 ? -1e9 : 0.0);
  }
  if (std::fabs(st.d) < d_min)
    st.direction = Direction::None;
  else
    st.direction = (st.s > 0.0) ? Direction::Increase : Direction::Decrease;
  return st;
}

HistogramPair conditional_histogram(const std::vector<std::uint8_t>& column,
                                    const std::vector<double>& y, int bins) {
  if (bins < 2) throw GraphError("conditional_histogram: bins must be >= 2");
  if (column.size() != y.size() || y.empty())
    throw GraphError("conditional_histogram: column/target size mismatch");
  HistogramPair h;
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    h.degenerate = true;
    h.edges = {lo, hi};
    h.counts_true.assign(1, 0);
    h.counts_false.assign(1, 0);
    for (std::size_t i = 0; i < y.size(); ++i)
      (column[i] ? h.counts_true : h.counts_false)[0] += 1;
    return h;
  }
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b)
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
  h.edges.back() = hi;
  h.counts_true.assign(bins, 0);
  h.counts_false.assign(bins, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    int b = static_cast<int>((y[i] - lo) / (hi - lo) * bins);
    if (b >= bins) b = bins - 1;  // last bin right-closed
    if (b < 0) b = 0;
    (column[i] ? h.counts_true : h.counts_false)[b] += 1;
  }
  return h;
}

std::string Hypothesis::sentence(const std::string& property) const {
  const std::size_t n = stats.n1 + stats.n0;
  return "Feature " + feature_id_hex(feature) + " (" + subgraph_canonical +
         ") leads to " + direction_name(stats.direction) + " of " + property +
         " (s = " + fmt(stats.s) + ", d = " + fmt(stats.d) +
         ", support = " + std::to_string(stats.n1) + "/" + std::to_string(n) +
         ")";
}

std::size_t effective_support_min(std::size_t configured, std::size_t n) {
  if (configured > 0) return configured;
  return std::max<std::size_t>(5, n / 200);
}

std::vector<Hypothesis> generate_hypotheses(const BoostedEnsemble& ensemble,
                                            const FeatureMatrix& X,
                                            const std::vector<double>& y,
                                            const SubgraphRegistry& registry,
                                            const HypothesisConfig& config) {
  ImportanceTable table = importances(ensemble, X);
  const std::size_t support_min = effective_support_min(config.support_min, X.n());
  std::vector<Hypothesis> out;
  for (const auto& [id, importance] : table.ranked()) {
    if (out.size() >= config.top_k) break;
    auto vi = X.vocab_index(id);
    if (!vi) continue;
    std::vector<std::uint8_t> col = X.column(*vi);
    EffectStats st = effect_strength(col, y, config.d_min);
    if (st.n1 < support_min || st.n0 < support_min) continue;
    Hypothesis h;
    h.feature = id;
    h.importance = importance;
    h.stats = st;
    if (registry.contains(id)) {
      const EnvironmentDescriptor& env = registry.at(id);
      h.subgraph_canonical = canonical_form_rooted(
          env.as_graph(), env.root, std::max(64, (int)env.nodes.size()));
    }
    h.histogram = conditional_histogram(col, y, config.bins);
    out.push_back(std::move(h));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::string hypotheses_to_csv(const std::vector<Hypothesis>& list) {
  std::string out =
      "rank,feature_expr,subgraph_canonical,importance,s,d,n1,n0,mean1,mean0\n";
  for (const Hypothesis& h : list) {
    out += std::to_string(h.rank) + ',' + feature_id_hex(h.feature) + ',' +
           csv_quote(h.subgraph_canonical) + ',' + fmt(h.importance) + ',' +
           fmt(h.stats.s) + ',' + fmt(h.stats.d) + ',' +
           std::to_string(h.stats.n1) + ',' + std::to_string(h.stats.n0) + ',' +
           fmt(h.stats.mean1) + ',' + fmt(h.stats.mean0) + '\n';
  }
  return out;
}

std::string hypotheses_to_json(const std::vector<Hypothesis>& list,
                               const std::string& property) {
  nlohmann::ordered_json j;
  j["property"] = property;
  j["hash_version"] = kHashVersion;
  j["hypotheses"] = nlohmann::json::array();
  for (const Hypothesis& h : list) {
    nlohmann::ordered_json jh;
    jh["rank"] = h.rank;
    jh["feature"] = std::to_string(h.feature);
    jh["feature_hex"] = feature_id_hex(h.feature);
    jh["subgraph_canonical"] = h.subgraph_canonical;
    jh["importance"] = h.importance;
    jh["direction"] = direction_name(h.stats.direction);
    jh["s"] = h.stats.s;
    jh["d"] = h.stats.d;
    jh["n1"] = h.stats.n1;
    jh["n0"] = h.stats.n0;
    jh["mean1"] = h.stats.mean1;
    jh["mean0"] = h.stats.mean0;
    jh["sentence"] = h.sentence(property);
    jh["histogram"] = {{"edges", h.histogram.edges},
                       {"counts_true", h.histogram.counts_true},
                       {"counts_false", h.histogram.counts_false},
                       {"degenerate", h.histogram.degenerate}};
    j["hypotheses"].push_back(jh);
  }
  return j.dump(2);
}

}  // namespace hypograph
