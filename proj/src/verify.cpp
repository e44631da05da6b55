#include "hypograph/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unistd.h>

#include <json.hpp>

#include "hypograph/rng.hpp"

namespace hypograph {

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["feature"] = std::to_string(feature);
  j["feature_hex"] = feature_id_hex(feature);
  j["protocol"] = protocol;
  j["pair_count"] = pair_count;
  j["paired_effect"] = paired_effect;
  j["agreement"] = agreement;
  j["agreement_defined"] = agreement_defined;
  j["samples_tried"] = samples_tried;
  j["oracle_failures"] = oracle_failures;
  j["pairs"] = nlohmann::json::array();
  for (const PairRecord& p : pairs) {
    nlohmann::ordered_json jp;
    jp["sample_id"] = p.sample_id;
    if (!p.partner_id.empty()) jp["partner_id"] = p.partner_id;
    jp["y_with"] = p.y_with;
    jp["y_without"] = p.y_without;
    jp["distance"] = p.distance;
    jp["ok"] = p.ok;
    if (!p.error.empty()) jp["error"] = p.error;
    j["pairs"].push_back(jp);
  }
  return j.dump(2);
}

namespace {

void finalize(VerificationReport& report, Direction want,
              std::size_t min_pairs) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const PairRecord& p : report.pairs) {
    if (!p.ok) continue;
    sum += p.y_with - p.y_without;
    ++count;
  }
  report.pair_count = count;
  report.paired_effect = count > 0 ? sum / static_cast<double>(count) : 0.0;
  report.agreement_defined = count >= min_pairs;
  if (report.agreement_defined) {
    switch (want) {
      case Direction::Increase: report.agreement = report.paired_effect > 0.0; break;
      case Direction::Decrease: report.agreement = report.paired_effect < 0.0; break;
      case Direction::None: report.agreement = false; break;
    }
  }
}

bool has_id(const std::vector<FeatureId>& feats, FeatureId id) {
  return std::binary_search(feats.begin(), feats.end(), id);
}

}  // namespace

VerificationReport mutation_test(const Dataset& ds, FeatureId feature,
                                 const Oracle& oracle,
                                 const MutationConfig& config) {
  VerificationReport report;
  report.feature = feature;
  report.protocol = "mutation";
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const LabeledGraph& g = ds.samples[i].graph;
    ++report.samples_tried;
    const std::vector<FeatureId> orig = featurize(g, config.radius);
    const bool had = has_id(orig, feature);
    const std::uint64_t sample_seed = mix_seed(config.seed, i);
    for (int attempt = 0; attempt < config.attempts_per_sample; ++attempt) {
      LabeledGraph mut;
      try {
        mut = mutate(g, mix_seed(sample_seed, attempt), config.mutation);
      } catch (const MutationError&) {
        break;  // no legal edits at all for this sample
      }
      const std::vector<FeatureId> mut_feats = featurize(mut, config.radius);
      if (has_id(mut_feats, feature) == had) continue;
      bool guards_ok = true;
      for (FeatureId guard : config.guard) {
        if (guard == feature) continue;
        if (has_id(orig, guard) != has_id(mut_feats, guard)) {
          guards_ok = false;
          break;
        }
      }
      if (!guards_ok) continue;
      PairRecord pr;
      pr.sample_id = g.id;
      pr.distance = 1;
      try {
        const double y_orig = oracle(g);
        const double y_mut = oracle(mut);
        pr.y_with = had ? y_orig : y_mut;
        pr.y_without = had ? y_mut : y_orig;
      } catch (const std::exception& e) {
        pr.ok = false;
        pr.error = e.what();
        ++report.oracle_failures;
      }
      report.pairs.push_back(std::move(pr));
      break;
    }
  }
  finalize(report, config.hypothesis_direction, config.min_pairs);
  return report;
}

namespace {

// Symmetric-difference size of two sorted index rows, ignoring `skip`.
int row_distance(const std::vector<std::uint32_t>& a,
                 const std::vector<std::uint32_t>& b, std::uint32_t skip) {
  int dist = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      if (a[i] != skip) ++dist;
      ++i;
    } else {
      if (b[j] != skip) ++dist;
      ++j;
    }
  }
  for (; i < a.size(); ++i)
    if (a[i] != skip) ++dist;
  for (; j < b.size(); ++j)
    if (b[j] != skip) ++dist;
  return dist;
}

}  // namespace

VerificationReport matched_pairs(const Dataset& ds, const FeatureMatrix& X,
                                 FeatureId feature,
                                 const MatchedPairConfig& config) {
  if (ds.samples.size() != X.n())
    throw GraphError("matched_pairs: dataset and matrix size mismatch");
  VerificationReport report;
  report.feature = feature;
  report.protocol = "matched-pair";
  report.samples_tried = ds.samples.size();
  auto vi = X.vocab_index(feature);
  if (!vi) {
    finalize(report, config.hypothesis_direction, config.min_pairs);
    return report;
  }
  std::vector<std::size_t> with, without;
  for (std::size_t i = 0; i < X.n(); ++i)
    (X.present(i, *vi) ? with : without).push_back(i);

  struct Candidate {
    int dist;
    std::size_t i;  // feature present
    std::size_t j;  // feature absent
  };
  std::vector<Candidate> cands;
  for (std::size_t i : with)
    for (std::size_t j : without) {
      const int d = row_distance(X.rows[i], X.rows[j], *vi);
      if (d <= config.max_hamming) cands.push_back({d, i, j});
    }
  std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    const auto& ida = ds.samples[a.i].graph.id;
    const auto& idb = ds.samples[b.i].graph.id;
    if (ida != idb) return ida < idb;
    return ds.samples[a.j].graph.id < ds.samples[b.j].graph.id;
  });
  std::vector<char> used(ds.samples.size(), 0);
  for (const Candidate& c : cands) {
    if (used[c.i] || used[c.j]) continue;
    used[c.i] = used[c.j] = 1;
    PairRecord pr;
    pr.sample_id = ds.samples[c.i].graph.id;
    pr.partner_id = ds.samples[c.j].graph.id;
    pr.y_with = ds.samples[c.i].y;
    pr.y_without = ds.samples[c.j].y;
    pr.distance = c.dist;
    report.pairs.push_back(std::move(pr));
  }
  finalize(report, config.hypothesis_direction, config.min_pairs);
  return report;
}

Oracle external_oracle(const std::string& command) {
  return [command](const LabeledGraph& g) -> double {
    char tmpl[] = "/tmp/hypograph_oracle_XXXXXX";
    const int fd = mkstemp(tmpl);
    if (fd < 0) throw GraphError("oracle: cannot create temp file");
    const std::string payload = graph_to_jsonl(g, std::nullopt) + "\n";
    const ssize_t written = write(fd, payload.data(), payload.size());
    close(fd);
    if (written != static_cast<ssize_t>(payload.size())) {
      unlink(tmpl);
      throw GraphError("oracle: short write to temp file");
    }
    const std::string full = "( " + command + " ) < " + tmpl;
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) {
      unlink(tmpl);
      throw GraphError("oracle: cannot spawn '" + command + "'");
    }
    char buf[256];
    std::string out;
    while (fgets(buf, sizeof(buf), pipe)) out += buf;
    const int status = pclose(pipe);
    unlink(tmpl);
    if (status != 0)
      throw GraphError("oracle: '" + command + "' exited with status " +
                       std::to_string(status));
    try {
      return std::stod(out);
    } catch (const std::exception&) {
      throw GraphError("oracle: '" + command + "' produced no number: '" + out +
                       "'");
    }
  };
}

Oracle synth_oracle(std::vector<PlantedRule> rules, double baseline) {
  return [rules = std::move(rules), baseline](const LabeledGraph& g) {
    return oracle_eval(g, rules, baseline);
  };
}

}  // namespace hypograph
