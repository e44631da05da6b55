// hypograph command-line front end: synthesize datasets, featurize, train,
// mine hypotheses, search logical combinations, and verify them.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypograph/pipeline.hpp"
#include "hypograph/report.hpp"
#include "hypograph/rng.hpp"
#include "hypograph/synth.hpp"
#include "hypograph/verify.hpp"

namespace fs = std::filesystem;
using namespace hypograph;

namespace {

constexpr const char* kToolVersion = "hypograph 0.1.0";

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GraphError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw GraphError("short write to '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex_stem(FeatureId id) { return feature_id_hex(id).substr(2); }

struct Options {
  std::string data;
  std::string format = "jsonl";  // jsonl | mol
  std::string out;
  std::string config_file;
  int radius = 3;
  int stages = 200;
  double shrinkage = 0.1;
  int depth = 3;
  int min_leaf = 5;
  std::size_t top_k = 30;
  double d_min = 0.2;
  std::size_t support_min = 0;
  int bins = 40;
  std::size_t combine_k = 30;
  double gain_min = 0.1;
  std::string ops = "and,or,xor";
  std::uint64_t seed = 0;
  int threads = 1;
  double val_fraction = 0.1;
  std::string property = "y";
  // verification
  std::string oracle_cmd;
  std::string synth_spec;  // built-in oracle from a synthesis spec
  int attempts = 200;
  int max_hamming = 2;
  std::size_t min_pairs = 5;
  std::size_t verify_top = 5;
  // synth
  std::string spec_path;
  std::string ground_truth_path;
};

void add_pipeline_flags(CLI::App* sub, Options& o, bool needs_data = true) {
  auto* data =
      sub->add_option("--data", o.data, "input dataset (JSON lines)");
  if (needs_data) data->required()->check(CLI::ExistingFile);
  sub->add_option("--format", o.format, "dataset format: jsonl or mol")
      ->check(CLI::IsMember({"jsonl", "mol"}));
  sub->add_option("--out", o.out, "output directory")->required();
  sub->add_option("--radius", o.radius, "fingerprint radius")
      ->check(CLI::Range(0, 8));
  sub->add_option("--stages", o.stages, "boosting stages")
      ->check(CLI::PositiveNumber);
  sub->add_option("--shrinkage", o.shrinkage, "boosting shrinkage");
  sub->add_option("--depth", o.depth, "tree depth")->check(CLI::Range(1, 16));
  sub->add_option("--min-leaf", o.min_leaf, "minimum rows per leaf");
  sub->add_option("--top-k", o.top_k, "hypotheses reported");
  sub->add_option("--d-min", o.d_min, "direction cutoff on |d|");
  sub->add_option("--support-min", o.support_min,
                  "minimum samples on each side (0 = auto)");
  sub->add_option("--bins", o.bins, "histogram bins");
  sub->add_option("--combine-k", o.combine_k,
                  "candidate features for combination search");
  sub->add_option("--gain-min", o.gain_min, "minimum combination gain");
  sub->add_option("--ops", o.ops, "combination ops, comma list of and,or,xor");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--threads", o.threads, "worker threads (results identical)");
  sub->add_option("--val-fraction", o.val_fraction,
                  "held-out fraction, reported only");
  sub->add_option("--property", o.property, "target property name");
  sub->set_config("--config", "", "flat key=value config file");
}

void add_verify_flags(CLI::App* sub, Options& o) {
  sub->add_option("--oracle", o.oracle_cmd,
                  "external oracle command (graph JSON on stdin, number out)");
  sub->add_option("--synth-spec", o.synth_spec,
                  "synthesis spec for the built-in noiseless oracle")
      ->check(CLI::ExistingFile);
  sub->add_option("--attempts", o.attempts, "mutation attempts per sample");
  sub->add_option("--max-hamming", o.max_hamming,
                  "matched-pair Hamming tolerance");
  sub->add_option("--min-pairs", o.min_pairs,
                  "pairs needed before agreement is defined");
  sub->add_option("--verify-top", o.verify_top, "hypotheses to verify");
}

Dataset load_data(const Options& o) {
  Dataset ds = o.format == "mol" ? load_molecule_dataset(o.data)
                                 : load_jsonl_dataset(o.data);
  if (ds.samples.empty())
    throw GraphError("dataset '" + o.data + "' is empty");
  ds.validate();
  return ds;
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig pc;
  pc.radius = o.radius;
  pc.boost.stages = o.stages;
  pc.boost.shrinkage = o.shrinkage;
  pc.boost.max_depth = o.depth;
  pc.boost.min_leaf = o.min_leaf;
  pc.boost.seed = o.seed;
  pc.hypothesis.top_k = o.top_k;
  pc.hypothesis.d_min = o.d_min;
  pc.hypothesis.support_min = o.support_min;
  pc.hypothesis.bins = o.bins;
  pc.combine.k = o.combine_k;
  pc.combine.gain_min = o.gain_min;
  pc.combine.support_min = o.support_min;
  pc.combine.d_min = o.d_min;
  pc.combine.use_and = o.ops.find("and") != std::string::npos;
  pc.combine.use_or = o.ops.find("or") != std::string::npos;
  pc.combine.use_xor = o.ops.find("xor") != std::string::npos;
  pc.val_fraction = o.val_fraction;
  pc.property = o.property;
  pc.threads = o.threads;
  return pc;
}

RunManifest base_manifest(const Options& o, const std::string& subcommand) {
  RunManifest m;
  m.tool_version = kToolVersion;
  m.hash_version = kHashVersion;
  m.config = {{"subcommand", subcommand},
              {"format", o.format},
              {"radius", std::to_string(o.radius)},
              {"stages", std::to_string(o.stages)},
              {"shrinkage", num(o.shrinkage)},
              {"depth", std::to_string(o.depth)},
              {"min_leaf", std::to_string(o.min_leaf)},
              {"top_k", std::to_string(o.top_k)},
              {"d_min", num(o.d_min)},
              {"support_min", std::to_string(o.support_min)},
              {"bins", std::to_string(o.bins)},
              {"combine_k", std::to_string(o.combine_k)},
              {"gain_min", num(o.gain_min)},
              {"ops", o.ops},
              {"seed", std::to_string(o.seed)},
              {"threads", std::to_string(o.threads)},
              {"val_fraction", num(o.val_fraction)},
              {"property", o.property}};
  if (!o.data.empty()) {
    m.config["data"] = o.data;
    m.input_digests[o.data] = file_digest(o.data);
  }
  return m;
}

// ---- artifact writers ------------------------------------------------------

void write_model(const fs::path& dir, const PipelineResult& r) {
  write_file(dir / "model.json", r.ensemble.to_json());
}

void write_features(const fs::path& dir, const PipelineResult& r) {
  write_file(dir / "features.json", r.matrix.to_json());
  write_file(dir / "registry.json", r.registry.to_json());
}

void write_hypotheses(const fs::path& dir, const PipelineResult& r,
                      const Options& o) {
  write_file(dir / "hypotheses.csv", hypotheses_to_csv(r.hypotheses));
  write_file(dir / "hypotheses.json",
             hypotheses_to_json(r.hypotheses, o.property));
  for (const Hypothesis& h : r.hypotheses) {
    HistogramLabels labels;
    labels.title = "Feature " + feature_id_hex(h.feature);
    labels.x_label = o.property;
    labels.caption = h.sentence(o.property).substr(0, 200);
    write_file(dir / ("hist_" + hex_stem(h.feature) + ".svg"),
               render_histogram_svg(h.histogram, labels));
    if (r.registry.contains(h.feature))
      write_file(dir / ("motif_" + hex_stem(h.feature) + ".dot"),
                 render_subgraph_dot(r.registry.at(h.feature)));
  }
}

void write_combined(const fs::path& dir, const PipelineResult& r) {
  write_file(dir / "combined_hypotheses.csv",
             macro_features_to_csv(r.macro_features));
}

// Distinct node/edge labels seen in the dataset; the mutation alphabet when
// no synthesis spec supplies one.
void observed_alphabets(const Dataset& ds, std::vector<NodeLabel>& nodes,
                        std::vector<EdgeLabel>& edges) {
  std::set<NodeLabel> ns;
  std::set<EdgeLabel> es;
  for (const Sample& s : ds.samples) {
    for (const NodeLabel& nl : s.graph.nodes) ns.insert(nl);
    for (const Edge& e : s.graph.edges) es.insert(e.label);
  }
  nodes.assign(ns.begin(), ns.end());
  edges.assign(es.begin(), es.end());
}

nlohmann::ordered_json verify_hypotheses(const Dataset& ds,
                                         const PipelineResult& r,
                                         const Options& o) {
  if (o.oracle_cmd.empty() && o.synth_spec.empty())
    throw CLI::ValidationError(
        "verify", "one of --oracle or --synth-spec is required");

  Oracle oracle;
  std::vector<NodeLabel> node_alpha;
  std::vector<EdgeLabel> edge_alpha;
  if (!o.synth_spec.empty()) {
    const SynthSpec spec = SynthSpec::from_json(read_file(o.synth_spec));
    oracle = synth_oracle(spec.rules, spec.baseline);
    for (const std::string& k : spec.node_alphabet)
      node_alpha.push_back({k, {}});
    for (const std::string& k : spec.edge_alphabet) edge_alpha.push_back({k});
  } else {
    oracle = external_oracle(o.oracle_cmd);
  }
  if (node_alpha.empty()) observed_alphabets(ds, node_alpha, edge_alpha);

  std::vector<const Hypothesis*> targets;
  for (const Hypothesis& h : r.hypotheses) {
    if (h.stats.direction == Direction::None) continue;
    if (targets.size() >= o.verify_top) break;
    targets.push_back(&h);
  }
  std::vector<FeatureId> guard;
  for (const Hypothesis* h : targets) guard.push_back(h->feature);

  nlohmann::ordered_json out;
  out["tool_version"] = kToolVersion;
  out["hash_version"] = kHashVersion;
  out["results"] = nlohmann::json::array();
  for (const Hypothesis* h : targets) {
    MutationConfig mc;
    mc.attempts_per_sample = o.attempts;
    mc.seed = mix_seed(o.seed, h->feature);
    mc.radius = o.radius;
    mc.min_pairs = o.min_pairs;
    mc.mutation = MutationSpec::all_kinds(node_alpha, edge_alpha);
    mc.guard = guard;
    mc.hypothesis_direction = h->stats.direction;
    VerificationReport mut = mutation_test(ds, h->feature, oracle, mc);

    MatchedPairConfig pc;
    pc.max_hamming = o.max_hamming;
    pc.min_pairs = o.min_pairs;
    pc.hypothesis_direction = h->stats.direction;
    VerificationReport mp = matched_pairs(ds, r.matrix, h->feature, pc);

    nlohmann::ordered_json jr;
    jr["feature"] = std::to_string(h->feature);
    jr["feature_hex"] = feature_id_hex(h->feature);
    jr["direction"] = direction_name(h->stats.direction);
    jr["s"] = h->stats.s;
    jr["sentence"] = h->sentence(o.property);
    jr["mutation"] = nlohmann::ordered_json::parse(mut.to_json());
    jr["matched_pair"] = nlohmann::ordered_json::parse(mp.to_json());
    out["results"].push_back(jr);
  }
  return out;
}

// ---- subcommand bodies -----------------------------------------------------

int cmd_synth(const Options& o) {
  const Timer total;
  const SynthSpec spec = SynthSpec::from_json(read_file(o.spec_path));
  auto [ds, truth] = gen_dataset(spec);

  const fs::path out_path(o.out);
  if (out_path.has_parent_path())
    fs::create_directories(out_path.parent_path());
  save_jsonl_dataset(ds, out_path.string());
  const fs::path dir =
      out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
  const fs::path truth_path = o.ground_truth_path.empty()
                                  ? dir / "ground_truth.json"
                                  : fs::path(o.ground_truth_path);
  write_file(truth_path, truth.to_json());

  RunManifest m;
  m.tool_version = kToolVersion;
  m.hash_version = kHashVersion;
  m.config = {{"subcommand", "synth"},
              {"spec", o.spec_path},
              {"out", o.out},
              {"n", std::to_string(spec.n)},
              {"seed", std::to_string(spec.seed)}};
  m.input_digests[o.spec_path] = file_digest(o.spec_path);
  m.timings_ms["total"] = total.ms();
  write_file(out_path.string() + ".manifest.json", m.to_json());
  std::cerr << "synth: wrote " << ds.samples.size() << " graphs to " << o.out
            << "\n";
  return 0;
}

int cmd_pipeline(const Options& o, const std::string& subcommand) {
  const Timer total;
  RunManifest m = base_manifest(o, subcommand);

  Timer phase;
  const Dataset ds = load_data(o);
  m.timings_ms["load"] = phase.ms();

  phase = Timer();
  const PipelineResult r = run_pipeline(ds, pipeline_config(o));
  m.timings_ms["pipeline"] = phase.ms();
  m.config["n_samples"] = std::to_string(ds.samples.size());
  m.config["n_features"] = std::to_string(r.matrix.vocab.size());
  m.config["n_train"] = std::to_string(r.n_train);
  m.config["n_val"] = std::to_string(r.n_val);
  m.config["model_train_mse"] = num(r.train_mse);
  m.config["model_val_mse"] = num(r.val_mse);

  const fs::path dir(o.out);
  fs::create_directories(dir);

  phase = Timer();
  const bool all = subcommand == "run";
  if (all || subcommand == "featurize") write_features(dir, r);
  if (all || subcommand == "train") write_model(dir, r);
  if (all || subcommand == "hypotheses") write_hypotheses(dir, r, o);
  if (all || subcommand == "combine") write_combined(dir, r);
  if (subcommand == "verify" || (all && (!o.oracle_cmd.empty() ||
                                         !o.synth_spec.empty()))) {
    nlohmann::ordered_json v = verify_hypotheses(ds, r, o);
    if (!o.synth_spec.empty())
      m.input_digests[o.synth_spec] = file_digest(o.synth_spec);
    write_file(dir / "verification.json", v.dump(2));
  }
  m.timings_ms["write"] = phase.ms();
  m.timings_ms["total"] = total.ms();
  write_file(dir / "manifest.json", m.to_json());
  std::cerr << subcommand << ": " << ds.samples.size() << " samples, "
            << r.matrix.vocab.size() << " features, "
            << r.hypotheses.size() << " hypotheses -> " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mine human-readable subgraph hypotheses from labeled graphs"};
  app.require_subcommand(1);
  Options o;

  CLI::App* synth = app.add_subcommand("synth", "generate a planted dataset");
  synth->add_option("--spec", o.spec_path, "synthesis spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", o.out, "output dataset path (JSON lines)")
      ->required();
  synth->add_option("--ground-truth", o.ground_truth_path,
                    "ground truth output path");
  synth->set_config("--config", "", "flat key=value config file");

  CLI::App* featurize =
      app.add_subcommand("featurize", "fingerprint a dataset");
  CLI::App* train = app.add_subcommand("train", "fit the boosted ensemble");
  CLI::App* hypotheses =
      app.add_subcommand("hypotheses", "rank single-feature hypotheses");
  CLI::App* combine =
      app.add_subcommand("combine", "search logical feature combinations");
  CLI::App* verify =
      app.add_subcommand("verify", "verify hypotheses against an oracle");
  CLI::App* run = app.add_subcommand("run", "full pipeline");
  for (CLI::App* sub : {featurize, train, hypotheses, combine, verify, run})
    add_pipeline_flags(sub, o);
  add_verify_flags(verify, o);
  add_verify_flags(run, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(o);
    for (CLI::App* sub : {featurize, train, hypotheses, combine, verify, run})
      if (sub->parsed()) return cmd_pipeline(o, sub->get_name());
    return 1;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
