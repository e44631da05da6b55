#include "hypograph/gbrt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "hypograph/rng.hpp"

namespace hypograph {

namespace {

int walk(const Tree& tree, const FeatureMatrix& X, std::size_t row) {
  int idx = 0;
  while (tree.nodes[idx].feature_index >= 0) {
    const TreeNode& node = tree.nodes[idx];
    auto vi = X.vocab_index(node.feature);
    const bool present = vi && X.present(row, *vi);
    idx = present ? node.right : node.left;
  }
  return idx;
}

}  // namespace

double Tree::predict_row(const FeatureMatrix& X, std::size_t row) const {
  if (nodes.empty()) return 0.0;
  return nodes[walk(*this, X, row)].value;
}

double Tree::predict(const std::set<FeatureId>& features) const {
  if (nodes.empty()) return 0.0;
  int idx = 0;
  while (nodes[idx].feature_index >= 0) {
    const TreeNode& node = nodes[idx];
    idx = features.count(node.feature) ? node.right : node.left;
  }
  return nodes[idx].value;
}

double BoostedEnsemble::predict_row(const FeatureMatrix& X,
                                    std::size_t row) const {
  double out = c0;
  for (const Stage& st : stages) out += st.shrinkage * st.tree.predict_row(X, row);
  return out;
}

double BoostedEnsemble::predict(const std::set<FeatureId>& features) const {
  double out = c0;
  for (const Stage& st : stages) out += st.shrinkage * st.tree.predict(features);
  return out;
}

namespace {

struct SplitWorkspace {
  std::vector<std::size_t> count;
  std::vector<double> sum;
  std::vector<std::uint32_t> touched;
};

struct TreeBuilder {
  const FeatureMatrix& X;
  const std::vector<double>& residuals;
  int max_depth;
  int min_leaf;
  const std::vector<std::uint8_t>* feature_mask;
  SplitWorkspace& ws;
  Tree tree;

  int build(std::vector<std::size_t>& rows, int depth) {
    const std::size_t n = rows.size();
    double total = 0.0;
    for (std::size_t r : rows) total += residuals[r];

    const int self = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[self].n_node = n;
    tree.nodes[self].value = (n > 0) ? total / static_cast<double>(n) : 0.0;
    if (depth >= max_depth || n < 2 * static_cast<std::size_t>(min_leaf))
      return self;

    for (std::size_t r : rows) {
      for (std::uint32_t idx : X.rows[r]) {
        if (feature_mask && !(*feature_mask)[idx]) continue;
        if (ws.count[idx] == 0) ws.touched.push_back(idx);
        ++ws.count[idx];
        ws.sum[idx] += residuals[r];
      }
    }

    double best_gain = 0.0;
    std::uint32_t best_idx = 0;
    bool found = false;
    const double parent_score = total * total / static_cast<double>(n);
    for (std::uint32_t idx : ws.touched) {
      const std::size_t n1 = ws.count[idx];
      const std::size_t n0 = n - n1;
      if (n1 < static_cast<std::size_t>(min_leaf) ||
          n0 < static_cast<std::size_t>(min_leaf))
        continue;
      const double s1 = ws.sum[idx];
      const double s0 = total - s1;
      const double gain = s1 * s1 / static_cast<double>(n1) +
                          s0 * s0 / static_cast<double>(n0) - parent_score;
      if (gain <= 1e-12) continue;
      if (!found || gain > best_gain ||
          (gain == best_gain && X.vocab[idx] < X.vocab[best_idx])) {
        found = true;
        best_gain = gain;
        best_idx = idx;
      }
    }
    for (std::uint32_t idx : ws.touched) {
      ws.count[idx] = 0;
      ws.sum[idx] = 0.0;
    }
    ws.touched.clear();
    if (!found) return self;

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(n);
    right_rows.reserve(n);
    for (std::size_t r : rows) {
      if (X.present(r, best_idx))
        right_rows.push_back(r);
      else
        left_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[self].feature_index = static_cast<int>(best_idx);
    tree.nodes[self].feature = X.vocab[best_idx];
    tree.nodes[self].gain = best_gain;
    const int left = build(left_rows, depth + 1);
    tree.nodes[self].left = left;
    const int right = build(right_rows, depth + 1);
    tree.nodes[self].right = right;
    return self;
  }
};

}  // namespace

Tree fit_tree(const FeatureMatrix& X, const std::vector<std::size_t>& row_index,
              const std::vector<double>& residuals, int max_depth, int min_leaf,
              const std::vector<std::uint8_t>* feature_mask) {
  if (row_index.empty()) throw GraphError("fit_tree: no rows");
  SplitWorkspace ws;
  ws.count.assign(X.vocab.size(), 0);
  ws.sum.assign(X.vocab.size(), 0.0);
  TreeBuilder builder{X, residuals, max_depth, std::max(1, min_leaf),
                      feature_mask, ws, {}};
  std::vector<std::size_t> rows = row_index;
  builder.build(rows, 0);
  return std::move(builder.tree);
}

BoostedEnsemble fit_ensemble(const FeatureMatrix& X,
                             const std::vector<double>& y,
                             const BoostConfig& config) {
  const std::size_t n = X.n();
  if (n < 2 || y.size() != n)
    throw GraphError("fit_ensemble: need at least 2 samples with targets");
  BoostedEnsemble e;
  e.config = config;
  double total = 0.0;
  for (double v : y) total += v;
  e.c0 = total / static_cast<double>(n);

  std::vector<double> pred(n, e.c0);
  std::vector<double> residuals(n);
  auto mse = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - pred[i];
      s += d * d;
    }
    return s / static_cast<double>(n);
  };
  e.train_mse.push_back(mse());

  Rng rng(config.seed);
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  for (int m = 0; m < config.stages; ++m) {
    for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - pred[i];

    std::vector<std::size_t> rows;
    if (config.row_subsample < 1.0) {
      const std::size_t want = std::max<std::size_t>(
          2, static_cast<std::size_t>(config.row_subsample * n));
      std::vector<std::size_t> pool = all_rows;
      for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
      }
      pool.resize(want);
      std::sort(pool.begin(), pool.end());
      rows = std::move(pool);
    } else {
      rows = all_rows;
    }

    std::vector<std::uint8_t> mask;
    const std::vector<std::uint8_t>* mask_ptr = nullptr;
    if (config.col_subsample < 1.0) {
      mask.assign(X.vocab.size(), 0);
      for (std::size_t i = 0; i < X.vocab.size(); ++i)
        if (rng.uniform() < config.col_subsample) mask[i] = 1;
      mask_ptr = &mask;
    }

    Tree tree = fit_tree(X, rows, residuals, config.max_depth, config.min_leaf,
                         mask_ptr);
    for (std::size_t i = 0; i < n; ++i)
      pred[i] += config.shrinkage * tree.predict_row(X, i);
    e.stages.push_back({std::move(tree), config.shrinkage});
    e.train_mse.push_back(mse());
  }
  return e;
}

std::vector<std::pair<FeatureId, double>> ImportanceTable::ranked() const {
  std::vector<std::pair<FeatureId, double>> out(values.begin(), values.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

ImportanceTable importances(const BoostedEnsemble& ensemble,
                            const FeatureMatrix& X) {
  ImportanceTable table;
  if (X.n() == 0) return table;
  const double n = static_cast<double>(X.n());
  for (const auto& stage : ensemble.stages) {
    for (const TreeNode& node : stage.tree.nodes) {
      if (node.feature_index < 0) continue;
      // (rows at node / n) * per-row variance reduction = SSE gain / n
      table.values[node.feature] += node.gain / n;
    }
  }
  double total = 0.0;
  for (const auto& [id, v] : table.values) total += v;
  if (total > 0.0)
    for (auto& [id, v] : table.values) v /= total;
  return table;
}

namespace {

nlohmann::ordered_json tree_to_json(const Tree& tree, int idx) {
  const TreeNode& node = tree.nodes[idx];
  nlohmann::ordered_json j;
  if (node.feature_index < 0) {
    j["value"] = node.value;
    j["n"] = node.n_node;
    return j;
  }
  j["feature"] = std::to_string(node.feature);
  j["gain"] = node.gain;
  j["n"] = node.n_node;
  j["absent"] = tree_to_json(tree, node.left);
  j["present"] = tree_to_json(tree, node.right);
  return j;
}

int tree_from_json(const nlohmann::json& j, Tree& tree) {
  const int self = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({});
  if (j.contains("feature")) {
    tree.nodes[self].feature = std::stoull(j.at("feature").get<std::string>());
    tree.nodes[self].feature_index = 0;  // marker: split node, index unknown
    tree.nodes[self].gain = j.value("gain", 0.0);
    tree.nodes[self].n_node = j.value("n", std::size_t{0});
    const int left = tree_from_json(j.at("absent"), tree);
    tree.nodes[self].left = left;
    const int right = tree_from_json(j.at("present"), tree);
    tree.nodes[self].right = right;
  } else {
    tree.nodes[self].feature_index = -1;
    tree.nodes[self].value = j.at("value").get<double>();
    tree.nodes[self].n_node = j.value("n", std::size_t{0});
  }
  return self;
}

}  // namespace

std::string BoostedEnsemble::to_json() const {
  nlohmann::ordered_json j;
  j["c0"] = c0;
  j["gamma"] = config.shrinkage;
  j["hash_version"] = hash_version;
  j["config"] = {{"stages", config.stages},
                 {"shrinkage", config.shrinkage},
                 {"max_depth", config.max_depth},
                 {"min_leaf", config.min_leaf},
                 {"seed", config.seed},
                 {"row_subsample", config.row_subsample},
                 {"col_subsample", config.col_subsample}};
  j["train_mse"] = train_mse;
  j["trees"] = nlohmann::json::array();
  for (const Stage& st : stages) {
    nlohmann::ordered_json js;
    js["shrinkage"] = st.shrinkage;
    js["root"] = st.tree.nodes.empty() ? nlohmann::ordered_json{{"value", 0.0}}
                                       : tree_to_json(st.tree, 0);
    j["trees"].push_back(js);
  }
  return j.dump(2);
}

BoostedEnsemble BoostedEnsemble::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  BoostedEnsemble e;
  e.c0 = j.at("c0").get<double>();
  e.hash_version = j.value("hash_version", std::string(kHashVersion));
  const auto& jc = j.at("config");
  e.config.stages = jc.at("stages").get<int>();
  e.config.shrinkage = jc.at("shrinkage").get<double>();
  e.config.max_depth = jc.at("max_depth").get<int>();
  e.config.min_leaf = jc.at("min_leaf").get<int>();
  e.config.seed = jc.at("seed").get<std::uint64_t>();
  e.config.row_subsample = jc.value("row_subsample", 1.0);
  e.config.col_subsample = jc.value("col_subsample", 1.0);
  if (j.contains("train_mse"))
    e.train_mse = j["train_mse"].get<std::vector<double>>();
  for (const auto& js : j.at("trees")) {
    BoostedEnsemble::Stage st;
    st.shrinkage = js.at("shrinkage").get<double>();
    tree_from_json(js.at("root"), st.tree);
    e.stages.push_back(std::move(st));
  }
  return e;
}

}  // namespace hypograph
