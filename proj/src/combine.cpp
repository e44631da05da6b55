#include "hypograph/combine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hypograph {

LogicalExpr LogicalExpr::make(Op op, Literal a, Literal b) {
  LogicalExpr e;
  e.op = op;
  if (op == Op::Xor) {
    // XOR(a,b) == XOR(!a,!b) and XOR(!a,b) == XOR(a,!b): fold negations
    // into a single parity bit on the second literal.
    const bool parity = a.negated != b.negated;
    a.negated = false;
    b.negated = parity;
  }
  // all three ops are symmetric in their literals
  if (b.id < a.id) std::swap(a, b);
  e.a = a;
  e.b = b;
  return e;
}

std::string LogicalExpr::text() const {
  const char* name = op == Op::And ? "AND" : (op == Op::Or ? "OR" : "XOR");
  auto lit = [](const Literal& l) {
    return (l.negated ? "NOT " : "") + feature_id_hex(l.id);
  };
  return std::string(name) + "(" + lit(a) + ", " + lit(b) + ")";
}

bool eval_expr(const LogicalExpr& expr, const std::set<FeatureId>& features) {
  const bool va = (features.count(expr.a.id) > 0) != expr.a.negated;
  const bool vb = (features.count(expr.b.id) > 0) != expr.b.negated;
  switch (expr.op) {
    case LogicalExpr::Op::And: return va && vb;
    case LogicalExpr::Op::Or: return va || vb;
    case LogicalExpr::Op::Xor: return va != vb;
  }
  return false;
}

namespace {

std::vector<std::uint8_t> expr_column(const LogicalExpr& expr,
                                      const std::vector<std::uint8_t>& col_a,
                                      const std::vector<std::uint8_t>& col_b) {
  std::vector<std::uint8_t> out(col_a.size());
  for (std::size_t i = 0; i < col_a.size(); ++i) {
    const bool va = (col_a[i] != 0) != expr.a.negated;
    const bool vb = (col_b[i] != 0) != expr.b.negated;
    bool v = false;
    switch (expr.op) {
      case LogicalExpr::Op::And: v = va && vb; break;
      case LogicalExpr::Op::Or: v = va || vb; break;
      case LogicalExpr::Op::Xor: v = va != vb; break;
    }
    out[i] = v ? 1 : 0;
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::vector<MacroFeature> search_macro_features(
    const std::vector<FeatureId>& candidates, const FeatureMatrix& X,
    const std::vector<double>& y, const CombineConfig& config) {
  std::vector<FeatureId> feats = candidates;
  std::sort(feats.begin(), feats.end());
  feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
  if (feats.size() > config.k) feats.resize(config.k);

  struct Candidate {
    FeatureId id;
    std::vector<std::uint8_t> col;
    double abs_d;
  };
  std::vector<Candidate> cols;
  for (FeatureId id : feats) {
    auto vi = X.vocab_index(id);
    if (!vi) continue;
    Candidate c;
    c.id = id;
    c.col = X.column(*vi);
    EffectStats st = effect_strength(c.col, y, config.d_min);
    c.abs_d = st.contrast ? std::fabs(st.d) : 0.0;
    cols.push_back(std::move(c));
  }

  const std::size_t support_min = effective_support_min(config.support_min, X.n());
  std::vector<MacroFeature> out;
  std::vector<LogicalExpr> seen;

  auto consider = [&](LogicalExpr::Op op, const Candidate& ca, bool na,
                      const Candidate& cb, bool nb) {
    LogicalExpr expr = LogicalExpr::make(op, {ca.id, na}, {cb.id, nb});
    if (std::find(seen.begin(), seen.end(), expr) != seen.end()) return;
    seen.push_back(expr);
    std::vector<std::uint8_t> col = expr_column(expr, ca.col, cb.col);
    EffectStats st = effect_strength(col, y, config.d_min);
    if (!st.contrast) return;
    if (st.n1 < support_min || st.n0 < support_min) return;
    const double gain = std::fabs(st.d) - std::max(ca.abs_d, cb.abs_d);
    if (gain < config.gain_min) return;
    out.push_back({expr, st, gain});
  };

  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      seen.clear();
      if (config.use_and)
        for (bool na : {false, true})
          for (bool nb : {false, true})
            consider(LogicalExpr::Op::And, cols[i], na, cols[j], nb);
      if (config.use_or)
        for (bool na : {false, true})
          for (bool nb : {false, true})
            consider(LogicalExpr::Op::Or, cols[i], na, cols[j], nb);
      if (config.use_xor)
        consider(LogicalExpr::Op::Xor, cols[i], false, cols[j], false);
    }
  }

  std::sort(out.begin(), out.end(), [](const MacroFeature& a, const MacroFeature& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    const double da = std::fabs(a.stats.d), db = std::fabs(b.stats.d);
    if (da != db) return da > db;
    return a.expr.text() < b.expr.text();
  });
  return out;
}

std::string macro_features_to_csv(const std::vector<MacroFeature>& list) {
  std::string out = "rank,expr,gain,s,d,n1,n0,mean1,mean0\n";
  std::size_t rank = 0;
  for (const MacroFeature& m : list) {
    ++rank;
    out += std::to_string(rank) + ',' + '"' + m.expr.text() + '"' + ',' +
           fmt(m.gain) + ',' + fmt(m.stats.s) + ',' + fmt(m.stats.d) + ',' +
           std::to_string(m.stats.n1) + ',' + std::to_string(m.stats.n0) + ',' +
           fmt(m.stats.mean1) + ',' + fmt(m.stats.mean0) + '\n';
  }
  return out;
}

}  // namespace hypograph
