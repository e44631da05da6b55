#pragma once

#include <set>
#include <string>
#include <vector>

#include "hypograph/fingerprint.hpp"
#include "hypograph/hypothesis.hpp"

namespace hypograph {

struct Literal {
  FeatureId id = 0;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

// Binary Boolean combination of two distinct fingerprint bits. XOR carries
// no negations (XOR(a,b) == XOR(!a,!b)); expressions are kept in canonical
// literal order so logically equal forms compare equal.
struct LogicalExpr {
  enum class Op { And, Or, Xor };
  Op op = Op::And;
  Literal a, b;

  static LogicalExpr make(Op op, Literal a, Literal b);  // canonicalizes
  bool operator==(const LogicalExpr&) const = default;
  std::string text() const;  // e.g. "AND(NOT 0x3a41..., 0x9bd2...)"
};

bool eval_expr(const LogicalExpr& expr, const std::set<FeatureId>& features);

struct MacroFeature {
  LogicalExpr expr;
  EffectStats stats;
  double gain = 0.0;  // |d_expr| - max(|d_a|, |d_b|)
};

struct CombineConfig {
  std::size_t k = 30;           // candidate features considered
  bool use_and = true;
  bool use_or = true;
  bool use_xor = true;
  double gain_min = 0.1;
  std::size_t support_min = 0;  // 0 = auto: max(5, 0.5% of n)
  double d_min = 0.2;           // direction cutoff for reported stats
};

// Enumerates op/literal pairs over the candidates, deduplicated by logical
// equivalence; keeps gain >= gain_min and support on both sides; ranks by
// gain desc, then |d| desc, then expression text.
std::vector<MacroFeature> search_macro_features(
    const std::vector<FeatureId>& candidates, const FeatureMatrix& X,
    const std::vector<double>& y, const CombineConfig& config);

std::string macro_features_to_csv(const std::vector<MacroFeature>& list);

}  // namespace hypograph
