#pragma once

#include <json.hpp>

#include "hypograph/graph.hpp"

namespace hypograph::detail {

inline nlohmann::ordered_json env_to_json(const EnvironmentDescriptor& env) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::json::array();
  for (const NodeLabel& nl : env.nodes) {
    nlohmann::ordered_json jn;
    jn["kind"] = nl.kind;
    if (!nl.attrs.empty()) {
      nlohmann::ordered_json ja;
      for (const auto& [k, v] : nl.attrs) ja[k] = v;
      jn["attrs"] = ja;
    }
    j["nodes"].push_back(jn);
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : env.edges)
    j["edges"].push_back({e.u, e.v, {{"kind", e.label.kind}}});
  j["radius"] = env.radius;
  j["root"] = env.root;
  return j;
}

inline EnvironmentDescriptor env_from_json(const nlohmann::json& j) {
  EnvironmentDescriptor env;
  for (const auto& jn : j.at("nodes")) {
    NodeLabel nl;
    nl.kind = jn.at("kind").get<std::string>();
    if (jn.contains("attrs"))
      for (const auto& [k, v] : jn["attrs"].items())
        nl.attrs[k] = v.get<std::string>();
    env.nodes.push_back(std::move(nl));
  }
  for (const auto& je : j.at("edges")) {
    EdgeLabel label;
    if (je.at(2).is_string())
      label.kind = je.at(2).get<std::string>();
    else
      label.kind = je.at(2).at("kind").get<std::string>();
    env.edges.push_back({je.at(0).get<int>(), je.at(1).get<int>(), label});
  }
  env.radius = j.at("radius").get<int>();
  env.root = j.at("root").get<int>();
  return env;
}

}  // namespace hypograph::detail
