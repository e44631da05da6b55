#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypograph/graph.hpp"

namespace hypograph {

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line, int column = -1)
      : std::runtime_error(locate(what, line, column)), line(line), column(column) {}
  int line;
  int column;

  static std::string locate(const std::string& what, int line, int column);
};

struct Sample {
  LabeledGraph graph;
  double y = 0.0;
};

struct Dataset {
  std::string name;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  std::vector<double> targets() const;
  void validate() const;  // unique ids, finite targets
};

// ---- JSON-lines graph format -----------------------------------------------
// {"id": str, "nodes":[{"kind": str, "attrs": {str:str}?}],
//  "edges": [[u, v, {"kind": str}]], "y": number?}

struct ParsedLine {
  LabeledGraph graph;
  std::optional<double> y;
};

ParsedLine parse_graph_jsonl(const std::string& line, int line_number = 1);
std::string graph_to_jsonl(const LabeledGraph& g, std::optional<double> y);

Dataset load_jsonl_dataset(const std::string& path, const std::string& name = "");
void save_jsonl_dataset(const Dataset& ds, const std::string& path);

// ---- Molecular line notation (SMILES subset) -------------------------------
// Organic-set atoms B C N O P S F Cl Br I, aromatic b c n o p s, bracket
// atoms with charge and explicit H count, bonds - = # :, branches, ring
// closures 1-9 and %nn. Node attrs: element, charge, aromatic, hcount.

LabeledGraph parse_molecule(const std::string& notation, int line_number = 1);

// Debug writer; re-parsing the output yields a canonical-form-identical graph.
std::string write_molecule(const LabeledGraph& g);

// File of "<notation>\t<y>" records; '#'-lines and blank lines ignored.
Dataset load_molecule_dataset(const std::string& path, const std::string& name = "");

// ---- Quantum labeling utility ----------------------------------------------

struct SchmidtRanks {
  int d1 = 1, d2 = 1, d3 = 1;
};

// log2(d1*d2*d3); entanglement size in involved qubits.
double n_qubits(const SchmidtRanks& r);

}  // namespace hypograph
