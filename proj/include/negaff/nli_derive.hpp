#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "negaff/pair_pipeline.hpp"

namespace negaff {

enum class Orientation { neg_to_aff, aff_to_neg };
std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

// Entailment in both directions holds between semantically equivalent
// sentences, so each pair yields exactly two labeled examples.
struct NliExample {
  std::string premise;
  std::string hypothesis;
  std::string label = "entailment";
  std::string pair_id;
  Orientation orientation = Orientation::neg_to_aff;
};

bool operator==(const NliExample& a, const NliExample& b);
void to_json(nlohmann::json& j, const NliExample& e);
void from_json(const nlohmann::json& j, NliExample& e);

// Two examples per pair, neg_to_aff first. Output size is always exactly
// twice the input size.
std::vector<NliExample> derive_nli(const std::vector<AfinPair>& pairs);

enum class ExportFormat { tsv, jsonl };

// TSV columns premise/hypothesis/label (tabs and newlines inside text are
// flattened to spaces; JSONL is the lossless form). Returns rows written.
uint64_t export_nli(const std::vector<NliExample>& examples, ExportFormat format,
                    const std::string& path);

}  // namespace negaff
