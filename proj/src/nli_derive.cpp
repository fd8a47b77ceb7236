#include "negaff/nli_derive.hpp"

#include <fstream>

#include "negaff/corpus_io.hpp"
#include "negaff/error.hpp"

namespace negaff {

using nlohmann::json;

std::string to_string(Orientation o) {
  return o == Orientation::neg_to_aff ? "neg_to_aff" : "aff_to_neg";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "neg_to_aff") return Orientation::neg_to_aff;
  if (s == "aff_to_neg") return Orientation::aff_to_neg;
  fail("unknown orientation: " + s);
}

bool operator==(const NliExample& a, const NliExample& b) {
  return a.premise == b.premise && a.hypothesis == b.hypothesis && a.label == b.label &&
         a.pair_id == b.pair_id && a.orientation == b.orientation;
}

void to_json(json& j, const NliExample& e) {
  j = json{{"premise", e.premise},
           {"hypothesis", e.hypothesis},
           {"label", e.label},
           {"pair_id", e.pair_id},
           {"orientation", to_string(e.orientation)}};
}

void from_json(const json& j, NliExample& e) {
  j.at("premise").get_to(e.premise);
  j.at("hypothesis").get_to(e.hypothesis);
  j.at("label").get_to(e.label);
  j.at("pair_id").get_to(e.pair_id);
  e.orientation = orientation_from_string(j.at("orientation").get<std::string>());
}

std::vector<NliExample> derive_nli(const std::vector<AfinPair>& pairs) {
  std::vector<NliExample> out;
  out.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    NliExample forward;
    forward.premise = p.negated;
    forward.hypothesis = p.affirmative;
    forward.pair_id = p.id;
    forward.orientation = Orientation::neg_to_aff;
    out.push_back(forward);

    NliExample backward;
    backward.premise = p.affirmative;
    backward.hypothesis = p.negated;
    backward.pair_id = p.id;
    backward.orientation = Orientation::aff_to_neg;
    out.push_back(backward);
  }
  return out;
}

namespace {

std::string tsv_safe(std::string text) {
  for (auto& c : text) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

uint64_t export_nli(const std::vector<NliExample>& examples, ExportFormat format,
                    const std::string& path) {
  if (format == ExportFormat::jsonl) return write_jsonl(examples, path);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open output file: " + path);
  out << "premise\thypothesis\tlabel\n";
  for (const auto& e : examples) {
    out << tsv_safe(e.premise) << '\t' << tsv_safe(e.hypothesis) << '\t' << e.label << '\n';
  }
  if (!out) fail("write failed: " + path);
  return examples.size();
}

}  // namespace negaff
