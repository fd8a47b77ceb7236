#include "negaff/task_router.hpp"

#include <fstream>
#include <set>

#include <httplib.h>

#include "negaff/corpus_io.hpp"
#include "negaff/error.hpp"

namespace negaff {

using nlohmann::json;

LookupGenerator::LookupGenerator(const std::string& fixture_path) {
  JsonlLineReader reader(fixture_path);
  while (auto j = reader.next()) {
    table_[j->at("text").get<std::string>()] = j->at("interpretation").get<std::string>();
  }
}

std::optional<std::string> LookupGenerator::interpret(const std::string& text) {
  auto it = table_.find(text);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

HttpGenerator::HttpGenerator(std::string host, int port) : host_(std::move(host)), port_(port) {}

std::optional<std::string> HttpGenerator::interpret(const std::string& text) {
  httplib::Client client(host_, port_);
  auto res = client.Post("/interpret", json{{"text", text}}.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("interpretation")) return std::nullopt;
  return reply["interpretation"].get<std::string>();
}

CueDeletionGenerator::CueDeletionGenerator(const Detector& detector, std::string lang)
    : detector_(detector), lang_(std::move(lang)) {}

std::optional<std::string> CueDeletionGenerator::interpret(const std::string& text) {
  const TaggedSentence tagged = detector_.tag(text, lang_);
  if (tagged.cues.empty()) return text;

  std::set<size_t> drop;
  std::map<size_t, std::string> replace;
  for (const auto& cue : tagged.cues) {
    if (cue.kind == CueKind::affixal && cue.affix && cue.affix_side) {
      const size_t i = cue.token_indices.front();
      const std::string& tok = tagged.tokens[i].text;
      if (tok.size() > cue.affix->size()) {
        replace[i] = (*cue.affix_side == AffixSide::prefix)
                         ? tok.substr(cue.affix->size())
                         : tok.substr(0, tok.size() - cue.affix->size());
        continue;
      }
    }
    for (size_t i : cue.token_indices) drop.insert(i);
  }
  std::string out;
  for (const auto& tok : tagged.tokens) {
    if (drop.count(tok.index)) continue;
    if (!out.empty()) out += ' ';
    auto it = replace.find(tok.index);
    out += (it != replace.end()) ? it->second : tok.text;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::string to_string(Importance i) {
  return i == Importance::important ? "important" : "unimportant";
}

bool operator==(const RoutedExample& a, const RoutedExample& b) {
  return a.id == b.id && a.text == b.text && a.has_negation == b.has_negation &&
         a.interpretation == b.interpretation && a.combined == b.combined &&
         a.importance == b.importance;
}

void to_json(json& j, const RoutedExample& e) {
  j = json{{"id", e.id},
           {"text", e.text},
           {"has_negation", e.has_negation},
           {"combined", e.combined}};
  if (e.interpretation) j["interpretation"] = *e.interpretation;
  if (e.importance) j["importance"] = to_string(*e.importance);
}

void from_json(const json& j, RoutedExample& e) {
  j.at("id").get_to(e.id);
  j.at("text").get_to(e.text);
  j.at("has_negation").get_to(e.has_negation);
  j.at("combined").get_to(e.combined);
  e.interpretation.reset();
  e.importance.reset();
  if (j.contains("interpretation")) e.interpretation = j["interpretation"].get<std::string>();
  if (j.contains("importance")) {
    e.importance =
        j["importance"] == "important" ? Importance::important : Importance::unimportant;
  }
}

std::vector<RoutedExample> route(const std::vector<std::pair<std::string, std::string>>& sentences,
                                 const Detector& detector, Generator& generator,
                                 const RouterOptions& options, RouteStats* stats) {
  std::vector<RoutedExample> out;
  out.reserve(sentences.size());
  RouteStats local;
  for (const auto& [id, text] : sentences) {
    ++local.total;
    RoutedExample e;
    e.id = id;
    e.text = text;
    e.has_negation = has_negation(detector, text, options.lang);
    if (!e.has_negation) {
      e.combined = text;
      out.push_back(std::move(e));
      continue;
    }
    ++local.negated;
    if (auto interp = generator.interpret(text)) {
      e.interpretation = *interp;
      e.combined = text + " " + options.separator + " " + *interp;
      // The generator may itself emit negation; pass through, just flag it.
      if (has_negation(detector, *interp, options.lang)) ++local.negated_interpretations;
    } else {
      ++local.fallbacks;
      e.combined = text;
    }
    out.push_back(std::move(e));
  }
  if (stats) *stats = local;
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

uint64_t export_routed(const std::vector<RoutedExample>& examples, ExportFormat format,
                       const std::string& path) {
  if (format == ExportFormat::jsonl) return write_jsonl(examples, path);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open output file: " + path);
  out << "id\ttext\thas_negation\tinterpretation\tcombined\n";
  for (const auto& e : examples) {
    out << tsv_safe(e.id) << '\t' << tsv_safe(e.text) << '\t'
        << (e.has_negation ? "true" : "false") << '\t'
        << tsv_safe(e.interpretation.value_or("")) << '\t' << tsv_safe(e.combined) << '\n';
  }
  if (!out) fail("write failed: " + path);
  return examples.size();
}

std::map<std::string, Importance> load_importance(const std::string& path,
                                                  uint64_t* duplicate_warnings) {
  std::ifstream in(path);
  if (!in) fail("cannot open importance annotation file: " + path);
  std::map<std::string, Importance> out;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t tab = t.find('\t');
    if (tab == std::string::npos) {
      fail(path + ":" + std::to_string(line_no) + ": expected 'id<TAB>label'");
    }
    const std::string id = t.substr(0, tab);
    const std::string label = trim(t.substr(tab + 1));
    Importance imp;
    if (label == "important") {
      imp = Importance::important;
    } else if (label == "unimportant") {
      imp = Importance::unimportant;
    } else {
      fail(path + ":" + std::to_string(line_no) + ": unknown importance label '" + label + "'");
    }
    if (out.count(id) && duplicate_warnings) ++*duplicate_warnings;
    out[id] = imp;  // last one wins
  }
  return out;
}

ImportanceSplit split_by_importance(const std::vector<RoutedExample>& examples,
                                    const std::map<std::string, Importance>& annotations) {
  ImportanceSplit split;
  for (const auto& e : examples) {
    auto it = annotations.find(e.id);
    if (it == annotations.end()) {
      split.unannotated.push_back(e);
      continue;
    }
    RoutedExample annotated = e;
    annotated.importance = it->second;
    (it->second == Importance::important ? split.important : split.unimportant)
        .push_back(std::move(annotated));
  }
  return split;
}

}  // namespace negaff
