// negaff: build <negated sentence, affirmative interpretation> pair corpora
// from parallel bitexts, and derive NLI / blending / routed-classifier
// artifacts from them.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "negaff/blend_plan.hpp"
#include "negaff/config.hpp"
#include "negaff/conll.hpp"
#include "negaff/corpus_io.hpp"
#include "negaff/crf.hpp"
#include "negaff/cue_detect.hpp"
#include "negaff/cue_eval.hpp"
#include "negaff/error.hpp"
#include "negaff/eval_metrics.hpp"
#include "negaff/hash.hpp"
#include "negaff/mt_client.hpp"
#include "negaff/nli_derive.hpp"
#include "negaff/pair_pipeline.hpp"
#include "negaff/task_router.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace negaff;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

std::map<std::string, CueLexicon> load_lexicons(const std::map<std::string, std::string>& paths) {
  std::map<std::string, CueLexicon> lexicons;
  for (const auto& [lang, path] : paths) {
    CueLexicon lex = load_lexicon(path);
    if (lex.lang != lang) {
      fail("lexicon " + path + " declares lang '" + lex.lang + "' but is registered for '" + lang + "'");
    }
    lexicons.emplace(lang, std::move(lex));
  }
  return lexicons;
}

std::unique_ptr<Detector> make_detector(const DetectorConfig& config,
                                        std::map<std::string, CueLexicon> lexicons,
                                        const RuleDetectorOptions& rule_options = {}) {
  if (config.kind == "crf") {
    return std::make_unique<CrfDetector>(crf::load_model(config.model_path), std::move(lexicons));
  }
  return std::make_unique<RuleDetector>(std::move(lexicons), rule_options);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, Clock& clock) {
  if (config.kind == "mock") return std::make_unique<MockBackend>(config.fixture_path, clock);
  const char* key = std::getenv(config.api_key_env.c_str());
  return std::make_unique<HttpBackend>(config.host, config.port, key ? key : "");
}

MtOptions mt_options(const BackendConfig& config) {
  MtOptions mt;
  mt.requests_per_second = config.requests_per_second;
  mt.batch_size = config.batch_size;
  mt.max_retries = config.max_retries;
  mt.backoff_initial_ms = config.backoff_initial_ms;
  return mt;
}

// Config-file values with CLI-flag overrides; long runs stay auditable
// through the config hash while still allowing one-off tweaks.
struct ConfigOverrides {
  std::string backend_kind;
  std::string cache_dir;
  std::string output_dir;
  double requests_per_second = -1.0;
  int64_t batch_size = -1;
  int64_t max_target_tokens = -1;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--backend", backend_kind, "override backend kind (mock|http)");
    cmd->add_option("--cache-dir", cache_dir, "override translation cache directory");
    cmd->add_option("--output-dir", output_dir, "override output directory");
    cmd->add_option("--rps", requests_per_second, "override backend requests per second");
    cmd->add_option("--batch-size", batch_size, "override backend batch size");
    cmd->add_option("--max-target-tokens", max_target_tokens, "override target length cap");
  }

  void apply(PipelineConfig& config) const {
    if (!backend_kind.empty()) config.backend.kind = backend_kind;
    if (!cache_dir.empty()) config.cache_dir = cache_dir;
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (requests_per_second >= 0.0) config.backend.requests_per_second = requests_per_second;
    if (batch_size >= 0) config.backend.batch_size = static_cast<size_t>(batch_size);
    if (max_target_tokens >= 0) config.max_target_tokens = static_cast<size_t>(max_target_tokens);
    const auto diags = validate_config(config);
    if (!diags.empty()) {
      std::string message = "config invalid after overrides:";
      for (const auto& d : diags) message += "\n  " + d.field + ": " + d.message;
      fail(message);
    }
  }
};

// Reads "lang=path" pairs from repeated flags.
std::map<std::string, std::string> parse_lang_paths(const std::vector<std::string>& entries,
                                                    const std::string& flag) {
  std::map<std::string, std::string> out;
  for (const auto& e : entries) {
    const size_t eq = e.find('=');
    if (eq == std::string::npos) fail(flag + " expects lang=path, got '" + e + "'");
    out[e.substr(0, eq)] = e.substr(eq + 1);
  }
  return out;
}

// Chains all configured corpora into one streaming source.
class ConfigSource {
 public:
  explicit ConfigSource(const PipelineConfig& config) : config_(config) {}

  std::optional<SentencePair> next() {
    for (;;) {
      if (!moses_ && !tsv_) {
        if (index_ >= config_.corpora.size()) return std::nullopt;
        const CorpusSpec& spec = config_.corpora[index_++];
        if (spec.format == "moses") {
          moses_ = std::make_unique<MosesReader>(spec.source_path, spec.target_path,
                                                 spec.source_lang, spec.target_lang, spec.label);
        } else {
          tsv_ = std::make_unique<TsvReader>(spec.source_path, spec.source_lang, spec.target_lang,
                                             spec.label);
        }
      }
      auto pair = moses_ ? moses_->next() : tsv_->next();
      if (pair) return pair;
      if (moses_) diag_merge(moses_->diagnostics());
      if (tsv_) diag_merge(tsv_->diagnostics());
      moses_.reset();
      tsv_.reset();
    }
  }

  const IngestDiagnostics& diagnostics() const { return diag_; }

 private:
  void diag_merge(const IngestDiagnostics& d) {
    diag_.invalid_utf8 += d.invalid_utf8;
    diag_.malformed_lines += d.malformed_lines;
    diag_.blank_lines += d.blank_lines;
  }

  const PipelineConfig& config_;
  size_t index_ = 0;
  std::unique_ptr<MosesReader> moses_;
  std::unique_ptr<TsvReader> tsv_;
  IngestDiagnostics diag_;
};

std::vector<TaggedSentence> read_tagged(const std::string& path, const std::string& format,
                                        const std::string& lang, const SemConllOptions& sem) {
  if (format == "jsonl") return read_jsonl<TaggedSentence>(path);
  if (format == "two-col") {
    std::vector<TaggedSentence> out;
    for (const auto& seq : read_two_column(path)) out.push_back(to_tagged(seq, lang));
    return out;
  }
  if (format == "sem") return read_sem_conll(path, lang, sem);
  fail("unknown tagged format '" + format + "' (expected jsonl, two-col, or sem)");
}

int run_ingest(const std::string& config_path, const ConfigOverrides& overrides) {
  Timer timer;
  PipelineConfig config = load_config(config_path);
  overrides.apply(config);
  fs::create_directories(config.output_dir);
  const std::string out_path = (fs::path(config.output_dir) / "pairs.jsonl").string();

  ConfigSource source(config);
  JsonlWriter writer(out_path);
  std::map<std::string, uint64_t> per_corpus;
  while (auto pair = source.next()) {
    writer.write(json(*pair));
    per_corpus[pair->corpus] += 1;
  }
  writer.flush();

  json stats{{"per_corpus", per_corpus},
             {"diagnostics",
              {{"invalid_utf8", source.diagnostics().invalid_utf8},
               {"malformed_lines", source.diagnostics().malformed_lines},
               {"blank_lines", source.diagnostics().blank_lines}}}};
  const std::string stats_path = (fs::path(config.output_dir) / "ingest_stats.json").string();
  std::ofstream(stats_path) << stats.dump(2) << '\n';

  RunManifest manifest;
  manifest.subcommand = "ingest";
  manifest.config_hash = sha256_file_hex(config_path);
  for (const auto& spec : config.corpora) {
    manifest.inputs.emplace_back(spec.source_path, sha256_file_hex(spec.source_path));
    if (!spec.target_path.empty()) {
      manifest.inputs.emplace_back(spec.target_path, sha256_file_hex(spec.target_path));
    }
  }
  manifest.outputs.emplace_back(out_path, writer.count());
  manifest.counts["records"] = writer.count();
  manifest.counts["skipped_invalid_utf8"] = source.diagnostics().invalid_utf8;
  manifest.counts["skipped_malformed"] = source.diagnostics().malformed_lines;
  manifest.counts["skipped_blank"] = source.diagnostics().blank_lines;
  manifest.wall_ms = timer.elapsed_ms();
  write_manifest(manifest, (fs::path(config.output_dir) / "run_manifest.json").string());
  std::cerr << "ingest: " << writer.count() << " pairs -> " << out_path << '\n';
  return 0;
}

int run_build_pairs(const std::string& config_path, const ConfigOverrides& overrides) {
  Timer timer;
  PipelineConfig config = load_config(config_path);
  overrides.apply(config);
  fs::create_directories(config.output_dir);

  auto lexicons = load_lexicons(config.lexicons);
  auto detector = make_detector(config.detector, std::move(lexicons));

  // The mock backend runs on a virtual clock so whole runs are replayable.
  FakeClock fake_clock;
  SystemClock system_clock;
  Clock& clock = (config.backend.kind == "mock") ? static_cast<Clock&>(fake_clock)
                                                 : static_cast<Clock&>(system_clock);
  auto backend = make_backend(config.backend, clock);
  std::unique_ptr<TranslationCache> cache;
  if (!config.cache_dir.empty()) cache = std::make_unique<TranslationCache>(config.cache_dir);

  const std::string out_path = (fs::path(config.output_dir) / "afin_pairs.jsonl").string();
  JsonlWriter writer(out_path);
  ReportBuilder report_builder;

  ConfigSource source(config);
  PipelineOptions options;
  options.max_target_tokens = config.max_target_tokens;
  const BuildResult result = build_pairs([&] { return source.next(); }, *detector, *backend,
                                         cache.get(), mt_options(config.backend), clock, options,
                                         [&](const AfinPair& pair) {
                                           writer.write(json(pair));
                                           report_builder.add(pair);
                                         });
  writer.flush();

  json per_corpus = json::object();
  std::map<std::string, uint64_t> ingested;
  for (const auto& [corpus, counts] : result.counts) {
    per_corpus[corpus] = json{{"ingested", counts.ingested},
                              {"emitted", counts.emitted},
                              {"discards", counts.discards}};
    ingested[corpus] = counts.ingested;
  }
  json cue_stats = json::array();
  for (const auto& [_, cs] : result.cue_stats) cue_stats.push_back(cs);
  const json stats{{"per_corpus", per_corpus}, {"cue_stats", cue_stats}};
  const std::string stats_path = (fs::path(config.output_dir) / "build_stats.json").string();
  std::ofstream(stats_path) << stats.dump(2) << '\n';

  const Report report = report_builder.build(ingested);
  const std::string report_path = (fs::path(config.output_dir) / "report.json").string();
  std::ofstream(report_path) << report_json(report).dump(2) << '\n';
  std::cout << report_table(report);

  RunManifest manifest;
  manifest.subcommand = "build-pairs";
  manifest.config_hash = sha256_file_hex(config_path);
  for (const auto& spec : config.corpora) {
    manifest.inputs.emplace_back(spec.source_path, sha256_file_hex(spec.source_path));
    if (!spec.target_path.empty()) {
      manifest.inputs.emplace_back(spec.target_path, sha256_file_hex(spec.target_path));
    }
  }
  manifest.outputs.emplace_back(out_path, writer.count());
  manifest.counts["emitted"] = result.emitted;
  for (const auto& [corpus, counts] : result.counts) {
    manifest.counts["ingested." + corpus] = counts.ingested;
    for (const auto& [reason, n] : counts.discards) {
      manifest.counts["discard." + corpus + "." + reason] = n;
    }
  }
  manifest.wall_ms = timer.elapsed_ms();
  write_manifest(manifest, (fs::path(config.output_dir) / "run_manifest.json").string());
  std::cerr << "build-pairs: " << result.emitted << " pairs -> " << out_path << '\n';
  return 0;
}

int run_backtranslate(const std::string& config_path, const std::string& in_path,
                      const std::string& out_path, const ConfigOverrides& overrides) {
  Timer timer;
  PipelineConfig config = load_config(config_path);
  overrides.apply(config);

  FakeClock fake_clock;
  SystemClock system_clock;
  Clock& clock = (config.backend.kind == "mock") ? static_cast<Clock&>(fake_clock)
                                                 : static_cast<Clock&>(system_clock);
  auto backend = make_backend(config.backend, clock);
  std::unique_ptr<TranslationCache> cache;
  if (!config.cache_dir.empty()) cache = std::make_unique<TranslationCache>(config.cache_dir);
  const MtOptions mt = mt_options(config.backend);

  JsonlLineReader reader(in_path);
  JsonlWriter writer(out_path);
  uint64_t failed = 0, cache_hits = 0;
  std::vector<TranslationRequest> batch;
  auto flush = [&] {
    if (batch.empty()) return;
    const BatchOutcome outcome = translate_batch(batch, *backend, cache.get(), mt, clock);
    cache_hits += outcome.cache_hits;
    for (const auto& r : outcome.results) {
      if (r.record) {
        writer.write(json(*r.record));
      } else {
        ++failed;
      }
    }
    batch.clear();
  };
  while (auto j = reader.next()) {
    const auto pair = j->get<SentencePair>();
    batch.push_back(TranslationRequest{pair.target_text, pair.target_lang, "en"});
    if (batch.size() >= std::max<size_t>(1, mt.batch_size)) flush();
  }
  flush();
  writer.flush();

  RunManifest manifest;
  manifest.subcommand = "backtranslate";
  manifest.config_hash = sha256_file_hex(config_path);
  manifest.inputs.emplace_back(in_path, sha256_file_hex(in_path));
  manifest.outputs.emplace_back(out_path, writer.count());
  manifest.counts["translated"] = writer.count();
  manifest.counts["failed"] = failed;
  manifest.counts["cache_hits"] = cache_hits;
  manifest.wall_ms = timer.elapsed_ms();
  write_manifest(manifest, out_path + ".manifest.json");
  std::cerr << "backtranslate: " << writer.count() << " ok, " << failed << " failed\n";
  return 0;
}

int run_detect(const std::string& in_path, const std::string& lang,
               const std::vector<std::string>& lexicon_flags, const std::string& detector_kind,
               const std::string& model_path, bool tag_affixal_tokens,
               const std::string& out_path) {
  Timer timer;
  auto lexicons = load_lexicons(parse_lang_paths(lexicon_flags, "--lexicon"));
  DetectorConfig dc;
  dc.kind = detector_kind;
  dc.model_path = model_path;
  RuleDetectorOptions rule_options;
  rule_options.tag_affixal_tokens = tag_affixal_tokens;
  auto detector = make_detector(dc, std::move(lexicons), rule_options);

  std::ifstream in(in_path);
  if (!in) fail("cannot open input file: " + in_path);
  JsonlWriter writer(out_path);
  uint64_t negated = 0;
  std::string line;
  while (std::getline(in, line)) {
    const TaggedSentence tagged = detector->tag(trim(line), lang);
    if (!tagged.cues.empty()) ++negated;
    writer.write(json(tagged));
  }
  writer.flush();

  RunManifest manifest;
  manifest.subcommand = "detect";
  manifest.inputs.emplace_back(in_path, sha256_file_hex(in_path));
  manifest.outputs.emplace_back(out_path, writer.count());
  manifest.counts["sentences"] = writer.count();
  manifest.counts["negated"] = negated;
  manifest.wall_ms = timer.elapsed_ms();
  write_manifest(manifest, out_path + ".manifest.json");
  std::cerr << "detect: " << negated << "/" << writer.count() << " sentences negated\n";
  return 0;
}

int run_eval_cues(const std::string& pred_path, const std::string& pred_format,
                  const std::string& gold_path, const std::string& gold_format,
                  const std::string& lang, const SemConllOptions& sem) {
  const auto pred = read_tagged(pred_path, pred_format, lang, sem);
  const auto gold = read_tagged(gold_path, gold_format, lang, sem);
  const PrfScores s = evaluate_cues(pred, gold);
  std::cout << json{{"precision", s.precision},
                    {"recall", s.recall},
                    {"f1", s.f1},
                    {"tp", s.tp},
                    {"fp", s.fp},
                    {"fn", s.fn}}
                   .dump(2)
            << '\n';
  return 0;
}

int run_train_crf(const std::vector<std::string>& train_flags, const std::string& format,
                  const std::vector<std::string>& lexicon_flags, const crf::TrainConfig& tc,
                  bool affixal_as_token, const std::string& out_path) {
  Timer timer;
  auto lexicons = load_lexicons(parse_lang_paths(lexicon_flags, "--lexicon"));

  std::vector<crf::TrainSentence> data;
  std::vector<std::pair<std::string, std::string>> inputs;
  for (const auto& entry : parse_lang_paths(train_flags, "--train")) {
    const std::string& lang = entry.first;
    const std::string& path = entry.second;
    inputs.emplace_back(path, sha256_file_hex(path));
    if (format == "two-col") {
      for (const auto& seq : read_two_column(path)) {
        data.push_back(crf::TrainSentence{seq.tokens, seq.tags, lang});
      }
    } else if (format == "sem") {
      SemConllOptions sem;
      sem.affixal_as_token = affixal_as_token;
      for (const auto& tagged : read_sem_conll(path, lang, sem)) {
        std::vector<std::string> tokens;
        for (const auto& t : tagged.tokens) tokens.push_back(t.text);
        data.push_back(crf::TrainSentence{std::move(tokens), tagged.tags, lang});
      }
    } else {
      fail("unknown training format '" + format + "' (expected two-col or sem)");
    }
  }

  crf::Model model = crf::train(data, lexicons, tc);
  json all_lex = json::object();
  for (const auto& [lang, lex] : lexicons) all_lex[lang] = lexicon_fingerprint(lex);
  model.lexicon_hash = fnv1a64_hex(all_lex.dump());
  crf::save_model(model, out_path);

  const double accuracy = crf::token_accuracy(model, data, lexicons);
  std::cerr << "train-crf: " << data.size() << " sentences, " << model.feature_names.size()
            << " features, objective " << model.meta.final_objective << ", train token accuracy "
            << accuracy << '\n';

  RunManifest manifest;
  manifest.subcommand = "train-crf";
  manifest.inputs = std::move(inputs);
  manifest.outputs.emplace_back(out_path, 1);
  manifest.counts["sentences"] = data.size();
  manifest.counts["features"] = model.feature_names.size();
  manifest.wall_ms = timer.elapsed_ms();
  write_manifest(manifest, out_path + ".manifest.json");
  return 0;
}

int run_analyze(const std::string& in_path, const std::string& stats_path,
                const std::string& json_out) {
  ReportBuilder builder;
  JsonlLineReader reader(in_path);
  while (auto j = reader.next()) builder.add(j->get<AfinPair>());

  std::map<std::string, uint64_t> ingested;
  if (!stats_path.empty()) {
    std::ifstream in(stats_path);
    if (!in) fail("cannot open stats file: " + stats_path);
    json stats;
    in >> stats;
    const json per_corpus = stats.value("per_corpus", json::object());
    for (const auto& [corpus, entry] : per_corpus.items()) {
      ingested[corpus] = entry.value("ingested", uint64_t{0});
    }
  }
  const Report report = builder.build(ingested);
  std::cout << report_table(report);
  if (!json_out.empty()) {
    std::ofstream(json_out) << report_json(report).dump(2) << '\n';
    RunManifest manifest;
    manifest.subcommand = "analyze";
    manifest.inputs.emplace_back(in_path, sha256_file_hex(in_path));
    manifest.outputs.emplace_back(json_out, report.rows.size());
    write_manifest(manifest, json_out + ".manifest.json");
  }
  return 0;
}

int run_derive_nli(const std::string& in_path, const std::string& out_path,
                   const std::string& format) {
  Timer timer;
  JsonlLineReader reader(in_path);
  const ExportFormat fmt = (format == "tsv") ? ExportFormat::tsv : ExportFormat::jsonl;

  // Streamed: two examples written per input pair.
  std::ofstream tsv;
  std::unique_ptr<JsonlWriter> jsonl;
  uint64_t rows = 0, pairs = 0;
  if (fmt == ExportFormat::tsv) {
    tsv.open(out_path, std::ios::binary);
    if (!tsv) fail("cannot open output file: " + out_path);
    tsv << "premise\thypothesis\tlabel\n";
  } else {
    jsonl = std::make_unique<JsonlWriter>(out_path);
  }
  auto tsv_safe = [](std::string t) {
    for (auto& c : t) {
      if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return t;
  };
  while (auto j = reader.next()) {
    ++pairs;
    for (const auto& e : derive_nli({j->get<AfinPair>()})) {
      if (fmt == ExportFormat::tsv) {
        tsv << tsv_safe(e.premise) << '\t' << tsv_safe(e.hypothesis) << '\t' << e.label << '\n';
      } else {
        jsonl->write(json(e));
      }
      ++rows;
    }
  }

  RunManifest manifest;
  manifest.subcommand = "derive-nli";
  manifest.inputs.emplace_back(in_path, sha256_file_hex(in_path));
  manifest.outputs.emplace_back(out_path, rows);
  manifest.counts["pairs"] = pairs;
  manifest.counts["examples"] = rows;
  manifest.wall_ms = timer.elapsed_ms();
  write_manifest(manifest, out_path + ".manifest.json");
  std::cerr << "derive-nli: " << pairs << " pairs -> " << rows << " examples\n";
  return 0;
}

int run_plan_blend(int m, int n, int k, double factor, uint64_t n_ours, uint64_t n_target,
                   uint64_t seed, const std::string& decay, const std::string& plan_out,
                   const std::string& aux_ids_path, const std::string& manifests_out) {
  const BlendPlan plan =
      make_plan(m, n, k, factor, n_ours, n_target, seed, decay_law_from_string(decay));
  std::cout << plan_table(plan);
  if (!plan_out.empty()) {
    std::ofstream(plan_out) << json(plan).dump(2) << '\n';
    RunManifest manifest;
    manifest.subcommand = "plan-blend";
    manifest.outputs.emplace_back(plan_out, plan.per_epoch_aux_counts.size());
    manifest.counts["epochs"] = plan.per_epoch_aux_counts.size();
    write_manifest(manifest, plan_out + ".manifest.json");
  }
  if (!manifests_out.empty()) {
    if (aux_ids_path.empty()) fail("--manifests requires --aux-ids");
    std::ifstream in(aux_ids_path);
    if (!in) fail("cannot open aux id file: " + aux_ids_path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
      const std::string id = trim(line);
      if (!id.empty()) ids.push_back(id);
    }
    const auto manifests = emit_manifests(plan, ids);
    std::ofstream(manifests_out) << json(manifests).dump(2) << '\n';
    std::cerr << "plan-blend: wrote " << manifests.size() << " epoch manifests\n";
  }
  return 0;
}

int run_route(const std::string& in_path, const std::vector<std::string>& lexicon_flags,
              const std::string& generator_kind, const std::string& generator_fixture,
              const std::string& generator_host, int generator_port, const std::string& separator,
              const std::string& lang, const std::string& out_path, const std::string& format,
              const std::string& importance_path) {
  Timer timer;
  auto lexicons = load_lexicons(parse_lang_paths(lexicon_flags, "--lexicon"));
  RuleDetector detector(std::move(lexicons));

  std::unique_ptr<Generator> generator;
  if (generator_kind == "lookup") {
    generator = std::make_unique<LookupGenerator>(generator_fixture);
  } else if (generator_kind == "http") {
    generator = std::make_unique<HttpGenerator>(generator_host, generator_port);
  } else if (generator_kind == "cue-deletion") {
    generator = std::make_unique<CueDeletionGenerator>(detector, lang);
  } else {
    fail("unknown generator '" + generator_kind + "' (expected lookup, http, or cue-deletion)");
  }

  std::ifstream in(in_path);
  if (!in) fail("cannot open input file: " + in_path);
  std::vector<std::pair<std::string, std::string>> sentences;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(in_path + ":" + std::to_string(line_no) + ": expected 'id<TAB>text'");
    }
    sentences.emplace_back(line.substr(0, tab), trim(line.substr(tab + 1)));
  }

  RouterOptions options;
  options.separator = separator;
  options.lang = lang;
  RouteStats stats;
  const auto routed = route(sentences, detector, *generator, options, &stats);

  const ExportFormat fmt = (format == "tsv") ? ExportFormat::tsv : ExportFormat::jsonl;
  const uint64_t written = export_routed(routed, fmt, out_path);

  if (!importance_path.empty()) {
    uint64_t dups = 0;
    const auto annotations = load_importance(importance_path, &dups);
    const auto split = split_by_importance(routed, annotations);
    export_routed(split.important, fmt, out_path + ".important");
    export_routed(split.unimportant, fmt, out_path + ".unimportant");
    export_routed(split.unannotated, fmt, out_path + ".unannotated");
    std::cerr << "route: importance split " << split.important.size() << "/"
              << split.unimportant.size() << "/" << split.unannotated.size() << " (" << dups
              << " duplicate annotations)\n";
  }

  RunManifest manifest;
  manifest.subcommand = "route";
  manifest.inputs.emplace_back(in_path, sha256_file_hex(in_path));
  manifest.outputs.emplace_back(out_path, written);
  manifest.counts["total"] = stats.total;
  manifest.counts["negated"] = stats.negated;
  manifest.counts["fallbacks"] = stats.fallbacks;
  manifest.counts["negated_interpretations"] = stats.negated_interpretations;
  manifest.wall_ms = timer.elapsed_ms();
  write_manifest(manifest, out_path + ".manifest.json");
  std::cerr << "route: " << stats.negated << "/" << stats.total << " negated, " << stats.fallbacks
            << " fallbacks\n";
  return 0;
}

int run_score_gen(const std::string& cand_path, const std::string& ref_path,
                  const std::string& out_path) {
  auto read_lines = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(trim(line));
    return lines;
  };
  const auto candidates = read_lines(cand_path);
  const auto references = read_lines(ref_path);
  const json scores{{"bleu2", bleu2(candidates, references)},
                    {"chrfpp", chrfpp(candidates, references)}};
  if (out_path.empty()) {
    std::cout << scores.dump(2) << '\n';
  } else {
    std::ofstream(out_path) << scores.dump(2) << '\n';
    RunManifest manifest;
    manifest.subcommand = "score-gen";
    manifest.inputs.emplace_back(cand_path, sha256_file_hex(cand_path));
    manifest.inputs.emplace_back(ref_path, sha256_file_hex(ref_path));
    manifest.outputs.emplace_back(out_path, 2);
    manifest.counts["examples"] = candidates.size();
    write_manifest(manifest, out_path + ".manifest.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"negated-sentence / affirmative-interpretation corpus pipeline"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, stats_path, json_out;
  std::string lang = "en", format = "jsonl";
  std::vector<std::string> lexicon_flags, train_flags;

  ConfigOverrides overrides;

  auto* ingest = app.add_subcommand("ingest", "read configured bitexts into pairs.jsonl");
  ingest->add_option("--config", config_path)->required();
  overrides.add_flags(ingest);

  auto* build = app.add_subcommand("build-pairs", "full pipeline: filters + backtranslation");
  build->add_option("--config", config_path)->required();
  overrides.add_flags(build);

  auto* backtranslate = app.add_subcommand("backtranslate", "translate target sentences to English");
  backtranslate->add_option("--config", config_path)->required();
  backtranslate->add_option("--in", in_path)->required();
  backtranslate->add_option("--out", out_path)->required();
  overrides.add_flags(backtranslate);

  std::string detector_kind = "rules", model_path;
  auto* detect = app.add_subcommand("detect", "tag negation cues in a sentence-per-line file");
  detect->add_option("--in", in_path)->required();
  detect->add_option("--lang", lang);
  detect->add_option("--lexicon", lexicon_flags, "lang=path (repeatable)")->required();
  detect->add_option("--detector", detector_kind)->check(CLI::IsMember({"rules", "crf"}));
  detect->add_option("--model", model_path);
  bool tag_affixal_tokens = false;
  detect->add_flag("--tag-affixal-tokens", tag_affixal_tokens,
                   "tag affixal cue hosts B-CUE instead of leaving them O");
  detect->add_option("--out", out_path)->required();

  std::string pred_path, pred_format = "jsonl", gold_path, gold_format = "two-col";
  SemConllOptions sem;
  auto* eval = app.add_subcommand("eval-cues", "cue-level precision/recall/F1");
  eval->add_option("--pred", pred_path)->required();
  eval->add_option("--pred-format", pred_format);
  eval->add_option("--gold", gold_path)->required();
  eval->add_option("--gold-format", gold_format);
  eval->add_option("--lang", lang);
  eval->add_option("--token-col", sem.token_column);
  eval->add_option("--cue-col", sem.cue_column);

  crf::TrainConfig tc;
  bool affixal_as_token = false;
  std::string train_format = "two-col";
  auto* train = app.add_subcommand("train-crf", "train the linear-chain CRF cue tagger");
  train->add_option("--train", train_flags, "lang=path (repeatable)")->required();
  train->add_option("--format", train_format)->check(CLI::IsMember({"two-col", "sem"}));
  train->add_option("--lexicon", lexicon_flags, "lang=path (repeatable)")->required();
  train->add_option("--epochs", tc.epochs);
  train->add_option("--learning-rate", tc.learning_rate);
  train->add_option("--l2", tc.l2);
  train->add_option("--seed", tc.seed);
  train->add_option("--batch-size", tc.batch_size);
  train->add_option("--lr-decay", tc.lr_decay);
  train->add_flag("--affixal-as-token", affixal_as_token);
  train->add_option("--out", out_path)->required();

  auto* analyze = app.add_subcommand("analyze", "negation-type / direction report over AfinPairs");
  analyze->add_option("--in", in_path)->required();
  analyze->add_option("--stats", stats_path, "build_stats.json for yield percentages");
  analyze->add_option("--json", json_out);

  auto* nli = app.add_subcommand("derive-nli", "two entailment examples per pair");
  nli->add_option("--in", in_path)->required();
  nli->add_option("--out", out_path)->required();
  nli->add_option("--format", format)->check(CLI::IsMember({"tsv", "jsonl"}));

  int m = 1, n = 3, k = 2;
  double factor = 0.5;
  uint64_t n_ours = 0, n_target = 0, seed = 0;
  std::string decay = "geometric", plan_out, aux_ids_path, manifests_out;
  auto* plan = app.add_subcommand("plan-blend", "three-phase blending curriculum");
  plan->add_option("--m", m);
  plan->add_option("--n", n);
  plan->add_option("--k", k);
  plan->add_option("--factor", factor);
  plan->add_option("--n-ours", n_ours)->required();
  plan->add_option("--n-target", n_target);
  plan->add_option("--seed", seed);
  plan->add_option("--decay", decay)->check(CLI::IsMember({"geometric", "linear"}));
  plan->add_option("--out", plan_out);
  plan->add_option("--aux-ids", aux_ids_path);
  plan->add_option("--manifests", manifests_out);

  std::string generator_kind = "lookup", generator_fixture, generator_host;
  int generator_port = 80;
  std::string separator = "[SEP]", importance_path;
  auto* route_cmd = app.add_subcommand("route", "negation-routed classifier inputs");
  route_cmd->add_option("--in", in_path, "TSV of id<TAB>text")->required();
  route_cmd->add_option("--lexicon", lexicon_flags, "lang=path (repeatable)")->required();
  route_cmd->add_option("--generator", generator_kind)
      ->check(CLI::IsMember({"lookup", "http", "cue-deletion"}));
  route_cmd->add_option("--generator-fixture", generator_fixture);
  route_cmd->add_option("--generator-host", generator_host);
  route_cmd->add_option("--generator-port", generator_port);
  route_cmd->add_option("--separator", separator);
  route_cmd->add_option("--lang", lang);
  route_cmd->add_option("--out", out_path)->required();
  route_cmd->add_option("--format", format)->check(CLI::IsMember({"tsv", "jsonl"}));
  route_cmd->add_option("--importance", importance_path);

  std::string cand_path, ref_path;
  auto* score = app.add_subcommand("score-gen", "BLEU-2 and chrF++ over aligned files");
  score->add_option("--candidates", cand_path)->required();
  score->add_option("--references", ref_path)->required();
  score->add_option("--out", out_path);

  auto* validate = app.add_subcommand("validate-config", "check a pipeline config");
  validate->add_option("--config", config_path)->required();

  CLI11_PARSE(app, argc, argv);

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    if (ingest->parsed()) return run_ingest(config_path, overrides);
    if (build->parsed()) return run_build_pairs(config_path, overrides);
    if (backtranslate->parsed()) return run_backtranslate(config_path, in_path, out_path, overrides);
    if (detect->parsed()) {
      return run_detect(in_path, lang, lexicon_flags, detector_kind, model_path,
                        tag_affixal_tokens, out_path);
    }
    if (eval->parsed()) {
      return run_eval_cues(pred_path, pred_format, gold_path, gold_format, lang, sem);
    }
    if (train->parsed()) {
      return run_train_crf(train_flags, train_format, lexicon_flags, tc, affixal_as_token, out_path);
    }
    if (analyze->parsed()) return run_analyze(in_path, stats_path, json_out);
    if (nli->parsed()) return run_derive_nli(in_path, out_path, format);
    if (plan->parsed()) {
      return run_plan_blend(m, n, k, factor, n_ours, n_target, seed, decay, plan_out, aux_ids_path,
                            manifests_out);
    }
    if (route_cmd->parsed()) {
      return run_route(in_path, lexicon_flags, generator_kind, generator_fixture, generator_host,
                       generator_port, separator, lang, out_path, format, importance_path);
    }
    if (score->parsed()) return run_score_gen(cand_path, ref_path, out_path);
    if (validate->parsed()) {
      const auto diags = validate_config_file(config_path);
      json arr = json::array();
      for (const auto& d : diags) arr.push_back(json{{"field", d.field}, {"message", d.message}});
      std::cout << json{{"diagnostics", arr}}.dump(2) << '\n';
      return diags.empty() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"subcommand", subcommand}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
  return 0;
}
