#include "negaff/crf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "negaff/error.hpp"
#include "negaff/rng.hpp"
#include "negaff/unicode.hpp"

namespace negaff::crf {

using nlohmann::json;

int label_id(const std::string& tag) {
  for (int l = 0; l < kNumLabels; ++l) {
    if (kLabelNames[static_cast<size_t>(l)] == tag) return l;
  }
  fail("unknown BIO tag: " + tag);
}

int Model::feature_id(const std::string& name) const {
  auto it = feature_index.find(name);
  return it == feature_index.end() ? -1 : it->second;
}

void Model::rebuild_index() {
  feature_index.clear();
  feature_index.reserve(feature_names.size());
  for (size_t i = 0; i < feature_names.size(); ++i) {
    feature_index.emplace(feature_names[i], static_cast<int>(i));
  }
}

namespace {

std::string token_shape(const std::string& token) {
  std::string shape;
  size_t pos = 0;
  while (pos < token.size()) {
    const char32_t cp = uni::decode(token, pos);
    if (cp >= U'0' && cp <= U'9') {
      shape += 'd';
    } else if (uni::to_lower(cp) != cp) {
      shape += 'X';
    } else if ((cp >= U'a' && cp <= U'z') || (cp >= 0x80 && !uni::is_punct(cp))) {
      shape += 'x';
    } else {
      shape += 'c';
    }
  }
  return shape;
}

bool in_multiword(const std::string& low, const CueLexicon& lex) {
  for (const auto& seq : lex.multiword) {
    for (const auto& w : seq) {
      if (w == low) return true;
    }
  }
  return false;
}

double logsumexp3(double a, double b, double c) {
  const double m = std::max(a, std::max(b, c));
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

}  // namespace

std::vector<std::string> featurize(const std::vector<std::string>& tokens, size_t position,
                                   const CueLexicon& lexicon) {
  if (position >= tokens.size()) fail("featurize position out of range");
  const std::string& tok = tokens[position];
  const std::string low = uni::lower(tok);
  const size_t cps = uni::length(low);

  std::vector<std::string> feats;
  feats.reserve(12);
  feats.push_back("bias");
  feats.push_back("lower=" + low);
  feats.push_back("shape=" + token_shape(tok));
  if (cps >= 3) feats.push_back("prefix3=" + uni::prefix(low, 3));
  if (cps >= 4) feats.push_back("prefix4=" + uni::prefix(low, 4));
  if (cps >= 3) feats.push_back("suffix3=" + uni::suffix(low, 3));
  if (cps >= 4) feats.push_back("suffix4=" + uni::suffix(low, 4));
  if (lexicon.single_tokens.count(low)) feats.push_back("lex:single_token");
  if (lexicon.lexicalized.count(low)) feats.push_back("lex:lexicalized");
  if (in_multiword(low, lexicon)) feats.push_back("lex:multiword_part");
  if (auto affix = find_negation_affix(low, lexicon)) {
    feats.push_back(affix->first == AffixSide::prefix ? "lex:neg_prefix" : "lex:neg_suffix");
  }
  feats.push_back("prev=" + (position > 0 ? uni::lower(tokens[position - 1]) : std::string("<s>")));
  feats.push_back("next=" +
                  (position + 1 < tokens.size() ? uni::lower(tokens[position + 1]) : std::string("</s>")));
  return feats;
}

FeatureIds encode(const Model& model, const std::vector<std::vector<std::string>>& feature_names) {
  FeatureIds ids(feature_names.size());
  for (size_t t = 0; t < feature_names.size(); ++t) {
    for (const auto& name : feature_names[t]) {
      const int id = model.feature_id(name);
      if (id >= 0) ids[t].push_back(id);
    }
  }
  return ids;
}

Eigen::MatrixXd emission_scores(const Model& model, const FeatureIds& features) {
  const auto n = static_cast<Eigen::Index>(features.size());
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, kNumLabels);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (const int f : features[static_cast<size_t>(t)]) {
      scores.row(t) += model.emission.row(f);
    }
  }
  return scores;
}

double sequence_score(const Model& model, const FeatureIds& features,
                      const std::vector<int>& labels) {
  if (features.size() != labels.size()) fail("sequence_score: length mismatch");
  const Eigen::MatrixXd e = emission_scores(model, features);
  double score = 0.0;
  for (size_t t = 0; t < labels.size(); ++t) {
    score += e(static_cast<Eigen::Index>(t), labels[t]);
    if (t > 0) score += model.transition(labels[t - 1], labels[t]);
  }
  return score;
}

namespace {

Eigen::MatrixXd forward(const Model& model, const Eigen::MatrixXd& e) {
  const Eigen::Index n = e.rows();
  Eigen::MatrixXd alpha(n, kNumLabels);
  alpha.row(0) = e.row(0);
  for (Eigen::Index t = 1; t < n; ++t) {
    for (int l = 0; l < kNumLabels; ++l) {
      alpha(t, l) = logsumexp3(alpha(t - 1, 0) + model.transition(0, l),
                               alpha(t - 1, 1) + model.transition(1, l),
                               alpha(t - 1, 2) + model.transition(2, l)) +
                    e(t, l);
    }
  }
  return alpha;
}

Eigen::MatrixXd backward(const Model& model, const Eigen::MatrixXd& e) {
  const Eigen::Index n = e.rows();
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(n, kNumLabels);
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    for (int l = 0; l < kNumLabels; ++l) {
      beta(t, l) = logsumexp3(model.transition(l, 0) + e(t + 1, 0) + beta(t + 1, 0),
                              model.transition(l, 1) + e(t + 1, 1) + beta(t + 1, 1),
                              model.transition(l, 2) + e(t + 1, 2) + beta(t + 1, 2));
    }
  }
  return beta;
}

}  // namespace

double log_partition(const Model& model, const FeatureIds& features) {
  if (features.empty()) fail("log_partition: empty sequence");
  const Eigen::MatrixXd e = emission_scores(model, features);
  const Eigen::MatrixXd alpha = forward(model, e);
  const Eigen::Index last = alpha.rows() - 1;
  return logsumexp3(alpha(last, 0), alpha(last, 1), alpha(last, 2));
}

ViterbiResult viterbi(const Model& model, const FeatureIds& features) {
  if (features.empty()) fail("viterbi: empty sequence");
  const Eigen::MatrixXd e = emission_scores(model, features);
  const Eigen::Index n = e.rows();
  Eigen::MatrixXd delta(n, kNumLabels);
  Eigen::MatrixXi back(n, kNumLabels);
  delta.row(0) = e.row(0);
  back.row(0).setZero();
  for (Eigen::Index t = 1; t < n; ++t) {
    for (int l = 0; l < kNumLabels; ++l) {
      int arg = 0;
      double best = delta(t - 1, 0) + model.transition(0, l);
      for (int a = 1; a < kNumLabels; ++a) {
        const double s = delta(t - 1, a) + model.transition(a, l);
        if (s > best) {  // strict: ties keep the lowest label index
          best = s;
          arg = a;
        }
      }
      delta(t, l) = best + e(t, l);
      back(t, l) = arg;
    }
  }
  ViterbiResult result;
  int l = 0;
  for (int a = 1; a < kNumLabels; ++a) {
    if (delta(n - 1, a) > delta(n - 1, l)) l = a;
  }
  result.score = delta(n - 1, l);
  result.labels.assign(static_cast<size_t>(n), 0);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    result.labels[static_cast<size_t>(t)] = l;
    l = back(t, l);
  }
  return result;
}

Eigen::MatrixXd marginals(const Model& model, const FeatureIds& features) {
  if (features.empty()) fail("marginals: empty sequence");
  const Eigen::MatrixXd e = emission_scores(model, features);
  const Eigen::MatrixXd alpha = forward(model, e);
  const Eigen::MatrixXd beta = backward(model, e);
  const Eigen::Index last = alpha.rows() - 1;
  const double log_z = logsumexp3(alpha(last, 0), alpha(last, 1), alpha(last, 2));
  Eigen::MatrixXd m(alpha.rows(), kNumLabels);
  for (Eigen::Index t = 0; t < alpha.rows(); ++t) {
    for (int l = 0; l < kNumLabels; ++l) {
      m(t, l) = std::exp(alpha(t, l) + beta(t, l) - log_z);
    }
  }
  return m;
}

namespace {

// NLL of one example, gradient accumulated in place.
double accumulate_example(const Model& model, const Example& ex, Eigen::MatrixXd& grad_emission,
                          Eigen::MatrixXd& grad_transition) {
  const auto n = static_cast<Eigen::Index>(ex.features.size());
  if (n == 0) fail("crf gradient: empty example");
  const Eigen::MatrixXd e = emission_scores(model, ex.features);
  const Eigen::MatrixXd alpha = forward(model, e);
  const Eigen::MatrixXd beta = backward(model, e);
  const double log_z = logsumexp3(alpha(n - 1, 0), alpha(n - 1, 1), alpha(n - 1, 2));

  double gold = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    gold += e(t, ex.labels[static_cast<size_t>(t)]);
    if (t > 0) {
      gold += model.transition(ex.labels[static_cast<size_t>(t - 1)], ex.labels[static_cast<size_t>(t)]);
    }
  }

  for (Eigen::Index t = 0; t < n; ++t) {
    const int y = ex.labels[static_cast<size_t>(t)];
    for (int l = 0; l < kNumLabels; ++l) {
      const double p = std::exp(alpha(t, l) + beta(t, l) - log_z);
      const double diff = p - (l == y ? 1.0 : 0.0);
      for (const int f : ex.features[static_cast<size_t>(t)]) {
        grad_emission(f, l) += diff;
      }
    }
    if (t > 0) {
      const int y_prev = ex.labels[static_cast<size_t>(t - 1)];
      for (int a = 0; a < kNumLabels; ++a) {
        for (int b = 0; b < kNumLabels; ++b) {
          const double p =
              std::exp(alpha(t - 1, a) + model.transition(a, b) + e(t, b) + beta(t, b) - log_z);
          grad_transition(a, b) += p - ((a == y_prev && b == y) ? 1.0 : 0.0);
        }
      }
    }
  }
  return log_z - gold;
}

}  // namespace

double nll_and_gradient(const Model& model, const std::vector<Example>& examples,
                        Eigen::MatrixXd& grad_emission, Eigen::MatrixXd& grad_transition) {
  grad_emission = Eigen::MatrixXd::Zero(model.emission.rows(), kNumLabels);
  grad_transition = Eigen::MatrixXd::Zero(kNumLabels, kNumLabels);
  double nll = 0.0;
  for (const auto& ex : examples) {
    nll += accumulate_example(model, ex, grad_emission, grad_transition);
  }
  nll += 0.5 * model.l2 * (model.emission.squaredNorm() + model.transition.squaredNorm());
  grad_emission += model.l2 * model.emission;
  grad_transition += model.l2 * model.transition;
  return nll;
}

namespace {

const CueLexicon& lexicon_for(const std::map<std::string, CueLexicon>& lexicons,
                              const std::string& lang) {
  auto it = lexicons.find(lang);
  if (it == lexicons.end()) fail("no lexicon for training language '" + lang + "'");
  return it->second;
}

}  // namespace

Model train(const std::vector<TrainSentence>& data,
            const std::map<std::string, CueLexicon>& lexicons, const TrainConfig& config) {
  if (data.empty()) fail("crf training requires a non-empty dataset");
  if (config.epochs < 0) fail("crf training: epochs must be >= 0");
  if (config.batch_size < 1) fail("crf training: batch_size must be >= 1");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    fail("crf training: learning_rate must be positive and finite");
  }
  if (!(config.lr_decay > 0.0)) fail("crf training: lr_decay must be positive");
  if (config.l2 < 0.0) fail("crf training: l2 must be >= 0");

  Model model;
  model.l2 = config.l2;

  // First pass: feature universe in first-occurrence order, gold label ids.
  std::vector<Example> examples(data.size());
  std::vector<std::vector<std::vector<std::string>>> names(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    if (s.tokens.empty()) fail("crf training: sentence " + std::to_string(i) + " is empty");
    if (s.tokens.size() != s.tags.size()) {
      fail("crf training: sentence " + std::to_string(i) + " has " + std::to_string(s.tokens.size()) +
           " tokens but " + std::to_string(s.tags.size()) + " tags");
    }
    if (!bio_valid(s.tags)) fail("crf training: sentence " + std::to_string(i) + " has invalid BIO tags");
    const CueLexicon& lex = lexicon_for(lexicons, s.lang);
    names[i].resize(s.tokens.size());
    examples[i].labels.reserve(s.tags.size());
    for (const auto& tag : s.tags) examples[i].labels.push_back(label_id(tag));
    for (size_t t = 0; t < s.tokens.size(); ++t) {
      names[i][t] = featurize(s.tokens, t, lex);
      for (const auto& f : names[i][t]) {
        if (!model.feature_index.count(f)) {
          model.feature_index.emplace(f, static_cast<int>(model.feature_names.size()));
          model.feature_names.push_back(f);
        }
      }
    }
  }
  for (size_t i = 0; i < data.size(); ++i) {
    examples[i].features.resize(names[i].size());
    for (size_t t = 0; t < names[i].size(); ++t) {
      for (const auto& f : names[i][t]) {
        examples[i].features[t].push_back(model.feature_index.at(f));
      }
    }
  }

  const auto n_features = static_cast<Eigen::Index>(model.feature_names.size());
  model.emission = Eigen::MatrixXd::Zero(n_features, kNumLabels);
  model.transition = Eigen::MatrixXd::Zero(kNumLabels, kNumLabels);

  const size_t n_examples = examples.size();
  const auto batch_size = static_cast<size_t>(config.batch_size);
  std::vector<size_t> order(n_examples);
  for (size_t i = 0; i < n_examples; ++i) order[i] = i;

  Eigen::MatrixXd grad_e, grad_t;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::mt19937_64 rng(config.seed + static_cast<uint64_t>(epoch));
    partial_shuffle(order, order.size(), rng);
    const double lr = config.learning_rate / (1.0 + static_cast<double>(epoch) / config.lr_decay);

    for (size_t start = 0; start < n_examples; start += batch_size) {
      const size_t stop = std::min(n_examples, start + batch_size);
      grad_e = Eigen::MatrixXd::Zero(n_features, kNumLabels);
      grad_t = Eigen::MatrixXd::Zero(kNumLabels, kNumLabels);
      double obj = 0.0;
      for (size_t i = start; i < stop; ++i) {
        obj += accumulate_example(model, examples[order[i]], grad_e, grad_t);
      }
      // L2 scaled so one full epoch applies the regularizer exactly once.
      const double l2_scaled = config.l2 * static_cast<double>(stop - start) / static_cast<double>(n_examples);
      obj += 0.5 * l2_scaled * (model.emission.squaredNorm() + model.transition.squaredNorm());
      grad_e += l2_scaled * model.emission;
      grad_t += l2_scaled * model.transition;
      if (!std::isfinite(obj)) {
        fail("crf training diverged: non-finite objective at epoch " + std::to_string(epoch) +
             " (learning rate too high?)");
      }
      model.emission -= lr * grad_e;
      model.transition -= lr * grad_t;
    }
    model.meta.epochs_run = epoch + 1;
  }

  model.meta.final_objective = nll_and_gradient(model, examples, grad_e, grad_t);
  if (!std::isfinite(model.meta.final_objective)) {
    fail("crf training diverged: non-finite final objective");
  }
  return model;
}

double token_accuracy(const Model& model, const std::vector<TrainSentence>& data,
                      const std::map<std::string, CueLexicon>& lexicons) {
  uint64_t correct = 0, total = 0;
  for (const auto& s : data) {
    const CueLexicon& lex = lexicon_for(lexicons, s.lang);
    std::vector<std::vector<std::string>> names(s.tokens.size());
    for (size_t t = 0; t < s.tokens.size(); ++t) names[t] = featurize(s.tokens, t, lex);
    const auto decoded = viterbi(model, encode(model, names));
    for (size_t t = 0; t < s.tags.size(); ++t) {
      total += 1;
      if (kLabelNames[static_cast<size_t>(decoded.labels[t])] == s.tags[t]) correct += 1;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

void save_model(const Model& model, const std::string& path) {
  json em = json::array();
  for (Eigen::Index f = 0; f < model.emission.rows(); ++f) {
    em.push_back({model.emission(f, 0), model.emission(f, 1), model.emission(f, 2)});
  }
  json tr = json::array();
  for (int a = 0; a < kNumLabels; ++a) {
    tr.push_back({model.transition(a, 0), model.transition(a, 1), model.transition(a, 2)});
  }
  const json j{{"format_version", 1},
               {"labels", model.labels},
               {"features", model.feature_names},
               {"emission_weights", em},
               {"transition_weights", tr},
               {"l2", model.l2},
               {"training_meta",
                {{"epochs_run", model.meta.epochs_run}, {"final_objective", model.meta.final_objective}}},
               {"lexicon_hash", model.lexicon_hash}};
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write model file: " + path);
  out << j.dump(2) << '\n';
  if (!out) fail("model write failed: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(path + ": " + e.what());
  }
  if (j.value("format_version", 0) != 1) fail(path + ": unsupported model format_version");
  Model model;
  j.at("labels").get_to(model.labels);
  if (model.labels != std::vector<std::string>(kLabelNames.begin(), kLabelNames.end())) {
    fail(path + ": unexpected label set/order");
  }
  j.at("features").get_to(model.feature_names);
  model.rebuild_index();
  const auto& em = j.at("emission_weights");
  if (em.size() != model.feature_names.size()) fail(path + ": emission row count mismatch");
  model.emission.resize(static_cast<Eigen::Index>(em.size()), kNumLabels);
  for (size_t f = 0; f < em.size(); ++f) {
    for (int l = 0; l < kNumLabels; ++l) {
      model.emission(static_cast<Eigen::Index>(f), l) = em[f][static_cast<size_t>(l)].get<double>();
    }
  }
  const auto& tr = j.at("transition_weights");
  model.transition.resize(kNumLabels, kNumLabels);
  for (int a = 0; a < kNumLabels; ++a) {
    for (int b = 0; b < kNumLabels; ++b) {
      model.transition(a, b) = tr[static_cast<size_t>(a)][static_cast<size_t>(b)].get<double>();
    }
  }
  if (!model.emission.allFinite() || !model.transition.allFinite()) {
    fail(path + ": model weights contain non-finite values");
  }
  model.l2 = j.value("l2", 0.0);
  if (j.contains("training_meta")) {
    model.meta.epochs_run = j["training_meta"].value("epochs_run", 0);
    model.meta.final_objective = j["training_meta"].value("final_objective", 0.0);
  }
  model.lexicon_hash = j.value("lexicon_hash", "");
  return model;
}

}  // namespace negaff::crf

namespace negaff {

CrfDetector::CrfDetector(crf::Model model, std::map<std::string, CueLexicon> lexicons)
    : model_(std::move(model)), lexicons_(std::move(lexicons)) {}

TaggedSentence CrfDetector::tag(std::string_view sentence, std::string_view lang) const {
  auto it = lexicons_.find(std::string(lang));
  if (it == lexicons_.end()) {
    std::string supported;
    for (const auto& [l, _] : lexicons_) {
      if (!supported.empty()) supported += ", ";
      supported += l;
    }
    fail("unsupported language '" + std::string(lang) + "' (supported: " + supported + ")");
  }
  TaggedSentence out;
  out.sentence = std::string(sentence);
  out.lang = std::string(lang);
  out.tokens = tokenize(sentence, lang);
  if (out.tokens.empty()) return out;

  std::vector<std::string> texts;
  texts.reserve(out.tokens.size());
  for (const auto& t : out.tokens) texts.push_back(t.text);
  std::vector<std::vector<std::string>> names(texts.size());
  for (size_t t = 0; t < texts.size(); ++t) names[t] = crf::featurize(texts, t, it->second);
  const auto decoded = crf::viterbi(model_, crf::encode(model_, names));
  out.tags.reserve(decoded.labels.size());
  for (const int l : decoded.labels) out.tags.push_back(crf::kLabelNames[static_cast<size_t>(l)]);
  out.cues = spans_from_tags(out.tokens, out.tags, &it->second);
  return out;
}

std::vector<std::string> CrfDetector::supported_langs() const {
  std::vector<std::string> langs;
  for (const auto& [lang, _] : lexicons_) langs.push_back(lang);
  return langs;
}

}  // namespace negaff
