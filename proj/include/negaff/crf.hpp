#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "negaff/cue_detect.hpp"
#include "negaff/lexicon.hpp"

namespace negaff::crf {

// Label order is part of the model contract: O first makes the all-zero
// model decode to all-O under lowest-index tie-breaking.
inline constexpr int kNumLabels = 3;
inline const std::array<std::string, 3> kLabelNames = {"O", "B-CUE", "I-CUE"};

int label_id(const std::string& tag);

struct TrainingMeta {
  int epochs_run = 0;
  double final_objective = 0.0;
};

// Linear-chain CRF over sparse indicator features: the score of a tag
// sequence y is sum_t emission(F_t, y_t) + sum_{t>0} transition(y_{t-1}, y_t).
struct Model {
  std::vector<std::string> labels{kLabelNames.begin(), kLabelNames.end()};
  std::vector<std::string> feature_names;              // column order
  std::unordered_map<std::string, int> feature_index;  // name -> column
  Eigen::MatrixXd emission;    // |features| x |labels|
  Eigen::MatrixXd transition;  // |labels| x |labels|
  double l2 = 0.0;
  TrainingMeta meta;
  std::string lexicon_hash;

  int feature_id(const std::string& name) const;
  void rebuild_index();
};

// Feature ids active at each position; unknown features are dropped at
// encode time.
using FeatureIds = std::vector<std::vector<int>>;

// Hand-crafted feature templates standing in for a contextual encoder:
// bias, lowercased token, shape, 3/4-codepoint prefix/suffix, lexicon
// membership flags, and lowercased neighbor tokens.
std::vector<std::string> featurize(const std::vector<std::string>& tokens, size_t position,
                                   const CueLexicon& lexicon);

FeatureIds encode(const Model& model,
                  const std::vector<std::vector<std::string>>& feature_names);

// Per-position label scores; row t is the emission score vector at t.
Eigen::MatrixXd emission_scores(const Model& model, const FeatureIds& features);

double sequence_score(const Model& model, const FeatureIds& features,
                      const std::vector<int>& labels);

// log sum over all |labels|^n sequences of exp(score), by the forward
// recursion in log space.
double log_partition(const Model& model, const FeatureIds& features);

struct ViterbiResult {
  std::vector<int> labels;
  double score = 0.0;
};

// Argmax sequence with its unnormalized score; ties break toward the
// lowest label index at every backpointer and at the final position.
ViterbiResult viterbi(const Model& model, const FeatureIds& features);

// Per-position label posteriors from forward-backward; rows sum to 1.
Eigen::MatrixXd marginals(const Model& model, const FeatureIds& features);

struct Example {
  FeatureIds features;
  std::vector<int> labels;
};

// Objective sum_i NLL_i + (l2/2)*||theta||^2 over `examples`, with its exact
// gradient (expected feature counts minus empirical counts).
double nll_and_gradient(const Model& model, const std::vector<Example>& examples,
                        Eigen::MatrixXd& grad_emission, Eigen::MatrixXd& grad_transition);

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  uint64_t seed = 42;
  int batch_size = 8;
  double lr_decay = 10.0;  // lr_e = learning_rate / (1 + e / lr_decay)
};

struct TrainSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;  // BIO gold
  std::string lang;
};

// Mini-batch gradient descent on the regularized NLL, jointly over all
// languages present in `data`. Fixed seed gives bit-identical weights.
Model train(const std::vector<TrainSentence>& data,
            const std::map<std::string, CueLexicon>& lexicons, const TrainConfig& config);

double token_accuracy(const Model& model, const std::vector<TrainSentence>& data,
                      const std::map<std::string, CueLexicon>& lexicons);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace negaff::crf

namespace negaff {

class CrfDetector final : public Detector {
 public:
  CrfDetector(crf::Model model, std::map<std::string, CueLexicon> lexicons);

  TaggedSentence tag(std::string_view sentence, std::string_view lang) const override;
  std::vector<std::string> supported_langs() const override;

 private:
  crf::Model model_;
  std::map<std::string, CueLexicon> lexicons_;
};

}  // namespace negaff
