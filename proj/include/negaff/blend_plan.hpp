#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace negaff {

enum class DecayLaw { geometric, linear };
std::string to_string(DecayLaw law);
DecayLaw decay_law_from_string(const std::string& s);

// Three-phase blending curriculum: m epochs over the full auxiliary set
// plus the target split, n epochs with a shrinking auxiliary sample, and
// k target-only epochs.
struct BlendPlan {
  int m = 0;
  int n = 0;
  int k = 0;
  double blend_factor = 0.5;
  uint64_t n_ours = 0;
  uint64_t n_target = 0;
  std::vector<uint64_t> per_epoch_aux_counts;  // length m + n + k
  uint64_t seed = 0;
  DecayLaw decay = DecayLaw::geometric;
};

void to_json(nlohmann::json& j, const BlendPlan& p);
void from_json(const nlohmann::json& j, BlendPlan& p);

// Phase-2 epoch i in [1..n] gets round(n_ours * f^i) auxiliary instances
// under the geometric default; the linear law subtracts (1-f)*n_ours per
// epoch, floored at 0. Both are non-increasing for any f in [0,1] and
// hit the f=0 (all zero) and f=1 (all n_ours) endpoints.
BlendPlan make_plan(int m, int n, int k, double blend_factor, uint64_t n_ours, uint64_t n_target,
                    uint64_t seed, DecayLaw decay = DecayLaw::geometric);

struct EpochManifest {
  uint64_t epoch = 0;
  std::vector<std::string> aux_ids;  // canonical (sorted) order
  bool include_target = true;
};

void to_json(nlohmann::json& j, const EpochManifest& m);
void from_json(const nlohmann::json& j, EpochManifest& m);

// Epoch e samples per_epoch_aux_counts[e] ids without replacement, reseeded
// with seed+e, so any single epoch is replayable in isolation.
std::vector<EpochManifest> emit_manifests(const BlendPlan& plan,
                                          const std::vector<std::string>& aux_ids);

std::string plan_table(const BlendPlan& plan);

}  // namespace negaff
