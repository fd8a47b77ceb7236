#include "negaff/blend_plan.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "negaff/error.hpp"
#include "negaff/rng.hpp"

namespace negaff {

using nlohmann::json;

std::string to_string(DecayLaw law) {
  return law == DecayLaw::geometric ? "geometric" : "linear";
}

DecayLaw decay_law_from_string(const std::string& s) {
  if (s == "geometric") return DecayLaw::geometric;
  if (s == "linear") return DecayLaw::linear;
  fail("unknown decay law: " + s);
}

void to_json(json& j, const BlendPlan& p) {
  j = json{{"m", p.m},
           {"n", p.n},
           {"k", p.k},
           {"blend_factor", p.blend_factor},
           {"n_ours", p.n_ours},
           {"n_target", p.n_target},
           {"per_epoch_aux_counts", p.per_epoch_aux_counts},
           {"seed", p.seed},
           {"decay", to_string(p.decay)}};
}

void from_json(const json& j, BlendPlan& p) {
  j.at("m").get_to(p.m);
  j.at("n").get_to(p.n);
  j.at("k").get_to(p.k);
  j.at("blend_factor").get_to(p.blend_factor);
  j.at("n_ours").get_to(p.n_ours);
  j.at("n_target").get_to(p.n_target);
  j.at("per_epoch_aux_counts").get_to(p.per_epoch_aux_counts);
  j.at("seed").get_to(p.seed);
  p.decay = decay_law_from_string(j.value("decay", "geometric"));
}

BlendPlan make_plan(int m, int n, int k, double blend_factor, uint64_t n_ours, uint64_t n_target,
                    uint64_t seed, DecayLaw decay) {
  if (m < 0 || n < 0 || k < 0) fail("make_plan: phase lengths must be >= 0");
  if (!(blend_factor >= 0.0 && blend_factor <= 1.0)) {
    fail("make_plan: blend_factor must lie in [0, 1]");
  }
  BlendPlan plan;
  plan.m = m;
  plan.n = n;
  plan.k = k;
  plan.blend_factor = blend_factor;
  plan.n_ours = n_ours;
  plan.n_target = n_target;
  plan.seed = seed;
  plan.decay = decay;
  plan.per_epoch_aux_counts.reserve(static_cast<size_t>(m + n + k));
  for (int e = 0; e < m; ++e) plan.per_epoch_aux_counts.push_back(n_ours);
  for (int i = 1; i <= n; ++i) {
    double fraction;
    if (decay == DecayLaw::geometric) {
      fraction = std::pow(blend_factor, i);
    } else {
      fraction = std::max(0.0, 1.0 - static_cast<double>(i) * (1.0 - blend_factor));
    }
    plan.per_epoch_aux_counts.push_back(
        static_cast<uint64_t>(std::llround(static_cast<double>(n_ours) * fraction)));
  }
  for (int e = 0; e < k; ++e) plan.per_epoch_aux_counts.push_back(0);
  return plan;
}

void to_json(json& j, const EpochManifest& m) {
  j = json{{"epoch", m.epoch}, {"aux_ids", m.aux_ids}, {"include_target", m.include_target}};
}

void from_json(const json& j, EpochManifest& m) {
  j.at("epoch").get_to(m.epoch);
  j.at("aux_ids").get_to(m.aux_ids);
  j.at("include_target").get_to(m.include_target);
}

std::vector<EpochManifest> emit_manifests(const BlendPlan& plan,
                                          const std::vector<std::string>& aux_ids) {
  if (aux_ids.size() != plan.n_ours) {
    fail("emit_manifests: universe has " + std::to_string(aux_ids.size()) + " ids but plan expects " +
         std::to_string(plan.n_ours));
  }
  std::vector<std::string> universe = aux_ids;
  std::sort(universe.begin(), universe.end());
  if (std::adjacent_find(universe.begin(), universe.end()) != universe.end()) {
    fail("emit_manifests: duplicate ids in auxiliary universe");
  }

  std::vector<EpochManifest> manifests;
  manifests.reserve(plan.per_epoch_aux_counts.size());
  for (size_t e = 0; e < plan.per_epoch_aux_counts.size(); ++e) {
    const size_t count = static_cast<size_t>(plan.per_epoch_aux_counts[e]);
    EpochManifest m;
    m.epoch = e;
    if (count > 0) {
      std::vector<std::string> pool = universe;
      std::mt19937_64 rng(plan.seed + e);
      partial_shuffle(pool, count, rng);
      m.aux_ids.assign(pool.begin(), pool.begin() + static_cast<ptrdiff_t>(count));
      std::sort(m.aux_ids.begin(), m.aux_ids.end());
    }
    manifests.push_back(std::move(m));
  }
  return manifests;
}

std::string plan_table(const BlendPlan& plan) {
  std::ostringstream out;
  out << std::left << std::setw(7) << "epoch" << std::setw(8) << "phase" << std::right
      << std::setw(12) << "aux" << std::setw(12) << "target" << std::setw(12) << "total" << '\n';
  for (size_t e = 0; e < plan.per_epoch_aux_counts.size(); ++e) {
    const char* phase = e < static_cast<size_t>(plan.m)             ? "warm"
                        : e < static_cast<size_t>(plan.m + plan.n) ? "blend"
                                                                    : "target";
    const uint64_t aux = plan.per_epoch_aux_counts[e];
    out << std::left << std::setw(7) << e << std::setw(8) << phase << std::right << std::setw(12)
        << aux << std::setw(12) << plan.n_target << std::setw(12) << (aux + plan.n_target) << '\n';
  }
  return out.str();
}

}  // namespace negaff
