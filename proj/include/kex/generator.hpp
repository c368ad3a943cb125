#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "kex/graph.hpp"
#include "kex/rng.hpp"

namespace kex {

// Saidman-style pool generator: US blood-type frequencies, a three-bucket PRA
// distribution, uniform profiles. Every weight vector must sum to one.
struct GeneratorConfig {
  std::array<double, 4> blood_freq = {0.4814, 0.3373, 0.1428, 0.0385};  // O, A, B, AB
  std::vector<std::pair<double, double>> pra_buckets = {
      {0.05, 0.7019}, {0.45, 0.20}, {0.90, 0.0981}};  // (pra, probability)
  std::array<double, 8> profile_weights = {0.125, 0.125, 0.125, 0.125,
                                           0.125, 0.125, 0.125, 0.125};
  bool pra_enabled = true;
  int max_attempts = 1000;

  void validate() const {
    auto check_sum = [](double sum, const char* what) {
      if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError(std::string(what) + " weights must sum to 1, got " +
                          format_g9(sum));
    };
    double s = 0.0;
    for (double f : blood_freq) {
      if (f < 0.0) throw ConfigError("negative blood-type frequency");
      s += f;
    }
    check_sum(s, "blood-type");
    s = 0.0;
    for (const auto& [pra, prob] : pra_buckets) {
      if (pra < 0.0 || pra > 1.0) throw ConfigError("PRA outside [0,1]");
      if (prob < 0.0) throw ConfigError("negative PRA bucket probability");
      s += prob;
    }
    check_sum(s, "PRA bucket");
    s = 0.0;
    for (double w : profile_weights) {
      if (w < 0.0) throw ConfigError("negative profile weight");
      s += w;
    }
    check_sum(s, "profile");
    if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  }
};

namespace detail {

template <class Rng>
BloodType draw_blood(Rng& g, const GeneratorConfig& cfg) {
  return kAllBloodTypes[categorical(g, std::span<const double>(cfg.blood_freq))];
}

template <class Rng>
double draw_pra(Rng& g, const GeneratorConfig& cfg) {
  std::vector<double> probs;
  probs.reserve(cfg.pra_buckets.size());
  for (const auto& b : cfg.pra_buckets) probs.push_back(b.second);
  return cfg.pra_buckets[categorical(g, std::span<const double>(probs))].first;
}

}  // namespace detail

// Draws pairs until one is internally incompatible: either the donor cannot
// give to their own patient by blood type, or the internal crossmatch fails
// (tried twice per draw). A pair that stays compatible is discarded; after
// max_attempts the last draw is kept and flagged incompatible by fiat, which
// also covers configs where no incompatibility can ever arise.
template <class Rng>
PatientDonorPair generate_pair(Rng& rng, const GeneratorConfig& cfg,
                               std::int64_t pair_id, int arrival_day) {
  cfg.validate();
  PatientDonorPair p;
  p.pair_id = pair_id;
  p.arrival_day = arrival_day;
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    p.donor_blood = detail::draw_blood(rng, cfg);
    p.patient_blood = detail::draw_blood(rng, cfg);
    p.patient_pra = detail::draw_pra(rng, cfg);
    p.profile = PatientProfile::from_id(
        1 + static_cast<int>(categorical(
                rng, std::span<const double>(cfg.profile_weights))));
    if (!blood_compatible(p.donor_blood, p.patient_blood)) {
      p.internal_incompat = IncompatReason::BloodIncompatible;
      return p;
    }
    if (cfg.pra_enabled) {
      if (bernoulli(rng, p.patient_pra) || bernoulli(rng, p.patient_pra)) {
        p.internal_incompat = IncompatReason::CrossmatchFailed;
        return p;
      }
    }
  }
  p.internal_incompat = IncompatReason::Forced;
  return p;
}

}  // namespace kex
