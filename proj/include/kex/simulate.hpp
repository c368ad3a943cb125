#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kex/blp.hpp"
#include "kex/bt.hpp"
#include "kex/clearing.hpp"
#include "kex/cycles.hpp"
#include "kex/generator.hpp"
#include "kex/graph.hpp"
#include "kex/mvn.hpp"

namespace kex {

enum class Condition : std::uint8_t { Equal, Homogeneous, Heterogeneous };

// Stable tags, also used in per-run seed derivation.
constexpr int condition_tag(Condition c) { return static_cast<int>(c); }

inline constexpr std::array<Condition, 3> kAllConditions = {
    Condition::Equal, Condition::Homogeneous, Condition::Heterogeneous};

constexpr std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Equal: return "EQUAL";
    case Condition::Homogeneous: return "HOMOGENEOUS";
    case Condition::Heterogeneous: return "HETEROGENEOUS";
  }
  return "?";
}

inline Condition parse_condition(std::string_view s) {
  for (Condition c : kAllConditions)
    if (s == to_string(c)) return c;
  throw DataError("unknown condition: '" + std::string(s) + "'");
}

// Per-edge weight under a condition. EQUAL ignores profiles entirely;
// HOMOGENEOUS reads the recipient's BT score; HETEROGENEOUS reads the donor
// vertex's normalized sampled-utility weight for the recipient's profile.
inline double condition_edge_weight(Condition condition,
                                    const std::optional<BtScores>& bt_scores,
                                    const std::array<double, kNumProfiles>* donor_weights,
                                    int recipient_profile_id) {
  switch (condition) {
    case Condition::Equal:
      return 1.0;
    case Condition::Homogeneous:
      if (!bt_scores)
        throw ConfigError("HOMOGENEOUS weighting requires BT scores");
      return bt_scores->score[recipient_profile_id - 1];
    case Condition::Heterogeneous:
      if (donor_weights == nullptr)
        throw ConfigError("HETEROGENEOUS weighting requires the donor vertex's sampled utility");
      return (*donor_weights)[recipient_profile_id - 1];
  }
  throw ConfigError("unknown condition");
}

struct SimConfig {
  int horizon_days = 365;
  double arrival_rate = 1.0;     // expected new pairs per day (Poisson)
  double departure_rate = 0.005; // per-pair daily departure probability
  int cycle_cap = 3;
  Condition condition = Condition::Equal;
  std::optional<BtScores> bt_scores;  // required for HOMOGENEOUS
  MvnParams blp_params;               // betas are sampled in every condition
  std::uint64_t seed = 0;
  GeneratorConfig generator;
  bool gumbel_edge_noise = false;  // off by default; ranks always use noiseless scores

  void validate() const {
    if (horizon_days < 0) throw ConfigError("horizon_days must be >= 0");
    if (arrival_rate < 0.0) throw ConfigError("arrival_rate must be >= 0");
    if (departure_rate < 0.0 || departure_rate > 1.0)
      throw ConfigError("departure_rate must lie in [0,1]");
    if (cycle_cap < 2) throw ConfigError("cycle_cap must be >= 2");
    if (condition == Condition::Homogeneous && !bt_scores)
      throw ConfigError("HOMOGENEOUS condition requires bt_scores");
    generator.validate();
  }
};

struct RunMetrics {
  std::int64_t total_entered = 0;
  std::int64_t total_matched = 0;
  std::int64_t total_departed = 0;
  std::int64_t still_waiting = 0;
  std::array<std::int64_t, kNumProfiles> entered{};
  std::array<std::int64_t, kNumProfiles> matched{};
  std::vector<double> matching_ranks;  // mean donation rank per nonempty matching
  std::vector<int> per_day_matched;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

// Mean over matchings of the mean donation rank within each matching;
// absent when no donation ever happened.
inline std::optional<double> average_rank(const RunMetrics& m) {
  if (m.matching_ranks.empty()) return std::nullopt;
  double sum = 0.0;
  for (double r : m.matching_ranks) sum += r;
  return sum / static_cast<double>(m.matching_ranks.size());
}

// matched/entered per profile; profiles that never entered are absent.
inline std::array<std::optional<double>, kNumProfiles> proportion_matched(
    const RunMetrics& m) {
  std::array<std::optional<double>, kNumProfiles> out{};
  for (int p = 0; p < kNumProfiles; ++p)
    if (m.entered[p] > 0)
      out[p] = static_cast<double>(m.matched[p]) / static_cast<double>(m.entered[p]);
  return out;
}

struct DaySummary {
  int arrived = 0;
  int departed = 0;
  int matched = 0;
  std::optional<double> matching_avg_rank;
  Matching matching;
};

// One beta per arriving vertex, keyed on the beta substream and the pair id;
// drawn once and frozen for the vertex's lifetime, in every condition.
inline BetaSample assign_beta(std::int64_t pair_id, const MvnParams& blp_params,
                              std::uint64_t beta_stream_seed) {
  return sample_beta(blp_params, hash64(beta_stream_seed, static_cast<std::uint64_t>(pair_id)));
}

// Daily-matching simulation. Independent substreams are derived from the run
// seed per purpose, and every draw is keyed on (day and/or pair_id) rather
// than on pool state, so the arrival/departure schedule and each vertex's
// generated pair, beta and crossmatch draws are identical across conditions.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    gen_seed_ = hash64(cfg_.seed, 1);
    cm_seed_ = hash64(cfg_.seed, 2);
    beta_seed_ = hash64(cfg_.seed, 3);
    tie_seed_ = hash64(cfg_.seed, 4);
    dyn_seed_ = hash64(cfg_.seed, 5);
    noise_seed_ = hash64(cfg_.seed, 6);
    crossmatch_ = Crossmatch{cm_seed_, cfg_.generator.pra_enabled};
  }

  const SimConfig& config() const { return cfg_; }
  const CompatibilityGraph& graph() const { return graph_; }
  const std::map<std::int64_t, BetaSample>& betas() const { return betas_; }
  const RunMetrics& metrics() const { return metrics_; }
  int day() const { return day_; }

  // Test hook: place a specific pair into the pool (fixtures). Counts as
  // entered, gets a beta like any arrival.
  void inject_pair(const PatientDonorPair& pair) {
    admit(pair);
    next_pair_id_ = std::max(next_pair_id_, pair.pair_id + 1);
  }

  DaySummary step_day() {
    DaySummary summary;

    // arrivals
    SplitMix64 arrivals_rng(hash64(dyn_seed_, day_, 0));
    summary.arrived = poisson(arrivals_rng, cfg_.arrival_rate);
    for (int a = 0; a < summary.arrived; ++a) {
      const std::int64_t id = next_pair_id_++;
      SplitMix64 g(hash64(gen_seed_, id));
      admit(generate_pair(g, cfg_.generator, id, day_));
    }

    // departures, before matching: a pair cannot depart and match the same day
    std::vector<std::int64_t> departing;
    for (const auto& [id, pair] : graph_.vertices()) {
      SplitMix64 g(hash64(dyn_seed_, day_, 1, id));
      if (bernoulli(g, cfg_.departure_rate)) departing.push_back(id);
    }
    for (std::int64_t id : departing) {
      metrics_.total_departed += 1;
      drop(id);
    }
    summary.departed = static_cast<int>(departing.size());

    // clear the pool
    auto cycles = enumerate_cycles(graph_, cfg_.cycle_cap);
    if (!cycles.empty()) {
      const auto set = make_weighted_cycle_set(
          std::move(cycles), [&](std::int64_t u, std::int64_t v) { return edge_weight(u, v); });
      const int q = solve_max_cardinality(set, hash64(tie_seed_, day_, 0)).second;
      summary.matching = solve_weighted_with_floor(set, q, hash64(tie_seed_, day_, 1));

      double rank_sum = 0.0;
      int donations = 0;
      for (const Cycle& c : summary.matching.cycles) {
        for (std::size_t k = 0; k < c.verts.size(); ++k) {
          const std::int64_t u = c.verts[k];
          const std::int64_t v = c.verts[(k + 1) % c.verts.size()];
          rank_sum += profile_rank(betas_.at(u).beta, graph_.vertex(v).profile);
          ++donations;
        }
        for (std::int64_t v : c.verts) {
          metrics_.matched[graph_.vertex(v).profile.id - 1] += 1;
          metrics_.total_matched += 1;
        }
      }
      for (const Cycle& c : summary.matching.cycles)
        for (std::int64_t v : c.verts) drop(v);
      summary.matched = summary.matching.cardinality;
      if (donations > 0) {
        summary.matching_avg_rank = rank_sum / donations;
        metrics_.matching_ranks.push_back(*summary.matching_avg_rank);
      }
    }
    metrics_.per_day_matched.push_back(summary.matched);
    ++day_;

    // conservation at the day boundary
    metrics_.still_waiting = static_cast<std::int64_t>(graph_.size());
    if (metrics_.total_entered !=
        metrics_.total_matched + metrics_.total_departed + metrics_.still_waiting)
      throw NumericalError("entered/matched/departed/waiting conservation violated");

    return summary;
  }

  RunMetrics run() {
    while (day_ < cfg_.horizon_days) step_day();
    metrics_.still_waiting = static_cast<std::int64_t>(graph_.size());
    return metrics_;
  }

  double edge_weight(std::int64_t donor_vertex, std::int64_t recipient_vertex) const {
    const auto* donor_weights = cfg_.condition == Condition::Heterogeneous
                                    ? &het_weights_.at(donor_vertex)
                                    : nullptr;
    double w = condition_edge_weight(cfg_.condition, cfg_.bt_scores, donor_weights,
                                     graph_.vertex(recipient_vertex).profile.id);
    if (cfg_.gumbel_edge_noise && cfg_.condition == Condition::Heterogeneous) {
      // frozen per directed edge; standard Gumbel via inverse transform
      SplitMix64 g(hash64(noise_seed_, static_cast<std::uint64_t>(donor_vertex),
                          static_cast<std::uint64_t>(recipient_vertex)));
      const double u = (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;  // (0,1)
      w += -std::log(-std::log(u));
    }
    return w;
  }

 private:
  void admit(const PatientDonorPair& pair) {
    graph_.add_pair(pair, crossmatch_);
    const BetaSample beta = assign_beta(pair.pair_id, cfg_.blp_params, beta_seed_);
    betas_.emplace(pair.pair_id, beta);
    het_weights_.emplace(pair.pair_id, normalized_profile_weights(beta.beta));
    metrics_.entered[pair.profile.id - 1] += 1;
    metrics_.total_entered += 1;
  }

  void drop(std::int64_t id) {
    graph_.remove_pair(id);
    betas_.erase(id);
    het_weights_.erase(id);
  }

  SimConfig cfg_;
  std::uint64_t gen_seed_ = 0, cm_seed_ = 0, beta_seed_ = 0, tie_seed_ = 0,
                dyn_seed_ = 0, noise_seed_ = 0;
  Crossmatch crossmatch_;
  CompatibilityGraph graph_;
  std::map<std::int64_t, BetaSample> betas_;
  std::map<std::int64_t, std::array<double, kNumProfiles>> het_weights_;
  int day_ = 0;
  std::int64_t next_pair_id_ = 1;
  RunMetrics metrics_;
};

inline RunMetrics run_simulation(const SimConfig& config) {
  Simulation sim(config);
  return sim.run();
}

}  // namespace kex
