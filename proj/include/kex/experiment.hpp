#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "kex/params_io.hpp"
#include "kex/report.hpp"
#include "kex/simulate.hpp"

namespace kex {

// Batch experiment: runs x conditions simulations with per-run seeds
// hash64(master_seed, run_index, condition_tag).
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int runs = 1;
  std::vector<Condition> conditions;
  int horizon_days = 365;
  double arrival_rate = 1.0;
  double departure_rate = 0.005;
  int cycle_cap = 3;
  bool gumbel_edge_noise = false;
  GeneratorConfig generator;
  std::filesystem::path bt_params;   // required when HOMOGENEOUS is requested
  std::filesystem::path blp_params;  // always required: betas exist in every condition
  std::filesystem::path out_dir;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<std::string_view> allowed,
                                const std::string& where,
                                std::vector<std::string>& problems) {
  for (const auto& [key, unused] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      problems.push_back(where + ": unknown key '" + key + "'");
}

}  // namespace detail

// Strict schema: unknown keys anywhere are errors, itemized together so a
// typo never silently falls back to a default.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                                const std::filesystem::path& base_dir) {
  std::vector<std::string> problems;
  detail::reject_unknown_keys(j,
                              {"seed", "runs", "conditions", "horizon_days", "arrival_rate",
                               "departure_rate", "cycle_cap", "gumbel_edge_noise", "generator",
                               "bt_params", "blp_params", "out_dir"},
                              "config", problems);

  ExperimentConfig cfg;
  auto take = [&](const char* key, auto& into, bool required) {
    if (!j.contains(key)) {
      if (required) problems.push_back(std::string("config: missing key '") + key + "'");
      return false;
    }
    try {
      into = j.at(key).get<std::decay_t<decltype(into)>>();
      return true;
    } catch (const nlohmann::json::exception& e) {
      problems.push_back(std::string("config: bad value for '") + key + "': " + e.what());
      return false;
    }
  };

  take("seed", cfg.seed, false);
  take("runs", cfg.runs, true);
  take("horizon_days", cfg.horizon_days, true);
  take("arrival_rate", cfg.arrival_rate, false);
  take("departure_rate", cfg.departure_rate, false);
  take("cycle_cap", cfg.cycle_cap, false);
  take("gumbel_edge_noise", cfg.gumbel_edge_noise, false);

  std::vector<std::string> condition_names;
  if (take("conditions", condition_names, true)) {
    for (const auto& name : condition_names) {
      try {
        cfg.conditions.push_back(parse_condition(name));
      } catch (const DataError& e) {
        problems.push_back(std::string("config/conditions: ") + e.what());
      }
    }
    if (cfg.conditions.empty() && condition_names.empty())
      problems.push_back("config: conditions must not be empty");
  }

  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    detail::reject_unknown_keys(
        g, {"blood_freq", "pra_buckets", "profile_weights", "pra_enabled", "max_attempts"},
        "config/generator", problems);
    auto take_gen = [&](const char* key, auto& into) {
      if (!g.contains(key)) return;
      try {
        into = g.at(key).get<std::decay_t<decltype(into)>>();
      } catch (const nlohmann::json::exception& e) {
        problems.push_back(std::string("config/generator: bad value for '") + key +
                           "': " + e.what());
      }
    };
    take_gen("blood_freq", cfg.generator.blood_freq);
    take_gen("pra_buckets", cfg.generator.pra_buckets);
    take_gen("profile_weights", cfg.generator.profile_weights);
    take_gen("pra_enabled", cfg.generator.pra_enabled);
    take_gen("max_attempts", cfg.generator.max_attempts);
  }

  std::string bt_path, blp_path, out_dir;
  take("bt_params", bt_path, false);
  take("blp_params", blp_path, true);
  take("out_dir", out_dir, true);
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base_dir / fp;
  };
  if (!bt_path.empty()) cfg.bt_params = resolve(bt_path);
  if (!blp_path.empty()) cfg.blp_params = resolve(blp_path);
  if (!out_dir.empty()) cfg.out_dir = resolve(out_dir);

  if (cfg.runs < 1) problems.push_back("config: runs must be >= 1");
  const bool wants_homogeneous =
      std::find(cfg.conditions.begin(), cfg.conditions.end(), Condition::Homogeneous) !=
      cfg.conditions.end();
  if (wants_homogeneous && cfg.bt_params.empty())
    problems.push_back("config: bt_params is required when HOMOGENEOUS is requested");

  if (!problems.empty()) {
    std::string msg = "invalid experiment config";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

struct ExperimentResult {
  std::vector<RunRow> rows;
  ExperimentSummary summary;
};

// Executes every (condition, run) cell. Runs are independent given their
// derived seeds, so they fan out across a small thread pool; rows are
// collected into preassigned slots, keeping output order fixed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::optional<BtScores>& bt_scores,
                                       const MvnParams& blp_params,
                                       int max_threads = 0) {
  std::vector<SimConfig> jobs;
  std::vector<std::pair<int, Condition>> labels;
  for (Condition condition : cfg.conditions) {
    for (int run = 0; run < cfg.runs; ++run) {
      SimConfig sc;
      sc.horizon_days = cfg.horizon_days;
      sc.arrival_rate = cfg.arrival_rate;
      sc.departure_rate = cfg.departure_rate;
      sc.cycle_cap = cfg.cycle_cap;
      sc.condition = condition;
      sc.bt_scores = bt_scores;
      sc.blp_params = blp_params;
      sc.generator = cfg.generator;
      sc.gumbel_edge_noise = cfg.gumbel_edge_noise;
      sc.seed = hash64(cfg.seed, run, condition_tag(condition));
      sc.validate();
      jobs.push_back(std::move(sc));
      labels.emplace_back(run, condition);
    }
  }

  std::vector<RunRow> rows(jobs.size());
  unsigned workers = max_threads > 0 ? static_cast<unsigned>(max_threads)
                                     : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, jobs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const RunMetrics m = run_simulation(jobs[i]);
      rows[i] = make_run_row(labels[i].first, labels[i].second, jobs[i].seed, m);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  result.rows = std::move(rows);
  result.summary = summarize(result.rows);
  return result;
}

// Results directory: per-run metrics table, the two summary tables, and a
// machine-readable summary echoing the config. No timestamps or absolute
// paths, so identical configs give byte-identical directories.
inline void write_experiment_results(const ExperimentResult& result,
                                     const nlohmann::json& config_echo,
                                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_metrics_csv(out_dir / "metrics.csv", result.rows);
  emit_tables(result.summary, out_dir);

  nlohmann::json j;
  j["config"] = config_echo;
  nlohmann::json conditions = nlohmann::json::array();
  for (const ConditionSummary& cs : result.summary.conditions) {
    nlohmann::json c;
    c["condition"] = std::string(to_string(cs.condition));
    c["runs"] = cs.runs;
    if (cs.rank) {
      c["rank_median"] = cs.rank->median;
      c["rank_q1"] = cs.rank->q1;
      c["rank_q3"] = cs.rank->q3;
    }
    if (!cs.total_proportions.empty()) {
      if (auto q = tukey_hinges(cs.total_proportions))
        c["total_proportion_matched_median"] = q->median;
    }
    conditions.push_back(std::move(c));
  }
  j["conditions"] = std::move(conditions);
  write_file(out_dir / "summary.json", j.dump(2) + "\n");
}

}  // namespace kex
