#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "kex/bt.hpp"
#include "kex/mvn.hpp"
#include "kex/text.hpp"

namespace kex {

// Fitted-parameter files are JSON documents. The "model" tag distinguishes the
// two kinds; both carry fit metadata next to the numbers.

struct BtParamsFile {
  BtScores scores;
  int iterations = 0;
  bool converged = true;
  std::int64_t respondents = 0;
};

struct BlpParamsFile {
  MvnParams params;
  std::int64_t respondents = 0;
  int draws = 0;
  double avg_log_likelihood = 0.0;
  double report_avg_log_likelihood = 0.0;
  int report_draws = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  bool converged = true;
};

namespace detail {

inline nlohmann::json load_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return j;
}

template <class T>
T require(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw DataError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace detail

inline void write_bt_params(const std::filesystem::path& path, const BtParamsFile& f) {
  nlohmann::json j;
  j["model"] = "bt";
  j["scores"] = f.scores.score;
  j["non_identifiable"] = f.scores.non_identifiable;
  j["fit"] = {{"iterations", f.iterations},
              {"converged", f.converged},
              {"respondents", f.respondents}};
  write_file(path, j.dump(2) + "\n");
}

inline BtParamsFile read_bt_params(const std::filesystem::path& path) {
  const auto j = detail::load_json(path);
  const std::string where = path.string();
  if (detail::require<std::string>(j, "model", where) != "bt")
    throw DataError(where + ": not a BT parameter file");
  BtParamsFile f;
  const auto scores = detail::require<std::vector<double>>(j, "scores", where);
  if (scores.size() != kNumProfiles)
    throw DataError(where + ": expected 8 scores, got " + std::to_string(scores.size()));
  std::copy(scores.begin(), scores.end(), f.scores.score.begin());
  f.scores.non_identifiable = detail::require<bool>(j, "non_identifiable", where);
  if (j.contains("fit")) {
    const auto& fit = j.at("fit");
    f.iterations = detail::require<int>(fit, "iterations", where + "/fit");
    f.converged = detail::require<bool>(fit, "converged", where + "/fit");
    f.respondents = detail::require<std::int64_t>(fit, "respondents", where + "/fit");
  }
  return f;
}

inline void write_blp_params(const std::filesystem::path& path, const BlpParamsFile& f) {
  nlohmann::json j;
  j["model"] = "blp";
  j["mu"] = f.params.mu;
  j["chol"] = f.params.chol;  // row-major lower triangle
  j["fit"] = {{"respondents", f.respondents},
              {"draws", f.draws},
              {"avg_log_likelihood", f.avg_log_likelihood},
              {"report_avg_log_likelihood", f.report_avg_log_likelihood},
              {"report_draws", f.report_draws},
              {"seed", f.seed},
              {"iterations", f.iterations},
              {"converged", f.converged}};
  write_file(path, j.dump(2) + "\n");
}

inline BlpParamsFile read_blp_params(const std::filesystem::path& path) {
  const auto j = detail::load_json(path);
  const std::string where = path.string();
  if (detail::require<std::string>(j, "model", where) != "blp")
    throw DataError(where + ": not a BLP parameter file");
  BlpParamsFile f;
  const auto mu = detail::require<std::vector<double>>(j, "mu", where);
  const auto chol = detail::require<std::vector<double>>(j, "chol", where);
  if (mu.size() != 3) throw DataError(where + ": mu must have 3 entries");
  if (chol.size() != 6)
    throw DataError(where + ": chol must have 6 entries (row-major lower triangle)");
  std::copy(mu.begin(), mu.end(), f.params.mu.begin());
  std::copy(chol.begin(), chol.end(), f.params.chol.begin());
  if (j.contains("fit")) {
    const auto& fit = j.at("fit");
    f.respondents = detail::require<std::int64_t>(fit, "respondents", where + "/fit");
    f.draws = detail::require<int>(fit, "draws", where + "/fit");
    f.avg_log_likelihood = detail::require<double>(fit, "avg_log_likelihood", where + "/fit");
    f.report_avg_log_likelihood =
        detail::require<double>(fit, "report_avg_log_likelihood", where + "/fit");
    f.report_draws = detail::require<int>(fit, "report_draws", where + "/fit");
    f.seed = detail::require<std::uint64_t>(fit, "seed", where + "/fit");
    f.iterations = detail::require<int>(fit, "iterations", where + "/fit");
    f.converged = detail::require<bool>(fit, "converged", where + "/fit");
  }
  return f;
}

}  // namespace kex
