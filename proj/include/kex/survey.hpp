#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kex/errors.hpp"
#include "kex/profile.hpp"
#include "kex/text.hpp"

namespace kex {

inline constexpr int kNumProfilePairs = 28;

// The 28 unordered profile pairs {i < j} in a fixed scan order; the index q
// names a pair everywhere (survey storage, likelihood kernels).
constexpr std::array<std::pair<int, int>, kNumProfilePairs> make_profile_pairs() {
  std::array<std::pair<int, int>, kNumProfilePairs> t{};
  int q = 0;
  for (int i = 1; i <= kNumProfiles; ++i)
    for (int j = i + 1; j <= kNumProfiles; ++j) t[q++] = {i, j};
  return t;
}

inline constexpr auto kProfilePairs = make_profile_pairs();

constexpr int profile_pair_index(int i, int j) {
  for (int q = 0; q < kNumProfilePairs; ++q)
    if (kProfilePairs[q].first == i && kProfilePairs[q].second == j) return q;
  return -1;
}

// chosen[q] is the preferred profile of pair q, or 0 when unanswered.
// Survey files require all 28 answers; a partial Respondent is only
// meaningful as a direct likelihood input.
struct Respondent {
  std::int64_t respondent_id = 0;
  std::array<std::uint8_t, kNumProfilePairs> chosen{};
};

struct SurveyDataset {
  std::vector<Respondent> respondents;
};

// --- survey file: respondent_id,profile_i,profile_j,chosen_id ---

inline constexpr std::string_view kSurveyHeader =
    "respondent_id,profile_i,profile_j,chosen_id";

inline void write_survey_csv(const std::filesystem::path& path,
                             const SurveyDataset& survey) {
  auto out = open_for_write(path);
  out << kSurveyHeader << '\n';
  for (const Respondent& r : survey.respondents)
    for (int q = 0; q < kNumProfilePairs; ++q)
      out << r.respondent_id << ',' << kProfilePairs[q].first << ','
          << kProfilePairs[q].second << ',' << int(r.chosen[q]) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

// Strict reader: every respondent must answer each of the 28 pairs exactly
// once and every chosen profile must belong to its pair. Bad rows are
// collected and reported together with their line numbers.
inline SurveyDataset read_survey_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kSurveyHeader)
    throw DataError(path.string() + ": missing survey header '" +
                    std::string(kSurveyHeader) + "'");

  std::vector<std::string> problems;
  auto complain = [&](std::size_t line_no, const std::string& what) {
    if (problems.size() < 20)
      problems.push_back("line " + std::to_string(line_no) + ": " + what);
    else if (problems.size() == 20)
      problems.push_back("...");
  };

  std::map<std::int64_t, Respondent> by_id;
  std::map<std::int64_t, std::array<int, kNumProfilePairs>> answer_counts;
  std::vector<std::int64_t> order;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    const auto f = split_csv(lines[i]);
    if (f.size() != 4) {
      complain(line_no, "expected 4 fields, got " + std::to_string(f.size()));
      continue;
    }
    std::int64_t rid;
    long long pi, pj, chosen;
    try {
      rid = parse_int(f[0], "respondent_id");
      pi = parse_int(f[1], "profile_i");
      pj = parse_int(f[2], "profile_j");
      chosen = parse_int(f[3], "chosen_id");
    } catch (const DataError& e) {
      complain(line_no, e.what());
      continue;
    }
    if (pi < 1 || pi > 8 || pj < 1 || pj > 8 || pi == pj) {
      complain(line_no, "bad profile pair (" + std::to_string(pi) + "," +
                            std::to_string(pj) + ")");
      continue;
    }
    const int lo = static_cast<int>(std::min(pi, pj));
    const int hi = static_cast<int>(std::max(pi, pj));
    const int q = profile_pair_index(lo, hi);
    if (chosen != pi && chosen != pj) {
      complain(line_no, "chosen profile " + std::to_string(chosen) +
                            " not in pair (" + std::to_string(pi) + "," +
                            std::to_string(pj) + ")");
      continue;
    }
    if (by_id.find(rid) == by_id.end()) {
      by_id[rid].respondent_id = rid;
      answer_counts[rid] = {};
      order.push_back(rid);
    }
    if (++answer_counts[rid][q] > 1) {
      complain(line_no, "respondent " + std::to_string(rid) +
                            " answered pair (" + std::to_string(lo) + "," +
                            std::to_string(hi) + ") more than once");
      continue;
    }
    by_id[rid].chosen[q] = static_cast<std::uint8_t>(chosen);
  }

  for (std::int64_t rid : order) {
    for (int q = 0; q < kNumProfilePairs; ++q)
      if (answer_counts[rid][q] == 0) {
        problems.push_back("respondent " + std::to_string(rid) +
                           " missing pair (" +
                           std::to_string(kProfilePairs[q].first) + "," +
                           std::to_string(kProfilePairs[q].second) + ")");
        break;
      }
  }

  if (!problems.empty()) {
    std::string msg = path.string() + ": malformed survey";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }

  SurveyDataset survey;
  survey.respondents.reserve(order.size());
  for (std::int64_t rid : order) survey.respondents.push_back(by_id[rid]);
  return survey;
}

}  // namespace kex
