#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kex/simulate.hpp"
#include "kex/text.hpp"

namespace kex {

// One simulation run reduced to the per-run metrics table row.
struct RunRow {
  int run_index = 0;
  Condition condition = Condition::Equal;
  std::uint64_t seed = 0;
  std::optional<double> average_rank;
  std::int64_t total_entered = 0;
  std::int64_t total_matched = 0;
  std::array<std::int64_t, kNumProfiles> entered{};
  std::array<std::int64_t, kNumProfiles> matched{};
};

inline RunRow make_run_row(int run_index, Condition condition, std::uint64_t seed,
                           const RunMetrics& m) {
  RunRow row;
  row.run_index = run_index;
  row.condition = condition;
  row.seed = seed;
  row.average_rank = average_rank(m);
  row.total_entered = m.total_entered;
  row.total_matched = m.total_matched;
  row.entered = m.entered;
  row.matched = m.matched;
  return row;
}

// Median by the midpoint rule; quartiles are Tukey hinges (each half includes
// the middle element when the count is odd).
inline double median_of_sorted(std::span<const double> v) {
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Quartiles {
  double q1 = 0.0, median = 0.0, q3 = 0.0;
};

inline std::optional<Quartiles> tukey_hinges(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t half = (n + 1) / 2;
  Quartiles q;
  q.median = median_of_sorted(values);
  q.q1 = median_of_sorted(std::span<const double>(values.data(), half));
  q.q3 = median_of_sorted(std::span<const double>(values.data() + (n - half), half));
  return q;
}

struct ConditionSummary {
  Condition condition = Condition::Equal;
  int runs = 0;
  std::vector<std::optional<double>> run_ranks;  // run-ordered, absent when no donations
  std::optional<Quartiles> rank;
  std::array<std::vector<double>, kNumProfiles> profile_proportions;
  std::array<std::optional<Quartiles>, kNumProfiles> proportion;
  std::vector<double> total_proportions;  // per run, runs with entered > 0
};

struct ExperimentSummary {
  std::vector<ConditionSummary> conditions;
};

// Aggregates run rows per condition: rank quartiles over the runs that had
// donations, proportion-matched quartiles per profile over the runs where the
// profile entered. Conditions appear in canonical order; absent ones are
// simply not listed.
inline ExperimentSummary summarize(const std::vector<RunRow>& rows) {
  ExperimentSummary summary;
  for (Condition c : kAllConditions) {
    ConditionSummary cs;
    cs.condition = c;
    std::vector<double> ranks;
    for (const RunRow& row : rows) {
      if (row.condition != c) continue;
      cs.runs += 1;
      cs.run_ranks.push_back(row.average_rank);
      if (row.average_rank) ranks.push_back(*row.average_rank);
      for (int p = 0; p < kNumProfiles; ++p)
        if (row.entered[p] > 0)
          cs.profile_proportions[p].push_back(double(row.matched[p]) / double(row.entered[p]));
      if (row.total_entered > 0)
        cs.total_proportions.push_back(double(row.total_matched) / double(row.total_entered));
    }
    if (cs.runs == 0) continue;
    cs.rank = tukey_hinges(std::move(ranks));
    for (int p = 0; p < kNumProfiles; ++p)
      cs.proportion[p] = tukey_hinges(cs.profile_proportions[p]);
    summary.conditions.push_back(std::move(cs));
  }
  return summary;
}

// --- flat tables ---

inline constexpr std::string_view kMetricsHeader =
    "run_id,condition,seed,average_rank,total_entered,total_matched,"
    "entered_p1,entered_p2,entered_p3,entered_p4,entered_p5,entered_p6,entered_p7,entered_p8,"
    "matched_p1,matched_p2,matched_p3,matched_p4,matched_p5,matched_p6,matched_p7,matched_p8";

inline void write_metrics_csv(const std::filesystem::path& path,
                              const std::vector<RunRow>& rows) {
  auto out = open_for_write(path);
  out << kMetricsHeader << '\n';
  for (const RunRow& r : rows) {
    out << r.run_index << ',' << to_string(r.condition) << ',' << r.seed << ','
        << (r.average_rank ? format_g9(*r.average_rank) : "") << ','
        << r.total_entered << ',' << r.total_matched;
    for (auto v : r.entered) out << ',' << v;
    for (auto v : r.matched) out << ',' << v;
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::vector<RunRow> read_metrics_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kMetricsHeader)
    throw DataError(path.string() + ": missing metrics header");
  std::vector<RunRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(i + 1);
    const auto f = split_csv(lines[i]);
    if (f.size() != 22) throw DataError(ctx + ": expected 22 fields");
    RunRow r;
    r.run_index = static_cast<int>(parse_int(f[0], ctx));
    r.condition = parse_condition(f[1]);
    r.seed = parse_uint(f[2], ctx);
    if (!f[3].empty()) r.average_rank = parse_double(f[3], ctx);
    r.total_entered = parse_int(f[4], ctx);
    r.total_matched = parse_int(f[5], ctx);
    for (int p = 0; p < kNumProfiles; ++p) {
      r.entered[p] = parse_int(f[6 + p], ctx);
      r.matched[p] = parse_int(f[14 + p], ctx);
    }
    rows.push_back(r);
  }
  return rows;
}

// Plot-ready tables: run-level average ranks, and per-(condition, profile)
// proportion-matched quartiles. Output depends only on the summary, so equal
// summaries give byte-identical files.
inline void emit_tables(const ExperimentSummary& summary,
                        const std::filesystem::path& out_dir) {
  {
    auto out = open_for_write(out_dir / "ranks.csv");
    out << "condition,run_index,average_rank\n";
    for (const ConditionSummary& cs : summary.conditions)
      for (std::size_t i = 0; i < cs.run_ranks.size(); ++i)
        out << to_string(cs.condition) << ',' << i << ','
            << (cs.run_ranks[i] ? format_g9(*cs.run_ranks[i]) : "") << '\n';
    if (!out) throw IoError("write failed for " + (out_dir / "ranks.csv").string());
  }
  {
    auto out = open_for_write(out_dir / "proportions.csv");
    out << "condition,profile_id,runs,median,q1,q3\n";
    for (const ConditionSummary& cs : summary.conditions)
      for (int p = 0; p < kNumProfiles; ++p) {
        out << to_string(cs.condition) << ',' << (p + 1) << ','
            << cs.profile_proportions[p].size() << ',';
        if (cs.proportion[p])
          out << format_g9(cs.proportion[p]->median) << ','
              << format_g9(cs.proportion[p]->q1) << ','
              << format_g9(cs.proportion[p]->q3);
        else
          out << ",,";
        out << '\n';
      }
    if (!out) throw IoError("write failed for " + (out_dir / "proportions.csv").string());
  }
}

}  // namespace kex
