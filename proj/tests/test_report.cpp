#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "kex/report.hpp"
#include "kex/text.hpp"

using namespace kex;

namespace {

RunRow row(int run, Condition c, double rank, std::int64_t entered, std::int64_t matched) {
  RunRow r;
  r.run_index = run;
  r.condition = c;
  r.seed = hash64(5, run, condition_tag(c));
  r.average_rank = rank;
  r.total_entered = entered;
  r.total_matched = matched;
  for (int p = 0; p < kNumProfiles; ++p) {
    r.entered[p] = entered / kNumProfiles;
    r.matched[p] = matched / kNumProfiles;
  }
  return r;
}

}  // namespace

TEST_CASE("median and hinge conventions") {
  CHECK(median_of_sorted(std::array<double, 3>{2, 4, 6}) == 4.0);
  CHECK(median_of_sorted(std::array<double, 4>{1, 2, 3, 10}) == 2.5);

  const auto single = tukey_hinges({5.0});
  REQUIRE(single.has_value());
  CHECK(single->q1 == 5.0);
  CHECK(single->median == 5.0);
  CHECK(single->q3 == 5.0);

  // hinges include the median element in both halves for odd counts
  const auto odd = tukey_hinges({1, 3, 5, 7, 9});
  CHECK(odd->median == 5.0);
  CHECK(odd->q1 == 3.0);
  CHECK(odd->q3 == 7.0);

  const auto even = tukey_hinges({1, 2, 3, 4});
  CHECK(even->median == 2.5);
  CHECK(even->q1 == 1.5);
  CHECK(even->q3 == 3.5);

  CHECK_FALSE(tukey_hinges({}).has_value());
}

TEST_CASE("summaries aggregate per condition and respect ordering invariants") {
  std::vector<RunRow> rows;
  rows.push_back(row(0, Condition::Equal, 4.0, 160, 80));
  rows.push_back(row(1, Condition::Equal, 6.0, 160, 96));
  rows.push_back(row(2, Condition::Equal, 2.0, 160, 64));
  rows.push_back(row(0, Condition::Heterogeneous, 3.0, 160, 80));

  const auto summary = summarize(rows);
  REQUIRE(summary.conditions.size() == 2);
  CHECK(summary.conditions[0].condition == Condition::Equal);
  CHECK(summary.conditions[1].condition == Condition::Heterogeneous);

  const auto& eq = summary.conditions[0];
  CHECK(eq.runs == 3);
  REQUIRE(eq.rank.has_value());
  CHECK(eq.rank->median == 4.0);
  CHECK(eq.rank->q1 >= 2.0);
  CHECK(eq.rank->q1 <= eq.rank->median);
  CHECK(eq.rank->median <= eq.rank->q3);
  CHECK(eq.rank->q3 <= 6.0);

  const auto& het = summary.conditions[1];
  CHECK(het.runs == 1);
  CHECK(het.rank->median == 3.0);
  CHECK(het.rank->q1 == het.rank->q3);
}

TEST_CASE("per-condition totals recombine from per-profile values") {
  std::vector<RunRow> rows;
  SplitMix64 g(8);
  for (int run = 0; run < 10; ++run) {
    RunRow r;
    r.run_index = run;
    r.condition = Condition::Homogeneous;
    r.average_rank = 3.0 + uniform01(g);
    for (int p = 0; p < kNumProfiles; ++p) {
      r.entered[p] = 10 + static_cast<std::int64_t>(uniform01(g) * 40);
      r.matched[p] = static_cast<std::int64_t>(uniform01(g) * double(r.entered[p]));
      r.total_entered += r.entered[p];
      r.total_matched += r.matched[p];
    }
    rows.push_back(r);
  }
  const auto summary = summarize(rows);
  REQUIRE(summary.conditions.size() == 1);
  const auto& cs = summary.conditions[0];
  REQUIRE(cs.total_proportions.size() == 10);
  for (int run = 0; run < 10; ++run) {
    // entered-weighted recombination of per-profile proportions
    double weighted = 0.0;
    for (int p = 0; p < kNumProfiles; ++p)
      weighted += cs.profile_proportions[p][run] * double(rows[run].entered[p]);
    weighted /= double(rows[run].total_entered);
    CHECK(std::abs(weighted - cs.total_proportions[run]) < 1e-9);
  }
}

TEST_CASE("metrics table round-trips") {
  std::vector<RunRow> rows;
  rows.push_back(row(0, Condition::Equal, 4.25, 365, 220));
  rows.push_back(row(1, Condition::Homogeneous, 3.75, 364, 219));
  RunRow absent = row(2, Condition::Heterogeneous, 0, 10, 0);
  absent.average_rank.reset();
  rows.push_back(absent);

  const auto path = std::filesystem::temp_directory_path() / "kex_metrics.csv";
  write_metrics_csv(path, rows);
  const auto back = read_metrics_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].run_index == rows[i].run_index);
    CHECK(back[i].condition == rows[i].condition);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].average_rank.has_value() == rows[i].average_rank.has_value());
    if (back[i].average_rank)
      CHECK(format_g9(*back[i].average_rank) == format_g9(*rows[i].average_rank));
    CHECK(back[i].entered == rows[i].entered);
    CHECK(back[i].matched == rows[i].matched);
  }
  std::filesystem::remove(path);
}

TEST_CASE("emitted tables are stable, shaped, and reparse to the summary") {
  std::vector<RunRow> rows;
  for (int run = 0; run < 6; ++run) {
    rows.push_back(row(run, Condition::Equal, 4.0 + run * 0.125, 160, 80 + run));
    rows.push_back(row(run, Condition::Homogeneous, 3.5 + run * 0.125, 160, 80 + run));
    rows.push_back(row(run, Condition::Heterogeneous, 3.0 + run * 0.125, 160, 80 + run));
  }
  const auto summary = summarize(rows);
  const auto dir = std::filesystem::temp_directory_path() / "kex_tables";
  std::filesystem::create_directories(dir);
  emit_tables(summary, dir);
  const auto ranks_a = read_file(dir / "ranks.csv");
  const auto props_a = read_file(dir / "proportions.csv");
  emit_tables(summary, dir);
  CHECK(read_file(dir / "ranks.csv") == ranks_a);
  CHECK(read_file(dir / "proportions.csv") == props_a);

  // 3 conditions x 8 profiles data rows
  const auto prop_lines = read_lines(dir / "proportions.csv");
  CHECK(prop_lines.size() == 1 + 3 * 8);
  const auto rank_lines = read_lines(dir / "ranks.csv");
  CHECK(rank_lines.size() == 1 + 3 * 6);

  // round-trip: parsed rank rows match the summary's run ranks at 9 digits
  for (std::size_t i = 1; i < rank_lines.size(); ++i) {
    const auto f = split_csv(rank_lines[i]);
    REQUIRE(f.size() == 3);
    const auto cond = parse_condition(f[0]);
    const int run = static_cast<int>(parse_int(f[1], "run"));
    for (const auto& cs : summary.conditions)
      if (cs.condition == cond)
        CHECK(format_g9(parse_double(f[2], "rank")) == format_g9(*cs.run_ranks[run]));
  }
  // and the proportions rows match the per-profile hinges
  for (std::size_t i = 1; i < prop_lines.size(); ++i) {
    const auto f = split_csv(prop_lines[i]);
    REQUIRE(f.size() == 6);
    const auto cond = parse_condition(f[0]);
    const int profile = static_cast<int>(parse_int(f[1], "profile"));
    for (const auto& cs : summary.conditions)
      if (cs.condition == cond) {
        const auto& q = cs.proportion[profile - 1];
        REQUIRE(q.has_value());
        CHECK(format_g9(parse_double(f[3], "median")) == format_g9(q->median));
        CHECK(format_g9(parse_double(f[4], "q1")) == format_g9(q->q1));
        CHECK(format_g9(parse_double(f[5], "q3")) == format_g9(q->q3));
      }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty summaries emit header-only tables") {
  const auto dir = std::filesystem::temp_directory_path() / "kex_tables_empty";
  std::filesystem::create_directories(dir);
  emit_tables(ExperimentSummary{}, dir);
  CHECK(read_lines(dir / "ranks.csv").size() == 1);
  CHECK(read_lines(dir / "proportions.csv").size() == 1);
  std::filesystem::remove_all(dir);
}
