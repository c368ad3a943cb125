#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "kex/bt.hpp"

using namespace kex;

TEST_CASE("pairwise probability arithmetic") {
  CHECK(std::abs(bt_probability(1.000, 0.103) - 0.90662) < 1e-4);
  CHECK(std::abs(bt_probability(0.236, 0.070) - 0.7712) < 1e-4);
  CHECK(bt_probability(0.37, 0.37) == 0.5);
  CHECK(bt_probability(2.0, 2.0) == 0.5);
  CHECK_THROWS_AS(bt_probability(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bt_probability(1.0, -0.2), std::domain_error);
}

TEST_CASE("complementarity is exact for arbitrary score pairs") {
  SplitMix64 g(2024);
  for (int i = 0; i < 5000; ++i) {
    const double a = uniform01_pos(g) * 3.0;
    const double b = uniform01_pos(g) * 3.0;
    CHECK(bt_probability(a, b) + bt_probability(b, a) == 1.0);
  }
  // the published score table, all 64 ordered pairs
  const auto t = testutil::published_bt_scores();
  for (double a : t)
    for (double b : t) CHECK(bt_probability(a, b) + bt_probability(b, a) == 1.0);
}

TEST_CASE("fit recovers the published scores from a large synthetic survey") {
  const auto truth = testutil::published_bt_scores();
  const auto survey = testutil::bt_survey(truth, 2000, 771);
  const auto fit = fit_bt(survey);
  CHECK(fit.converged);
  CHECK_FALSE(fit.scores.non_identifiable);
  for (int p = 0; p < kNumProfiles; ++p)
    CHECK(std::abs(fit.scores.score[p] - truth[p]) < 0.02);
}

TEST_CASE("always-pick-the-lower-id survey yields strictly decreasing scores") {
  SurveyDataset survey;
  for (int k = 1; k <= 40; ++k) {
    Respondent r;
    r.respondent_id = k;
    for (int q = 0; q < kNumProfilePairs; ++q)
      r.chosen[q] = static_cast<std::uint8_t>(kProfilePairs[q].first);
    survey.respondents.push_back(r);
  }
  const auto fit = fit_bt(survey);
  CHECK(fit.scores.non_identifiable);  // profile 1 never loses, profile 8 never wins
  for (int p = 0; p + 1 < kNumProfiles; ++p)
    CHECK(fit.scores.score[p] > fit.scores.score[p + 1]);
  CHECK(fit.scores.score[0] == 1.0);
}

TEST_CASE("profiles with identical win patterns get equal scores") {
  // alternating respondents keep profiles 1 and 2 exactly symmetric: half
  // prefer 1 overall, half prefer 2, with identical records against 3..8
  SurveyDataset survey;
  for (int k = 1; k <= 60; ++k) {
    Respondent r;
    r.respondent_id = k;
    const bool favour_one = k % 2 == 0;
    for (int q = 0; q < kNumProfilePairs; ++q) {
      const auto [i, j] = kProfilePairs[q];
      if (i == 1 && j == 2) {
        r.chosen[q] = favour_one ? 1 : 2;
      } else if (i <= 2) {
        // both beat the higher ids 2/3 of the time, on the same schedule
        r.chosen[q] = static_cast<std::uint8_t>(k % 3 == 0 ? j : i);
      } else {
        r.chosen[q] = static_cast<std::uint8_t>(i);
      }
    }
    survey.respondents.push_back(r);
  }
  const auto fit = fit_bt(survey);
  CHECK(std::abs(fit.scores.score[0] - fit.scores.score[1]) < 1e-6);
}

TEST_CASE("rescaled initial scores give bit-identical normalized output") {
  const auto survey = testutil::bt_survey(testutil::published_bt_scores(), 300, 99);
  const std::array<double, 8> ones = {1, 1, 1, 1, 1, 1, 1, 1};
  std::array<double, 8> scaled;
  for (int i = 0; i < 8; ++i) scaled[i] = 4.0 * ones[i];  // power of two: exact
  const auto a = fit_bt(survey, ones);
  const auto b = fit_bt(survey, scaled);
  for (int p = 0; p < kNumProfiles; ++p) CHECK(a.scores.score[p] == b.scores.score[p]);
}

TEST_CASE("empty and degenerate surveys are flagged") {
  const auto fit = fit_bt(SurveyDataset{});
  CHECK(fit.scores.non_identifiable);
  for (double s : fit.scores.score) CHECK(s == 1.0);
}
