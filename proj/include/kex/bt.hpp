#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "kex/survey.hpp"

namespace kex {

// Bradley-Terry scores over the eight profiles, normalized so the maximum is
// exactly 1. non_identifiable marks fits that needed pseudocount smoothing
// because some profile never won or never lost.
struct BtScores {
  std::array<double, kNumProfiles> score{};
  bool non_identifiable = false;
};

struct BtFitResult {
  BtScores scores;
  int iterations = 0;
  bool converged = false;
};

// P(i preferred to j) = score_i / (score_i + score_j). The larger share is
// computed once and the smaller returned as its exact complement (Sterbenz:
// 1 - p is exact for p >= 1/2), so bt_probability(a,b) + bt_probability(b,a)
// is exactly 1.
inline double bt_probability(double score_i, double score_j) {
  if (!(score_i > 0.0) || !(score_j > 0.0))
    throw std::domain_error("BT scores must be positive");
  if (score_i == score_j) return 0.5;
  const double hi = std::max(score_i, score_j);
  const double lo = std::min(score_i, score_j);
  const double p_hi = hi / (hi + lo);
  return score_i > score_j ? p_hi : 1.0 - p_hi;
}

// Pooled maximum-likelihood fit by minorization-maximization (Hunter 2004):
//   p_i <- W_i / sum_{j != i} n_ij / (p_i + p_j)
// iterated until the largest absolute log-score change drops below 1e-8.
// Scores are max-normalized every sweep, which fixes the scale freedom. When
// a profile has zero wins or zero losses the likelihood has no interior
// maximizer; 0.5 is added to every directed count and the result flagged.
inline BtFitResult fit_bt(const SurveyDataset& survey,
                          std::span<const double> initial_scores = {}) {
  double wins[kNumProfiles][kNumProfiles] = {};
  for (const Respondent& r : survey.respondents) {
    for (int q = 0; q < kNumProfilePairs; ++q) {
      const auto [i, j] = kProfilePairs[q];
      const int c = r.chosen[q];
      if (c == 0) continue;
      const int loser = (c == i) ? j : i;
      wins[c - 1][loser - 1] += 1.0;
    }
  }

  bool degenerate = false;
  for (int i = 0; i < kNumProfiles; ++i) {
    double won = 0.0, lost = 0.0;
    for (int j = 0; j < kNumProfiles; ++j) {
      won += wins[i][j];
      lost += wins[j][i];
    }
    if (won == 0.0 || lost == 0.0) degenerate = true;
  }
  if (degenerate)
    for (int i = 0; i < kNumProfiles; ++i)
      for (int j = 0; j < kNumProfiles; ++j)
        if (i != j) wins[i][j] += 0.5;

  std::array<double, kNumProfiles> p;
  p.fill(1.0);
  if (!initial_scores.empty()) {
    if (initial_scores.size() != kNumProfiles)
      throw ConfigError("fit_bt initial scores must have 8 entries");
    for (int i = 0; i < kNumProfiles; ++i) {
      if (!(initial_scores[i] > 0.0))
        throw ConfigError("fit_bt initial scores must be positive");
      p[i] = initial_scores[i];
    }
  }

  BtFitResult result;
  constexpr int kMaxIterations = 10000;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    std::array<double, kNumProfiles> next;
    for (int i = 0; i < kNumProfiles; ++i) {
      double total_wins = 0.0, denom = 0.0;
      for (int j = 0; j < kNumProfiles; ++j) {
        if (j == i) continue;
        total_wins += wins[i][j];
        const double n_ij = wins[i][j] + wins[j][i];
        if (n_ij > 0.0) denom += n_ij / (p[i] + p[j]);
      }
      next[i] = denom > 0.0 ? total_wins / denom : p[i];
    }
    const double top = *std::max_element(next.begin(), next.end());
    for (double& x : next) x /= top;

    double delta = 0.0;
    for (int i = 0; i < kNumProfiles; ++i)
      delta = std::max(delta, std::abs(std::log(next[i]) - std::log(p[i])));
    p = next;
    result.iterations = iter;
    if (delta < 1e-8) {
      result.converged = true;
      break;
    }
  }

  result.scores.score = p;
  result.scores.non_identifiable = degenerate;
  return result;
}

}  // namespace kex
