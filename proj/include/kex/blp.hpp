#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kex/mvn.hpp"
#include "kex/nelder_mead.hpp"
#include "kex/profile.hpp"
#include "kex/survey.hpp"

namespace kex {

// Deterministic part of the random-coefficients utility: the profile's binary
// features dotted with a sampled weight vector.
inline double blp_score(const PatientProfile& profile, const std::array<double, 3>& beta) {
  const auto x = profile.features();
  return x[0] * beta[0] + x[1] * beta[1] + x[2] * beta[2];
}

inline std::array<double, kNumProfiles> profile_scores(const std::array<double, 3>& beta) {
  std::array<double, kNumProfiles> s{};
  for (int id = 1; id <= kNumProfiles; ++id)
    s[id - 1] = blp_score(PatientProfile::from_id(id), beta);
  return s;
}

// Min-max normalization of the eight profile scores to [0,1]; a flat score
// vector maps every profile to 1.
inline std::array<double, kNumProfiles> normalized_profile_weights(
    const std::array<double, 3>& beta) {
  auto s = profile_scores(beta);
  const auto [lo_it, hi_it] = std::minmax_element(s.begin(), s.end());
  const double lo = *lo_it, hi = *hi_it;
  std::array<double, kNumProfiles> w{};
  if (hi == lo) {
    w.fill(1.0);
    return w;
  }
  for (int k = 0; k < kNumProfiles; ++k) w[k] = (s[k] - lo) / (hi - lo);
  return w;
}

// Competition rank of the profile in beta's induced ordering: 1 plus the
// number of strictly better profiles, so ties share the better rank.
inline int profile_rank(const std::array<double, 3>& beta, const PatientProfile& profile) {
  const auto s = profile_scores(beta);
  const double mine = s[profile.id - 1];
  int better = 0;
  for (double v : s)
    if (v > mine) ++better;
  return 1 + better;
}

// log(exp(a) / (exp(a) + exp(b))) evaluated as -log1p(exp(-(a-b))): the
// two-term log-sum-exp guard.
inline double log_logistic(double diff) {
  return diff >= 0.0 ? -std::log1p(std::exp(-diff))
                     : diff - std::log1p(std::exp(diff));
}

namespace detail {

inline double log_sum_exp(std::span<const double> v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

}  // namespace detail

// Simulated per-respondent likelihood: the Monte Carlo average over the draw
// set of the product of logit choice probabilities across the answered pairs.
// Computed in log space throughout.
inline double log_likelihood_mc(const MvnParams& params, const Respondent& respondent,
                                const CommonRandomDraws& draws) {
  if (draws.count() < 1) throw ConfigError("likelihood needs at least one draw");
  std::vector<double> per_draw(draws.count());
  for (int r = 0; r < draws.count(); ++r) {
    const auto lz = params.apply_chol(draws.z[r]);
    const std::array<double, 3> beta = {params.mu[0] + lz[0], params.mu[1] + lz[1],
                                        params.mu[2] + lz[2]};
    const auto s = profile_scores(beta);
    double ll = 0.0;
    for (int q = 0; q < kNumProfilePairs; ++q) {
      const int c = respondent.chosen[q];
      if (c == 0) continue;
      const auto [i, j] = kProfilePairs[q];
      const double diff = s[i - 1] - s[j - 1];
      ll += (c == i) ? log_logistic(diff) : log_logistic(-diff);
    }
    per_draw[r] = ll;
  }
  return detail::log_sum_exp(per_draw) - std::log(double(draws.count()));
}

inline double likelihood_mc(const MvnParams& params, const Respondent& respondent,
                            const CommonRandomDraws& draws) {
  return std::exp(log_likelihood_mc(params, respondent, draws));
}

// Batched average log-likelihood over a survey. Per draw, the 56 directed
// pair log-probabilities are shared by all respondents, so one evaluation
// costs O(draws * 56) logistic terms plus O(N * draws * 28) additions laid
// out for vectorization. Matches log_likelihood_mc term for term.
class BlpLikelihood {
 public:
  BlpLikelihood(const SurveyDataset& survey, CommonRandomDraws draws)
      : draws_(std::move(draws)) {
    if (draws_.count() < 1) throw ConfigError("likelihood needs at least one draw");
    if (survey.respondents.empty()) throw ConfigError("likelihood needs a nonempty survey");
    const int r = draws_.count();
    slots_.reserve(survey.respondents.size());
    for (const Respondent& resp : survey.respondents) {
      std::array<std::int32_t, kNumProfilePairs> idx{};
      int answered = 0;
      for (int q = 0; q < kNumProfilePairs; ++q) {
        const int c = resp.chosen[q];
        if (c == 0) continue;
        const int side = (c == kProfilePairs[q].first) ? 0 : 1;
        idx[answered++] = (2 * q + side) * r;
      }
      counts_.push_back(answered);
      slots_.push_back(idx);
    }
    lp_.resize(std::size_t{2} * kNumProfilePairs * r);
    acc_.resize(r);
  }

  const CommonRandomDraws& draws() const { return draws_; }

  double average_log_likelihood(const MvnParams& params) {
    const int r_count = draws_.count();
    for (int r = 0; r < r_count; ++r) {
      const auto lz = params.apply_chol(draws_.z[r]);
      const std::array<double, 3> beta = {params.mu[0] + lz[0], params.mu[1] + lz[1],
                                          params.mu[2] + lz[2]};
      const auto s = profile_scores(beta);
      for (int q = 0; q < kNumProfilePairs; ++q) {
        const auto [i, j] = kProfilePairs[q];
        const double diff = s[i - 1] - s[j - 1];
        lp_[std::size_t(2 * q) * r_count + r] = log_logistic(diff);
        lp_[std::size_t(2 * q + 1) * r_count + r] = log_logistic(-diff);
      }
    }
    const double log_r = std::log(double(r_count));
    double total = 0.0;
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      std::fill(acc_.begin(), acc_.end(), 0.0);
      for (int a = 0; a < counts_[k]; ++a) {
        const double* row = lp_.data() + slots_[k][a];
        for (int r = 0; r < r_count; ++r) acc_[r] += row[r];
      }
      total += detail::log_sum_exp(acc_) - log_r;
    }
    return total / double(slots_.size());
  }

 private:
  CommonRandomDraws draws_;
  std::vector<std::array<std::int32_t, kNumProfilePairs>> slots_;
  std::vector<int> counts_;
  std::vector<double> lp_;
  std::vector<double> acc_;
};

// Plain 3-coefficient logit on the pairwise choices (no random coefficients):
// Newton iterations on the concave log-likelihood. Used to initialize the
// simulated-MLE search.
inline std::array<double, 3> fit_plain_logit(const SurveyDataset& survey) {
  std::array<double, 3> beta{};
  // per-pair feature difference and choice counts
  std::array<std::array<double, 3>, kNumProfilePairs> xdiff{};
  std::array<double, kNumProfilePairs> chose_first{}, total{};
  for (int q = 0; q < kNumProfilePairs; ++q) {
    const auto [i, j] = kProfilePairs[q];
    const auto xi = profile_features(i), xj = profile_features(j);
    for (int d = 0; d < 3; ++d) xdiff[q][d] = xi[d] - xj[d];
  }
  for (const Respondent& r : survey.respondents)
    for (int q = 0; q < kNumProfilePairs; ++q) {
      const int c = r.chosen[q];
      if (c == 0) continue;
      total[q] += 1.0;
      if (c == kProfilePairs[q].first) chose_first[q] += 1.0;
    }

  for (int iter = 0; iter < 50; ++iter) {
    std::array<double, 3> grad{};
    double hess[3][3] = {};
    for (int q = 0; q < kNumProfilePairs; ++q) {
      if (total[q] == 0.0) continue;
      const double eta = xdiff[q][0] * beta[0] + xdiff[q][1] * beta[1] +
                         xdiff[q][2] * beta[2];
      const double p = 1.0 / (1.0 + std::exp(-eta));
      const double w = total[q] * p * (1.0 - p);
      for (int a = 0; a < 3; ++a) {
        grad[a] += (chose_first[q] - total[q] * p) * xdiff[q][a];
        for (int b = 0; b < 3; ++b) hess[a][b] += w * xdiff[q][a] * xdiff[q][b];
      }
    }
    for (int a = 0; a < 3; ++a) hess[a][a] += 1e-8;  // ridge against separation

    // solve hess * step = grad (3x3 Gaussian elimination, partial pivot)
    double m[3][4];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] = hess[a][b];
      m[a][3] = grad[a];
    }
    for (int col = 0; col < 3; ++col) {
      int pivot = col;
      for (int row = col + 1; row < 3; ++row)
        if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
      std::swap(m[col], m[pivot]);
      for (int row = 0; row < 3; ++row) {
        if (row == col || m[col][col] == 0.0) continue;
        const double f = m[row][col] / m[col][col];
        for (int b = col; b < 4; ++b) m[row][b] -= f * m[col][b];
      }
    }
    double norm = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double step = m[a][3] / m[a][a];
      beta[a] += step;
      norm = std::max(norm, std::abs(step));
    }
    if (norm < 1e-10) break;
  }
  return beta;
}

struct BlpFitOptions {
  int max_iterations = 2000;  // total simplex budget across restart rounds
  double ftol = 1e-8;
  double init_chol_diag = 0.1;
  std::optional<std::array<double, 3>> init_mu;  // default: plain-logit coefficients
  double mu_step = 0.5;
  double diag_step = 1.0;
  double offdiag_step = 0.25;
  // The simplex can collapse early in nine dimensions; re-seeding it at the
  // incumbent with fresh steps until the objective stops moving fixes that.
  int max_rounds = 6;
  double restart_tol = 1e-6;
};

struct BlpFitResult {
  MvnParams params;
  double avg_log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  int draws = 0;
  std::uint64_t seed = 0;
  std::array<double, 3> init_mu{};
};

namespace detail {

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double inv_softplus(double y) { return std::log(std::expm1(y)); }

// 9-dim optimizer vector: mu (3), softplus-transformed chol diagonal (3),
// free off-diagonals (l10, l20, l21).
inline MvnParams params_from_theta(std::span<const double> t) {
  MvnParams p;
  p.mu = {t[0], t[1], t[2]};
  p.chol = {softplus(t[3]), t[6], softplus(t[4]), t[7], t[8], softplus(t[5])};
  return p;
}

}  // namespace detail

// Simulated maximum likelihood for (mu, Sigma): Nelder-Mead over the
// 9-parameter Cholesky parameterization, objective evaluated with one fixed
// draw set (common random numbers). Non-convergence returns the incumbent
// with converged = false rather than failing.
inline BlpFitResult fit_blp(const SurveyDataset& survey, int r_draws, std::uint64_t seed,
                            const BlpFitOptions& opt = {}) {
  if (r_draws < 100) throw ConfigError("fit_blp needs at least 100 draws");
  if (survey.respondents.empty()) throw ConfigError("fit_blp needs a nonempty survey");

  BlpLikelihood likelihood(survey, CommonRandomDraws::make(r_draws, seed));

  const std::array<double, 3> mu0 = opt.init_mu ? *opt.init_mu : fit_plain_logit(survey);
  const double d0 = detail::inv_softplus(opt.init_chol_diag);
  const std::array<double, 9> steps = {opt.mu_step, opt.mu_step, opt.mu_step,
                                       opt.diag_step, opt.diag_step, opt.diag_step,
                                       opt.offdiag_step, opt.offdiag_step, opt.offdiag_step};

  auto objective = [&](const std::vector<double>& theta) {
    return -likelihood.average_log_likelihood(detail::params_from_theta(theta));
  };

  std::vector<double> incumbent = {mu0[0], mu0[1], mu0[2], d0, d0, d0, 0.0, 0.0, 0.0};
  double incumbent_f = objective(incumbent);
  int iterations = 0;
  bool converged = false;
  for (int round = 0; round < opt.max_rounds && iterations < opt.max_iterations; ++round) {
    const auto nm = nelder_mead(objective, incumbent, steps,
                                opt.max_iterations - iterations, opt.ftol);
    iterations += nm.iterations;
    converged = nm.converged;
    const double gain = incumbent_f - nm.fmin;
    if (nm.fmin < incumbent_f) {
      incumbent = nm.x;
      incumbent_f = nm.fmin;
    }
    if (converged && gain < opt.restart_tol) break;
  }

  BlpFitResult result;
  result.params = detail::params_from_theta(incumbent);
  result.avg_log_likelihood = -incumbent_f;
  result.iterations = iterations;
  result.converged = converged;
  result.draws = r_draws;
  result.seed = seed;
  result.init_mu = mu0;
  return result;
}

// Oracle sampler for recovery tests and the synth-survey command: one beta
// per respondent, then independent logit choices over all 28 pairs.
inline SurveyDataset generate_synthetic_survey(const MvnParams& true_params, int n,
                                               std::uint64_t seed) {
  SurveyDataset survey;
  survey.respondents.reserve(std::max(n, 0));
  SplitMix64 g(seed);
  for (int k = 1; k <= n; ++k) {
    Respondent r;
    r.respondent_id = k;
    const auto beta = sample_beta(true_params, g()).beta;
    const auto s = profile_scores(beta);
    for (int q = 0; q < kNumProfilePairs; ++q) {
      const auto [i, j] = kProfilePairs[q];
      const double p_first = std::exp(log_logistic(s[i - 1] - s[j - 1]));
      r.chosen[q] = static_cast<std::uint8_t>(bernoulli(g, p_first) ? i : j);
    }
    survey.respondents.push_back(r);
  }
  return survey;
}

}  // namespace kex
