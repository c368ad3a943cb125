// Batch front end for the kidney-exchange pipeline:
//   synth-survey  write a synthetic pairwise-comparison survey
//   fit           estimate BT scores or the BLP distribution from a survey
//   simulate      run a multi-run matching experiment from a config file
//   report        rebuild summary tables from a per-run metrics table
//
// Exit codes: 0 success, 1 usage/config, 2 data/parse, 3 numerical.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kex/blp.hpp"
#include "kex/bt.hpp"
#include "kex/experiment.hpp"
#include "kex/params_io.hpp"
#include "kex/survey.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct GlobalFlags {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  bool verbose = false;
};

int cmd_synth_survey(const GlobalFlags& g, int n, const std::vector<double>& mu,
                     const std::vector<double>& chol, const std::vector<double>& sigma_diag) {
  if (g.out.empty()) throw kex::ConfigError("synth-survey requires --out");
  if (n < 0) throw kex::ConfigError("--n must be >= 0");
  if (!chol.empty() && !sigma_diag.empty())
    throw kex::ConfigError("--chol and --sigma-diag are mutually exclusive");

  kex::MvnParams params;
  params.mu = {mu[0], mu[1], mu[2]};
  if (!chol.empty()) {
    if (chol.size() != 6)
      throw kex::ConfigError("--chol needs 6 values (row-major lower triangle)");
    std::copy(chol.begin(), chol.end(), params.chol.begin());
  } else {
    std::array<double, 3> d = {1.0, 0.5, 0.25};
    if (!sigma_diag.empty()) {
      if (sigma_diag.size() != 3) throw kex::ConfigError("--sigma-diag needs 3 values");
      for (double v : sigma_diag)
        if (v < 0.0) throw kex::ConfigError("--sigma-diag values must be >= 0");
      d = {sigma_diag[0], sigma_diag[1], sigma_diag[2]};
    }
    params = kex::MvnParams::diag(params.mu, d);
  }

  const auto survey = kex::generate_synthetic_survey(params, n, g.seed);
  kex::write_survey_csv(g.out, survey);
  std::printf("synth-survey: wrote N=%d respondents (seed=%llu) to %s\n", n,
              static_cast<unsigned long long>(g.seed), g.out.c_str());
  return kExitOk;
}

int cmd_fit(const GlobalFlags& g, const std::string& model, const std::string& survey_path,
            int draws, int report_draws, int max_iters) {
  if (g.out.empty()) throw kex::ConfigError("fit requires --out");
  if (!std::filesystem::exists(survey_path))
    throw kex::IoError("survey file not found: " + survey_path);
  const auto survey = kex::read_survey_csv(survey_path);

  if (model == "bt") {
    const auto fit = kex::fit_bt(survey);
    if (fit.scores.non_identifiable)
      std::fprintf(stderr,
                   "warning: some profile never won or never lost; "
                   "applied 0.5 pseudocounts, result flagged non_identifiable\n");
    kex::BtParamsFile out;
    out.scores = fit.scores;
    out.iterations = fit.iterations;
    out.converged = fit.converged;
    out.respondents = static_cast<std::int64_t>(survey.respondents.size());
    kex::write_bt_params(g.out, out);
    std::printf("fit bt: N=%zu iterations=%d converged=%d -> %s\n",
                survey.respondents.size(), fit.iterations, int(fit.converged),
                g.out.c_str());
    return kExitOk;
  }
  if (model == "blp") {
    kex::BlpFitOptions opt;
    if (max_iters > 0) opt.max_iterations = max_iters;
    const auto fit = kex::fit_blp(survey, draws, g.seed, opt);
    if (!fit.converged)
      std::fprintf(stderr, "warning: simplex search hit the iteration cap; "
                           "writing best parameters found so far\n");
    kex::BlpParamsFile out;
    out.params = fit.params;
    out.respondents = static_cast<std::int64_t>(survey.respondents.size());
    out.draws = fit.draws;
    out.avg_log_likelihood = fit.avg_log_likelihood;
    out.report_draws = report_draws;
    {
      kex::BlpLikelihood reporter(
          survey, kex::CommonRandomDraws::make(report_draws, kex::hash64(g.seed, 0x5e9)));
      out.report_avg_log_likelihood = reporter.average_log_likelihood(fit.params);
    }
    out.seed = fit.seed;
    out.iterations = fit.iterations;
    out.converged = fit.converged;
    kex::write_blp_params(g.out, out);
    std::printf("fit blp: N=%zu R=%d iterations=%d converged=%d avg_ll=%.6f -> %s\n",
                survey.respondents.size(), draws, fit.iterations, int(fit.converged),
                fit.avg_log_likelihood, g.out.c_str());
    if (g.verbose) {
      const auto s = fit.params.sigma();
      std::printf("  mu=(%s %s %s)\n", kex::format_g9(fit.params.mu[0]).c_str(),
                  kex::format_g9(fit.params.mu[1]).c_str(),
                  kex::format_g9(fit.params.mu[2]).c_str());
      std::printf("  sigma_diag=(%s %s %s)\n", kex::format_g9(s[0]).c_str(),
                  kex::format_g9(s[4]).c_str(), kex::format_g9(s[8]).c_str());
    }
    return kExitOk;
  }
  throw kex::ConfigError("unknown model '" + model + "' (expected bt or blp)");
}

int cmd_simulate(const GlobalFlags& g, int max_threads) {
  if (g.config.empty()) throw kex::ConfigError("simulate requires --config");
  if (!std::filesystem::exists(g.config))
    throw kex::IoError("config file not found: " + g.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(kex::read_file(g.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw kex::DataError(std::string(g.config) + ": " + e.what());
  }
  const auto base = std::filesystem::path(g.config).parent_path();
  auto cfg = kex::parse_experiment_config(j, base);

  if (!std::filesystem::exists(cfg.blp_params))
    throw kex::IoError("blp_params file not found: " + cfg.blp_params.string());
  const auto blp = kex::read_blp_params(cfg.blp_params);
  std::optional<kex::BtScores> bt;
  if (!cfg.bt_params.empty()) {
    if (!std::filesystem::exists(cfg.bt_params))
      throw kex::IoError("bt_params file not found: " + cfg.bt_params.string());
    bt = kex::read_bt_params(cfg.bt_params).scores;
  }

  const auto result = kex::run_experiment(cfg, bt, blp.params, max_threads);
  kex::write_experiment_results(result, j, cfg.out_dir);
  std::printf("simulate: %d runs x %zu conditions -> %s\n", cfg.runs,
              cfg.conditions.size(), cfg.out_dir.string().c_str());
  if (g.verbose)
    for (const auto& cs : result.summary.conditions)
      if (cs.rank)
        std::printf("  %-13s rank median=%s\n",
                    std::string(kex::to_string(cs.condition)).c_str(),
                    kex::format_g9(cs.rank->median).c_str());
  return kExitOk;
}

int cmd_report(const GlobalFlags& g, const std::string& metrics_path) {
  if (g.out.empty()) throw kex::ConfigError("report requires --out");
  if (!std::filesystem::exists(metrics_path))
    throw kex::IoError("metrics file not found: " + metrics_path);
  const auto rows = kex::read_metrics_csv(metrics_path);
  const auto summary = kex::summarize(rows);
  const std::filesystem::path out_dir(g.out);
  std::filesystem::create_directories(out_dir);
  kex::emit_tables(summary, out_dir);

  nlohmann::json jsum;
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& cs : summary.conditions) {
    nlohmann::json c;
    c["condition"] = std::string(kex::to_string(cs.condition));
    c["runs"] = cs.runs;
    if (cs.rank) {
      c["rank_median"] = cs.rank->median;
      c["rank_q1"] = cs.rank->q1;
      c["rank_q3"] = cs.rank->q3;
    }
    conditions.push_back(std::move(c));
  }
  jsum["conditions"] = std::move(conditions);
  kex::write_file(out_dir / "summary.json", jsum.dump(2) + "\n");
  std::printf("report: %zu rows -> %s\n", rows.size(), g.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kidney-exchange preference-aware matching pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "master seed for all randomness");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--config", g.config, "experiment config file (JSON)");
  app.add_flag("--verbose", g.verbose, "extra diagnostics");

  auto* synth = app.add_subcommand("synth-survey", "generate a synthetic survey file");
  int synth_n = 500;
  std::vector<double> synth_mu = {2.0, 1.0, 0.5};
  std::vector<double> synth_chol, synth_sigma_diag;
  synth->add_option("--n", synth_n, "number of respondents");
  synth->add_option("--mu", synth_mu, "true mean of the coefficient distribution (3 values)")
      ->expected(3)
      ->delimiter(',');
  synth->add_option("--chol", synth_chol,
                    "true Cholesky factor, row-major lower triangle (6 values)")
      ->expected(6)
      ->delimiter(',');
  synth->add_option("--sigma-diag", synth_sigma_diag,
                    "true diagonal covariance (3 values); default 1 0.5 0.25")
      ->expected(3)
      ->delimiter(',');

  auto* fit = app.add_subcommand("fit", "fit a preference model from a survey");
  std::string fit_model, fit_survey;
  int fit_draws = 500, fit_report_draws = 200, fit_max_iters = 0;
  fit->add_option("--model", fit_model, "bt or blp")->required();
  fit->add_option("--survey", fit_survey, "survey csv path")->required();
  fit->add_option("--draws", fit_draws, "Monte Carlo draws for the blp fit");
  fit->add_option("--report-draws", fit_report_draws,
                  "fresh draws for the reported log-likelihood");
  fit->add_option("--max-iters", fit_max_iters, "simplex iteration budget");

  auto* sim = app.add_subcommand("simulate", "run a matching experiment");
  int sim_threads = 0;
  sim->add_option("--threads", sim_threads, "worker threads (default: hardware)");

  auto* rep = app.add_subcommand("report", "rebuild tables from a metrics file");
  std::string rep_metrics;
  rep->add_option("--metrics", rep_metrics, "per-run metrics csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed())
      return cmd_synth_survey(g, synth_n, synth_mu, synth_chol, synth_sigma_diag);
    if (fit->parsed())
      return cmd_fit(g, fit_model, fit_survey, fit_draws, fit_report_draws, fit_max_iters);
    if (sim->parsed()) return cmd_simulate(g, sim_threads);
    if (rep->parsed()) return cmd_report(g, rep_metrics);
  } catch (const kex::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const kex::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const kex::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const kex::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
