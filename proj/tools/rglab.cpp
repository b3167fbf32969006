#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rglab/commands.hpp"

namespace {

using rglab::Index;

int parse_workers(const std::string& value) {
  if (value == "auto") {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  const int parsed = std::stoi(value);
  if (parsed < 1) {
    throw rglab::ConfigError("workers must be >= 1 or \"auto\"");
  }
  return parsed;
}

rglab::ApproxMode parse_mode(const std::string& value) {
  if (value == "paper_literal") return rglab::ApproxMode::paper_literal;
  if (value == "synthetic") return rglab::ApproxMode::synthetic;
  throw rglab::ConfigError("mode must be paper_literal or synthetic");
}

rglab::SigmaQScale parse_scale(const std::string& value) {
  if (value == "raw") return rglab::SigmaQScale::raw;
  if (value == "fisher") return rglab::SigmaQScale::fisher;
  throw rglab::ConfigError("scale must be raw or fisher");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rglab: simulation lab for gene-list robustness under correlation "
      "ranking"};
  app.require_subcommand(1);
  // Options live on subcommands; fallthrough lets --config appear after the
  // subcommand name. Config files use [subcommand] sections; command-line
  // flags win over file values.
  app.fallthrough(true);
  app.set_config("--config", "",
                 "Key-value config file with [subcommand] sections");

  // figure1
  rglab::Figure1Config fig1;
  std::string fig1_out = fig1.out_dir.string();
  CLI::App* figure1 = app.add_subcommand(
      "figure1", "Fisher-transformed correlation diagnostics (histogram, QQ)");
  figure1->add_option("--n", fig1.n, "Sample size")->capture_default_str();
  figure1->add_option("--k", fig1.k, "Feature count")->capture_default_str();
  figure1->add_option("--u", fig1.u, "Support size")->capture_default_str();
  figure1->add_option("--seed", fig1.seed, "Root seed")->capture_default_str();
  figure1->add_option("--bins", fig1.bins,
                      "Histogram bin count (0 = Sturges default)")
      ->capture_default_str();
  figure1->add_option("--out", fig1_out, "Output directory")
      ->capture_default_str();

  // figure2
  rglab::Figure2Config fig2;
  std::string fig2_out = fig2.out_dir.string();
  std::string fig2_mode = "paper_literal";
  std::string fig2_scale = "raw";
  std::string fig2_workers = "1";
  std::vector<Index> fig2_grid = fig2.n_grid;
  CLI::App* figure2 = app.add_subcommand(
      "figure2", "Straightforward vs. approximated selection estimators");
  figure2->add_option("--n-grid", fig2_grid, "Sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  figure2->add_option("--k", fig2.k, "Feature count")->capture_default_str();
  figure2->add_option("--u", fig2.u, "Support size")->capture_default_str();
  figure2->add_option("--B", fig2.B, "Replicates per n")
      ->capture_default_str();
  figure2->add_option("--seed", fig2.seed, "Root seed")->capture_default_str();
  figure2->add_option("--mode", fig2_mode, "paper_literal | synthetic")
      ->capture_default_str();
  figure2->add_option("--scale", fig2_scale, "raw | fisher")
      ->capture_default_str();
  figure2->add_option("--workers", fig2_workers, "Worker count or \"auto\"")
      ->envname("RGLAB_WORKERS")
      ->capture_default_str();
  figure2->add_option("--out", fig2_out, "Output directory")
      ->capture_default_str();

  // check-independence
  double ci_rho1 = 0.0;
  double ci_rho2 = 0.0;
  double ci_rho12 = 0.0;
  bool ci_json = false;
  CLI::App* check = app.add_subcommand(
      "check-independence",
      "Quadratic solvability of the asymptotic-independence condition");
  check->add_option("rho1", ci_rho1, "Correlation of X_1 with Y")->required();
  check->add_option("rho2", ci_rho2, "Correlation of X_2 with Y")->required();
  CLI::Option* ci_rho12_opt =
      check->add_option("rho_x1x2", ci_rho12, "Feature-feature correlation");
  check->add_flag("--json", ci_json, "Emit JSON instead of text");

  // asymptotic-cov
  rglab::AsymptoticCovConfig acov;
  std::string acov_out = acov.out_dir.string();
  std::string acov_spec;
  CLI::App* asym = app.add_subcommand(
      "asymptotic-cov",
      "Asymptotic covariance of Fisher-transformed correlations");
  asym->add_option("--spec", acov_spec, "JSON file with a covariance matrix")
      ->required();
  asym->add_option("--out", acov_out, "Output directory")
      ->capture_default_str();

  // sample-size
  rglab::SampleSizeConfig ssz;
  std::string ssz_out = ssz.out_dir.string();
  std::string ssz_mode = "paper_literal";
  std::string ssz_scale = "raw";
  std::string ssz_workers = "1";
  std::string ssz_estimator = "straightforward";
  CLI::App* ss = app.add_subcommand(
      "sample-size", "Minimal n meeting a robustness target");
  ss->add_option("--k", ssz.k, "Feature count")->capture_default_str();
  ss->add_option("--u", ssz.u, "Support size")->capture_default_str();
  ss->add_option("--B", ssz.B, "Replicates per probe")->capture_default_str();
  ss->add_option("--target", ssz.target, "Required mean overlap in (0, 1]")
      ->capture_default_str();
  ss->add_option("--estimator", ssz_estimator,
                 "straightforward | approximated")
      ->capture_default_str();
  ss->add_option("--n-lo", ssz.n_lo, "Search lower bound")
      ->capture_default_str();
  ss->add_option("--n-hi", ssz.n_hi, "Search upper bound")
      ->capture_default_str();
  ss->add_option("--resolution", ssz.resolution, "Bisection stop width")
      ->capture_default_str();
  ss->add_option("--seed", ssz.seed, "Root seed")->capture_default_str();
  ss->add_option("--mode", ssz_mode, "paper_literal | synthetic")
      ->capture_default_str();
  ss->add_option("--scale", ssz_scale, "raw | fisher")
      ->capture_default_str();
  ss->add_option("--workers", ssz_workers, "Worker count or \"auto\"")
      ->envname("RGLAB_WORKERS")
      ->capture_default_str();
  ss->add_option("--out", ssz_out, "Output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (figure1->parsed()) {
      fig1.out_dir = fig1_out;
      rglab::cmd_figure1(fig1);
    } else if (figure2->parsed()) {
      fig2.n_grid = fig2_grid;
      fig2.mode = parse_mode(fig2_mode);
      fig2.scale = parse_scale(fig2_scale);
      fig2.workers = parse_workers(fig2_workers);
      fig2.out_dir = fig2_out;
      rglab::cmd_figure2(fig2);
    } else if (check->parsed()) {
      std::optional<double> rho12;
      if (ci_rho12_opt->count() > 0) rho12 = ci_rho12;
      const auto report = rglab::check_independence(ci_rho1, ci_rho2, rho12);
      rglab::print_independence(std::cout, report, ci_json);
    } else if (asym->parsed()) {
      acov.spec_file = acov_spec;
      acov.out_dir = acov_out;
      rglab::cmd_asymptotic_cov(acov);
    } else if (ss->parsed()) {
      if (ssz_estimator == "straightforward") {
        ssz.estimator = rglab::EstimatorKind::straightforward;
      } else if (ssz_estimator == "approximated") {
        ssz.estimator = rglab::EstimatorKind::approximated;
      } else {
        throw rglab::ConfigError(
            "estimator must be straightforward or approximated");
      }
      ssz.mode = parse_mode(ssz_mode);
      ssz.scale = parse_scale(ssz_scale);
      ssz.workers = parse_workers(ssz_workers);
      ssz.out_dir = ssz_out;
      rglab::cmd_sample_size(ssz);
    }
  } catch (const rglab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
