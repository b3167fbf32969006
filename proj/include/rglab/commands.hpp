#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rglab/asymptotics.hpp"
#include "rglab/selection.hpp"

namespace rglab {

// Thrown for invalid configuration; the CLI maps it to exit code 2 (runtime
// failures keep exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Figure1Config {
  Index n = 59;
  Index k = 20000;
  Index u = 100;
  std::uint64_t seed = 1;
  int bins = 0;  // 0 selects the Sturges default
  std::filesystem::path out_dir = "rglab_out";
};

// Samples the sparse model, correlates, Fisher-transforms and emits
// fisher_values.csv, histogram.csv, qq.csv, summary.json and manifest.json.
void cmd_figure1(const Figure1Config& config);

struct Figure2Config {
  std::vector<Index> n_grid = {600, 800, 1000, 1200};
  Index k = 20000;
  Index u = 100;
  Index B = 10;
  std::uint64_t seed = 1;
  ApproxMode mode = ApproxMode::paper_literal;
  SigmaQScale scale = SigmaQScale::raw;
  int workers = 1;
  std::filesystem::path out_dir = "rglab_out";
};

// Runs the straightforward-vs-approximated experiment over the sample-size
// grid and emits curves.csv, replicates.csv, summary.json and manifest.json.
void cmd_figure2(const Figure2Config& config);

struct IndependenceReport {
  double rho1 = 0.0;
  double rho2 = 0.0;
  QuadraticCondition condition;
  std::vector<double> roots_in_unit;  // quadratic roots inside (-1, 1)
  std::optional<double> rho_x1x2;
  std::optional<double> lhs;             // condition LHS at rho_x1x2
  std::optional<double> min_eigenvalue;  // of the implied correlation matrix
  std::optional<bool> psd;
};

IndependenceReport check_independence(double rho1, double rho2,
                                      std::optional<double> rho_x1x2);

void print_independence(std::ostream& out, const IndependenceReport& report,
                        bool as_json);

struct AsymptoticCovConfig {
  std::filesystem::path spec_file;  // JSON {"covariance": [[...], ...]}
  std::filesystem::path out_dir = "rglab_out";
};

// Emits sigma4.csv after asserting the unit diagonal.
void cmd_asymptotic_cov(const AsymptoticCovConfig& config);

struct SampleSizeConfig {
  Index k = 20000;
  Index u = 100;
  Index B = 10;
  double target = 0.5;
  EstimatorKind estimator = EstimatorKind::straightforward;
  Index n_lo = 100;
  Index n_hi = 3200;
  Index resolution = 50;
  std::uint64_t seed = 1;
  ApproxMode mode = ApproxMode::paper_literal;
  SigmaQScale scale = SigmaQScale::raw;
  int workers = 1;
  std::filesystem::path out_dir = "rglab_out";
};

// Emits samplesize.json with the search outcome and probe trace.
void cmd_sample_size(const SampleSizeConfig& config);

}  // namespace rglab
