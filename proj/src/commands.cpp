#include "rglab/commands.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rglab/diagnostics.hpp"
#include "rglab/io.hpp"

namespace rglab {

namespace {

using nlohmann::json;

constexpr const char* kArtifactVersion = "0.1.0";

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Data files first, then the manifest describing them.
class OutputSink {
 public:
  explicit OutputSink(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
    start_ = std::chrono::steady_clock::now();
  }

  void emit(const std::string& name, std::string_view content) {
    write_text_file(dir_ / name, content);
    checksums_[name] = fnv1a64_hex(content);
  }

  void finish(const std::string& command, const json& config_echo) {
    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    json manifest;
    manifest["artifact_version"] = kArtifactVersion;
    manifest["checksums"] = checksums_;
    manifest["command"] = command;
    manifest["config"] = config_echo;
    manifest["runtime_seconds"] = elapsed;
    manifest["timestamp"] = iso8601_utc_now();
    write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::chrono::steady_clock::time_point start_;
  json checksums_ = json::object();
};

json normality_to_json(const NormalitySummary& s) {
  return json{{"mean", s.mean},
              {"sd", s.sd},
              {"skewness", s.skewness},
              {"excess_kurtosis", s.excess_kurtosis},
              {"ks_distance", s.ks_distance}};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void cmd_figure1(const Figure1Config& config) {
  require(config.n >= 4, "figure1 needs n >= 4");
  require(config.u > 0 && config.u < config.k, "figure1 needs 0 < u < k");
  require(config.bins >= 0, "figure1 needs bins >= 1 (or 0 for the default)");

  OutputSink sink(config.out_dir);
  RngStream rng = RngStream::root(config.seed).child("figure1");

  SparseLinearSpec spec{config.k, config.u, std::nullopt};
  RngStream data_stream = rng.child("data");
  auto [data, support] = sample_sparse_dataset(spec, config.n, data_stream);

  const CorrelationVector r = correlate_all(data);
  const FisherVector z = fisher_all(r);

  std::vector<bool> in_support(static_cast<std::size_t>(config.k), false);
  for (Index idx : support) in_support[static_cast<std::size_t>(idx)] = true;

  std::ostringstream values_csv;
  values_csv << "feature,r,fisher_r,in_support\n";
  for (Index i = 0; i < config.k; ++i) {
    values_csv << i << ',' << format_double(r.values[i]) << ','
               << format_double(z.values[i]) << ','
               << (in_support[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  }
  sink.emit("fisher_values.csv", values_csv.str());

  const std::vector<double> z_std(z.values.data(),
                                  z.values.data() + z.values.size());
  const int bins = config.bins > 0
                       ? config.bins
                       : sturges_bin_count(z_std.size());
  const HistogramData h = histogram(z_std, bins);
  std::ostringstream hist_csv;
  hist_csv << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    hist_csv << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1])
             << ',' << h.counts[b] << '\n';
  }
  sink.emit("histogram.csv", hist_csv.str());

  const std::vector<QQPair> qq = qq_normal(z_std);
  std::ostringstream qq_csv;
  qq_csv << "theoretical,sample\n";
  for (const QQPair& p : qq) {
    qq_csv << format_double(p.theoretical) << ',' << format_double(p.sample)
           << '\n';
  }
  sink.emit("qq.csv", qq_csv.str());

  const NormalitySummary normality = normality_summary(z_std);
  json config_echo{{"model", "sparse_linear"}, {"n", config.n},
                   {"k", config.k},           {"u", config.u},
                   {"seed", config.seed},     {"bins", bins}};
  json summary;
  summary["clamped_correlations"] = r.clamped.size();
  summary["config"] = config_echo;
  summary["normality"] = normality_to_json(normality);
  summary["support"] = support;
  sink.emit("summary.json", summary.dump(2) + "\n");

  json manifest_config = config_echo;
  manifest_config["out_dir"] = config.out_dir.string();
  sink.finish("figure1", manifest_config);
}

void cmd_figure2(const Figure2Config& config) {
  require(!config.n_grid.empty(), "figure2 needs a non-empty n grid");
  for (Index n : config.n_grid) {
    require(n >= 4, "figure2 needs every n >= 4");
  }
  require(config.u > 0 && config.u < config.k, "figure2 needs 0 < u < k");
  require(config.B >= 1, "figure2 needs B >= 1");
  require(config.workers >= 1, "figure2 needs workers >= 1");

  OutputSink sink(config.out_dir);
  const RngStream rng = RngStream::root(config.seed).child("figure2");

  SparseLinearSpec spec{config.k, config.u, std::nullopt};
  const std::vector<ExperimentSummary> summaries =
      run_experiment(spec, config.n_grid, config.B, config.mode, config.scale,
                     rng, config.workers);

  std::ostringstream curves_csv;
  curves_csv << "n,d_mean,d_sd,c_mean,c_sd,mode,scale\n";
  for (const ExperimentSummary& s : summaries) {
    curves_csv << s.n << ',' << format_double(s.d_mean) << ','
               << format_double(s.d_sd) << ',' << format_double(s.c_mean)
               << ',' << format_double(s.c_sd) << ',' << to_string(config.mode)
               << ',' << to_string(config.scale) << '\n';
  }
  sink.emit("curves.csv", curves_csv.str());

  std::ostringstream reps_csv;
  reps_csv << "n,replicate,d_t,c_t,sigma_q_hat,sigma_q_clamped\n";
  for (const ExperimentSummary& s : summaries) {
    for (Index t = 0; t < s.B; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      reps_csv << s.n << ',' << t << ',' << format_double(s.d_ts[ti]) << ','
               << format_double(s.c_ts[ti]) << ','
               << format_double(s.sigma_q_hats[ti]) << ','
               << (s.sigma_q_clamped[ti] ? 1 : 0) << '\n';
    }
  }
  sink.emit("replicates.csv", reps_csv.str());

  json config_echo{{"model", "sparse_linear"},
                   {"n_grid", config.n_grid},
                   {"k", config.k},
                   {"u", config.u},
                   {"B", config.B},
                   {"seed", config.seed},
                   {"mode", to_string(config.mode)},
                   {"scale", to_string(config.scale)}};
  json per_n = json::array();
  for (const ExperimentSummary& s : summaries) {
    per_n.push_back(json{{"n", s.n},
                         {"d_mean", s.d_mean},
                         {"d_sd", s.d_sd},
                         {"c_mean", s.c_mean},
                         {"c_sd", s.c_sd}});
  }
  json summary;
  summary["config"] = config_echo;
  summary["curves"] = per_n;
  sink.emit("summary.json", summary.dump(2) + "\n");

  json manifest_config = config_echo;
  manifest_config["out_dir"] = config.out_dir.string();
  manifest_config["workers"] = config.workers;
  sink.finish("figure2", manifest_config);
}

IndependenceReport check_independence(double rho1, double rho2,
                                      std::optional<double> rho_x1x2) {
  IndependenceReport report;
  report.rho1 = rho1;
  report.rho2 = rho2;
  report.condition = gaussian_condition(rho1, rho2);
  for (double root : report.condition.real_roots()) {
    if (std::abs(root) < 1.0) {
      report.roots_in_unit.push_back(root);
    }
  }
  if (rho_x1x2) {
    const double c = *rho_x1x2;
    if (!(std::abs(c) < 1.0)) {
      std::ostringstream msg;
      msg << "rho_x1x2 must lie in (-1, 1), got " << c;
      throw std::domain_error(msg.str());
    }
    report.rho_x1x2 = c;
    Eigen::Matrix3d sigma;
    sigma << 1.0, c, rho1,  //
        c, 1.0, rho2,       //
        rho1, rho2, 1.0;
    const CubicRoots roots = char_poly_roots(rho1, rho2, c);
    if (roots.real_roots.empty()) {
      throw std::runtime_error("eigenvalue computation returned no real root");
    }
    report.min_eigenvalue = roots.real_roots.front();
    report.psd = is_valid_correlation_structure(rho1, rho2, c);
    if (*report.psd) {
      report.lhs = independence_lhs(isserlis_pair_moments(sigma));
    }
  }
  return report;
}

void print_independence(std::ostream& out, const IndependenceReport& report,
                        bool as_json) {
  const QuadraticCondition& q = report.condition;
  if (as_json) {
    json j;
    j["rho1"] = report.rho1;
    j["rho2"] = report.rho2;
    j["quadratic"] = {{"a", q.a}, {"b", q.b}, {"c", q.c}};
    j["discriminant"] = q.discriminant;
    j["roots_in_unit_interval"] = report.roots_in_unit;
    if (report.rho_x1x2) {
      j["rho_x1x2"] = *report.rho_x1x2;
      j["min_eigenvalue"] = *report.min_eigenvalue;
      j["psd"] = *report.psd;
      if (report.lhs) j["independence_lhs"] = *report.lhs;
    }
    out << j.dump(2) << '\n';
    return;
  }

  out << "condition: (" << format_double(q.a) << ")*rho^2 + ("
      << format_double(q.b) << ")*rho + (" << format_double(q.c) << ") = 0\n";
  out << "discriminant = " << format_double(q.discriminant) << '\n';
  if (report.roots_in_unit.empty()) {
    out << "no real solution in (-1, 1): asymptotic independence "
           "impossible for this (rho1, rho2)\n";
  } else {
    out << "roots in (-1, 1):";
    for (double root : report.roots_in_unit) {
      out << ' ' << format_double(root);
    }
    out << '\n';
  }
  if (report.rho_x1x2) {
    out << "rho_x1x2 = " << format_double(*report.rho_x1x2)
        << ": min eigenvalue = " << format_double(*report.min_eigenvalue)
        << (*report.psd ? " (valid structure)" : " (not a valid structure)")
        << '\n';
    if (report.lhs) {
      out << "independence LHS = " << format_double(*report.lhs) << '\n';
    }
  }
}

void cmd_asymptotic_cov(const AsymptoticCovConfig& config) {
  json parsed;
  try {
    parsed = json::parse(read_text_file(config.spec_file));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("cannot parse spec file: ") + e.what());
  }
  if (!parsed.contains("covariance") || !parsed["covariance"].is_array()) {
    throw ConfigError("spec file needs a \"covariance\" matrix");
  }
  const auto& rows = parsed["covariance"];
  const auto dim = static_cast<Index>(rows.size());
  require(dim >= 2, "covariance must be at least 2x2");
  GaussianSpec spec;
  spec.covariance.resize(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
      throw ConfigError("covariance rows must all have the matrix dimension");
    }
    for (Index j = 0; j < dim; ++j) {
      spec.covariance(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }

  Eigen::MatrixXd sigma4;
  try {
    sigma4 = asymptotic_fisher_covariance(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const Index k = spec.k();
  for (Index i = 0; i < k; ++i) {
    if (std::abs(sigma4(i, i) - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "unit-diagonal check failed at feature " << i << ": "
          << format_double(sigma4(i, i));
      throw std::runtime_error(msg.str());
    }
  }

  OutputSink sink(config.out_dir);
  std::ostringstream csv;
  csv << "feature";
  for (Index j = 0; j < k; ++j) csv << ',' << j;
  csv << '\n';
  for (Index i = 0; i < k; ++i) {
    csv << i;
    for (Index j = 0; j < k; ++j) csv << ',' << format_double(sigma4(i, j));
    csv << '\n';
  }
  sink.emit("sigma4.csv", csv.str());

  json config_echo{{"spec_file", config.spec_file.string()},
                   {"k", k},
                   {"out_dir", config.out_dir.string()}};
  sink.finish("asymptotic-cov", config_echo);
}

void cmd_sample_size(const SampleSizeConfig& config) {
  require(config.u > 0 && config.u < config.k, "sample-size needs 0 < u < k");
  require(config.B >= 1, "sample-size needs B >= 1");
  require(config.n_lo >= 4 && config.n_lo < config.n_hi,
          "sample-size needs 4 <= n_lo < n_hi");
  require(config.target > 0.0 && config.target <= 1.0,
          "sample-size target must lie in (0, 1]");
  require(config.workers >= 1, "sample-size needs workers >= 1");

  OutputSink sink(config.out_dir);
  const RngStream rng = RngStream::root(config.seed).child("sample_size");
  SparseLinearSpec spec{config.k, config.u, std::nullopt};
  const SampleSizeResult result = minimal_sample_size(
      spec, RobustnessCriterion{config.target}, config.estimator, config.n_lo,
      config.n_hi, config.B, config.mode, config.scale, rng, config.workers,
      config.resolution);

  json trace = json::array();
  for (const SampleSizeProbe& p : result.trace) {
    trace.push_back(json{{"n", p.n}, {"mean", p.mean}, {"sd", p.sd}});
  }
  json out;
  out["estimator"] = to_string(config.estimator);
  out["target"] = config.target;
  out["exhausted"] = result.exhausted;
  if (result.n_star) {
    out["n_star"] = *result.n_star;
  } else {
    out["n_star"] = nullptr;
  }
  out["best_n"] = result.best_n;
  out["best_mean"] = result.best_mean;
  out["resolution"] = result.resolution;
  out["trace"] = trace;
  sink.emit("samplesize.json", out.dump(2) + "\n");

  json config_echo{{"model", "sparse_linear"},
                   {"k", config.k},
                   {"u", config.u},
                   {"B", config.B},
                   {"target", config.target},
                   {"estimator", to_string(config.estimator)},
                   {"n_lo", config.n_lo},
                   {"n_hi", config.n_hi},
                   {"resolution", config.resolution},
                   {"seed", config.seed},
                   {"mode", to_string(config.mode)},
                   {"scale", to_string(config.scale)},
                   {"workers", config.workers},
                   {"out_dir", config.out_dir.string()}};
  sink.finish("sample-size", config_echo);
}

}  // namespace rglab
