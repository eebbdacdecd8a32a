#pragma once

// Benchmark drivers: feature-selection comparisons over an M grid, the exact
// KCCA baseline, Monte-Carlo spectral checks and score dumps.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rfcca/config.hpp"
#include "rfcca/data.hpp"
#include "rfcca/kernels.hpp"
#include "rfcca/scoring.hpp"

namespace rfcca {

struct MetricsRow {
  std::string algorithm;
  Eigen::Index m = 0;
  Eigen::Index repetition = 0;
  std::uint64_t seed = 0;
  double total_cc = 0.0;
  double top10_cc = 0.0;
  double largest_cc = 0.0;
  double select_time_ms = 0.0;
  double cca_time_ms = 0.0;
};

// "algorithm,M,repetition,seed,total_cc,top10_cc,largest_cc,select_time_ms,cca_time_ms"
const std::string& metrics_header();
// Timing columns are written as 0 when `timing` is false.
std::string metrics_csv_line(const MetricsRow& row, bool timing = true);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows, bool timing = true);

// Copula-transformed views with their kernel bandwidths.
struct PreparedData {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  std::size_t dropped_rows = 0;
};

Dataset load_source(const ExperimentConfig& config);
PreparedData prepare_data(const ExperimentConfig& config);
PreparedData prepare_data(const ExperimentConfig& config, const Dataset& raw);

std::uint64_t repetition_seed(std::uint64_t master, std::string_view algorithm, Eigen::Index m,
                              Eigen::Index repetition);

// One (algorithm, M, repetition) cell. KCCA is not accepted here.
MetricsRow run_cell(const ExperimentConfig& config, const PreparedData& data, Algorithm algorithm,
                    Eigen::Index m, Eigen::Index repetition);
// LS regularizer for a grid point: config.lambda_ls if set, otherwise the
// grid entry (times the selection row count) with the best total_cc on a
// held-out repetition.
double choose_ls_lambda(const ExperimentConfig& config, const PreparedData& data, Eigen::Index m);

// Rows in roster order, then M-grid order, then repetition; a requested KCCA
// baseline comes last. `on_row` sees each row as soon as it is computed.
std::vector<MetricsRow> run_benchmark(const ExperimentConfig& config,
                                      const std::function<void(const MetricsRow&)>& on_row = {});
std::vector<MetricsRow> run_benchmark(const ExperimentConfig& config, const PreparedData& data,
                                      const std::function<void(const MetricsRow&)>& on_row = {});

// Exact Gaussian kernels on both views; throws ConfigError above config.max_n.
MetricsRow run_kcca_baseline(const ExperimentConfig& config);
MetricsRow run_kcca_baseline(const ExperimentConfig& config, const PreparedData& data);

struct SpectralTrial {
  Eigen::Index trial = 0;
  std::uint64_t seed = 0;
  SpectralReport report;
};

struct SpectralRun {
  SpectralMode mode = SpectralMode::LeverageScore;
  Eigen::Index n = 0;
  double sigma = 0.0;
  double lambda = 0.0;
  double s_lambda = 0.0;
  double trace_kb = 0.0;     // tr(K (K + lambda I)^{-1})
  double kernel_norm = 0.0;  // |K|_2
  Eigen::Index m = 0;
  Eigen::Index pool_size = 0;
  Eigen::Index required_features = 0;
  Eigen::Index rff_required_features = 0;
  std::vector<SpectralTrial> trials;
  std::vector<std::pair<double, double>> hold_fraction;  // (Delta, fraction of trials)

  bool norm_at_least_lambda() const { return kernel_norm >= lambda; }
  std::string trial_record(const SpectralTrial& t) const;
  std::string summary_record() const;
};

// Lambda with S_lambda(K) = target, by bisection on log(lambda).
double lambda_for_effective_dimension(const KernelMatrix& k, double target);

// Runs on the copula-transformed X view of the configured source.
SpectralRun run_spectral_check(const ExperimentConfig& config);
SpectralRun run_spectral_check(const ExperimentConfig& config, const Eigen::MatrixXd& x, double sigma);

struct SelectionDump {
  std::string view;  // "x" or "y"
  ScoreVector scores;
  Selection selection;
};

// Scores the pool of one repetition with config.select.rule and selects
// config.select.m features.
std::vector<SelectionDump> run_select(const ExperimentConfig& config);
std::vector<SelectionDump> run_select(const ExperimentConfig& config, const PreparedData& data);
// "view,index,score,chosen,weight_ratio", one line per pool feature.
void write_selection_csv(std::ostream& out, const std::vector<SelectionDump>& dumps);

}  // namespace rfcca
