#include "rfcca/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "linalg.hpp"
#include "rfcca/cca.hpp"
#include "rfcca/error.hpp"
#include "rfcca/features.hpp"
#include "rfcca/random.hpp"

namespace rfcca {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool needs_single_y(Algorithm a) { return a == Algorithm::EERF || a == Algorithm::ORCCA1; }

struct Views {
  Eigen::MatrixXd x_sel, y_sel;    // rows used for scoring
  Eigen::MatrixXd x_eval, y_eval;  // rows used for the final correlations
};

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  return m(rows, Eigen::all);
}

Views make_views(const ExperimentConfig& config, const PreparedData& data, std::uint64_t seed) {
  if (!config.split) return {data.x, data.y, data.x, data.y};
  const SplitIndices s = rfcca::split(data.x.rows(), *config.split, derive_seed(seed, "split"));
  return {rows_of(data.x, s.train), rows_of(data.y, s.train), rows_of(data.x, s.test),
          rows_of(data.y, s.test)};
}

FeaturePool pool(const Eigen::MatrixXd& v, Eigen::Index size, double sigma, std::uint64_t seed,
                 const char* tag, FeatureMap map = FeatureMap::CosineWithOffset,
                 Sampler sampler = Sampler::IidGaussian) {
  return sample_pool(v.cols(), size, sigma, map, sampler, derive_seed(seed, tag));
}

void check_kcca_guard(const ExperimentConfig& config, Eigen::Index n) {
  if (n > config.max_n) {
    throw ConfigError("exact kernel methods refused for n = " + std::to_string(n) + " > max_n = " +
                      std::to_string(config.max_n));
  }
}

// Runs one cell and returns (result, selection ms).
std::pair<CcaResult, double> cell_correlations(const ExperimentConfig& config, const PreparedData& data,
                                               const Views& v, Algorithm algorithm, Eigen::Index m,
                                               std::uint64_t seed, double ls_lambda) {
  const Eigen::Index m0 = config.pool_for(m);
  const double mu = config.mu;
  const auto start = Clock::now();
  switch (algorithm) {
    case Algorithm::RFF: {
      const FeatureMatrix zx = feature_matrix(v.x_eval, pool(v.x_eval, m, data.sigma_x, seed, "pool-x"), m);
      const FeatureMatrix zy = feature_matrix(v.y_eval, pool(v.y_eval, m, data.sigma_y, seed, "pool-y"), m);
      const double t = elapsed_ms(start);
      return {rcca(zx, zy, mu), t};
    }
    case Algorithm::ORF: {
      const Eigen::Index half = (m + 1) / 2;
      const auto px = pool(v.x_eval, half, data.sigma_x, seed, "pool-x", FeatureMap::CosSinPair, Sampler::Orthogonal);
      const auto py = pool(v.y_eval, half, data.sigma_y, seed, "pool-y", FeatureMap::CosSinPair, Sampler::Orthogonal);
      const FeatureMatrix zx = feature_matrix(v.x_eval, px, half);
      const FeatureMatrix zy = feature_matrix(v.y_eval, py, half);
      const double t = elapsed_ms(start);
      return {rcca(zx, zy, mu), t};
    }
    case Algorithm::LS: {
      const auto px = pool(v.x_sel, m0, data.sigma_x, seed, "pool-x");
      const auto py = pool(v.y_sel, m0, data.sigma_y, seed, "pool-y");
      const Selection sx = sample_proportional(ls_scores(feature_matrix(v.x_sel, px, m0), ls_lambda), m,
                                               derive_seed(seed, "sample-x"));
      const Selection sy = sample_proportional(ls_scores(feature_matrix(v.y_sel, py, m0), ls_lambda), m,
                                               derive_seed(seed, "sample-y"));
      const FeatureMatrix zx = reweighted_feature_matrix(v.x_eval, px, sx.indices, *sx.weight_ratios);
      const FeatureMatrix zy = reweighted_feature_matrix(v.y_eval, py, sy.indices, *sy.weight_ratios);
      const double t = elapsed_ms(start);
      return {rcca(zx, zy, mu), t};
    }
    case Algorithm::EERF:
    case Algorithm::ORCCA1: {
      const auto px = pool(v.x_sel, m0, data.sigma_x, seed, "pool-x");
      const FeatureMatrix zp = feature_matrix(v.x_sel, px, m0);
      const Eigen::VectorXd y = v.y_sel.col(0);
      const ScoreVector s = algorithm == Algorithm::EERF ? eerf_scores(zp, y) : orcca1_scores(zp, y, mu);
      const FeatureMatrix zx = feature_matrix(v.x_eval, px, select_top_m(s, m).indices);
      const double t = elapsed_ms(start);
      return {linear_cca(zx.values, v.y_eval, mu), t};
    }
    case Algorithm::ORCCA2: {
      const auto px = pool(v.x_sel, m0, data.sigma_x, seed, "pool-x");
      const auto py = pool(v.y_sel, m0, data.sigma_y, seed, "pool-y");
      const auto [sx, sy] = orcca2_scores(feature_matrix(v.x_sel, px, m0), feature_matrix(v.y_sel, py, m0), mu);
      const FeatureMatrix zx = feature_matrix(v.x_eval, px, select_top_m(sx, m).indices);
      const FeatureMatrix zy = feature_matrix(v.y_eval, py, select_top_m(sy, m).indices);
      const double t = elapsed_ms(start);
      return {rcca(zx, zy, mu), t};
    }
    case Algorithm::KCCA:
      break;
  }
  throw ParameterError("run_cell: KCCA is run through run_kcca_baseline");
}

MetricsRow make_row(Algorithm a, Eigen::Index m, Eigen::Index rep, std::uint64_t seed, const CcaResult& r,
                    double select_ms) {
  MetricsRow row;
  row.algorithm = std::string(algorithm_name(a));
  row.m = m;
  row.repetition = rep;
  row.seed = seed;
  row.total_cc = r.metrics.total;
  row.top10_cc = r.metrics.top10;
  row.largest_cc = r.metrics.largest;
  row.select_time_ms = select_ms;
  row.cca_time_ms = r.solve_ms;
  return row;
}

void check_benchmark(const ExperimentConfig& config, const PreparedData& data) {
  config.validate();
  for (Algorithm a : config.algorithms) {
    if (needs_single_y(a) && data.y.cols() != 1) {
      throw ConfigError(std::string(algorithm_name(a)) + " requires a single Y column, got d_y = " +
                        std::to_string(data.y.cols()));
    }
    if (a == Algorithm::KCCA) check_kcca_guard(config, data.x.rows());
  }
}

}  // namespace

const std::string& metrics_header() {
  static const std::string h =
      "algorithm,M,repetition,seed,total_cc,top10_cc,largest_cc,select_time_ms,cca_time_ms";
  return h;
}

std::string metrics_csv_line(const MetricsRow& row, bool timing) {
  std::ostringstream out;
  out << row.algorithm << ',' << row.m << ',' << row.repetition << ',' << row.seed << ','
      << fmt(row.total_cc) << ',' << fmt(row.top10_cc) << ',' << fmt(row.largest_cc) << ',';
  if (timing) {
    out << fmt(row.select_time_ms) << ',' << fmt(row.cca_time_ms);
  } else {
    out << "0,0";
  }
  return out.str();
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows, bool timing) {
  out << metrics_header() << '\n';
  for (const auto& r : rows) out << metrics_csv_line(r, timing) << '\n';
}

Dataset load_source(const ExperimentConfig& config) {
  if (const auto* c = std::get_if<CsvSource>(&config.source)) {
    return load_csv(c->path, c->x_columns, c->y_columns, CsvOptions{c->has_header, c->delimiter});
  }
  const auto& s = std::get<SyntheticSource>(config.source);
  return synthetic_views(s.n, s.latent_dim, s.d_x, s.d_y, s.noise, s.seed);
}

PreparedData prepare_data(const ExperimentConfig& config) { return prepare_data(config, load_source(config)); }

PreparedData prepare_data(const ExperimentConfig& config, const Dataset& raw) {
  if (raw.rows() < 2) throw DataError("need at least two rows, got " + std::to_string(raw.rows()));
  PreparedData p;
  p.x = copula_transform(raw.x);
  p.y = config.copula_y ? copula_transform(raw.y) : raw.y;
  p.sigma_x = config.sigma_x ? *config.sigma_x : bandwidth_heuristic(p.x, config.sigma_k);
  p.sigma_y = config.sigma_y ? *config.sigma_y : p.sigma_x;
  p.dropped_rows = raw.dropped_rows;
  return p;
}

std::uint64_t repetition_seed(std::uint64_t master, std::string_view algorithm, Eigen::Index m,
                              Eigen::Index repetition) {
  std::uint64_t s = derive_seed(master, algorithm);
  s = derive_seed(s, static_cast<std::uint64_t>(m));
  return derive_seed(s, static_cast<std::uint64_t>(repetition));
}

double choose_ls_lambda(const ExperimentConfig& config, const PreparedData& data, Eigen::Index m) {
  if (config.lambda_ls) return *config.lambda_ls;
  const std::uint64_t seed = repetition_seed(config.master_seed, "LS-grid", m, 0);
  const Views v = make_views(config, data, seed);
  const double n = static_cast<double>(v.x_sel.rows());
  double best_lambda = config.lambda_grid.front() * n;
  double best_total = -1.0;
  for (double c : config.lambda_grid) {
    const double lambda = c * n;
    const double total =
        cell_correlations(config, data, v, Algorithm::LS, m, seed, lambda).first.metrics.total;
    if (total > best_total) {
      best_total = total;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

MetricsRow run_cell(const ExperimentConfig& config, const PreparedData& data, Algorithm algorithm,
                    Eigen::Index m, Eigen::Index repetition) {
  if (algorithm == Algorithm::KCCA) throw ParameterError("run_cell: KCCA is run through run_kcca_baseline");
  const std::uint64_t seed = repetition_seed(config.master_seed, algorithm_name(algorithm), m, repetition);
  const Views v = make_views(config, data, seed);
  const double lambda = algorithm == Algorithm::LS ? choose_ls_lambda(config, data, m) : 0.0;
  const auto [result, select_ms] = cell_correlations(config, data, v, algorithm, m, seed, lambda);
  return make_row(algorithm, m, repetition, seed, result, select_ms);
}

std::vector<MetricsRow> run_benchmark(const ExperimentConfig& config,
                                      const std::function<void(const MetricsRow&)>& on_row) {
  config.validate();
  return run_benchmark(config, prepare_data(config), on_row);
}

std::vector<MetricsRow> run_benchmark(const ExperimentConfig& config, const PreparedData& data,
                                      const std::function<void(const MetricsRow&)>& on_row) {
  check_benchmark(config, data);
  std::vector<MetricsRow> rows;
  const auto emit = [&](MetricsRow row) {
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  };
  bool want_kcca = false;
  for (Algorithm a : config.algorithms) {
    if (a == Algorithm::KCCA) {
      want_kcca = true;
      continue;
    }
    for (Eigen::Index m : config.m_grid) {
      const double lambda = a == Algorithm::LS ? choose_ls_lambda(config, data, m) : 0.0;
      for (Eigen::Index rep = 0; rep < config.repetitions; ++rep) {
        const std::uint64_t seed = repetition_seed(config.master_seed, algorithm_name(a), m, rep);
        const Views v = make_views(config, data, seed);
        const auto [result, select_ms] = cell_correlations(config, data, v, a, m, seed, lambda);
        emit(make_row(a, m, rep, seed, result, select_ms));
      }
    }
  }
  if (want_kcca) emit(run_kcca_baseline(config, data));
  return rows;
}

MetricsRow run_kcca_baseline(const ExperimentConfig& config) {
  config.validate();
  return run_kcca_baseline(config, prepare_data(config));
}

MetricsRow run_kcca_baseline(const ExperimentConfig& config, const PreparedData& data) {
  const Eigen::Index n = data.x.rows();
  check_kcca_guard(config, n);
  const auto start = Clock::now();
  const KernelMatrix kx = gaussian_kernel(data.x, data.sigma_x);
  const KernelMatrix ky = gaussian_kernel(data.y, data.sigma_y);
  const double kernel_ms = elapsed_ms(start);
  const CcaResult r = kcca(kx, ky, config.mu);
  return make_row(Algorithm::KCCA, n, 0, config.master_seed, r, kernel_ms);
}

double lambda_for_effective_dimension(const KernelMatrix& k, double target) {
  const Eigen::VectorXd e = linalg::symmetric_eigenvalues(k.values).cwiseMax(0.0);
  const auto s_of = [&](double lambda) { return (e.array() / (e.array() + lambda)).sum(); };
  const double top = e.maxCoeff();
  if (!(top > 0.0)) throw DataError("kernel matrix is zero");
  if (!(target > 0.0) || target >= static_cast<double>((e.array() > 0.0).count())) {
    throw ParameterError("target effective dimension " + fmt(target) + " is not attainable");
  }
  double lo = std::log(top * 1e-14), hi = std::log(top * 1e8);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (s_of(std::exp(mid)) > target) lo = mid;
    else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

SpectralRun run_spectral_check(const ExperimentConfig& config) {
  config.validate();
  Dataset raw = load_source(config);
  const Eigen::MatrixXd x = copula_transform(raw.x);
  const double sigma = config.sigma_x ? *config.sigma_x : bandwidth_heuristic(x, config.sigma_k);
  return run_spectral_check(config, x, sigma);
}

SpectralRun run_spectral_check(const ExperimentConfig& config, const Eigen::MatrixXd& x, double sigma) {
  const SpectralSettings& s = config.spectral;
  check_kcca_guard(config, x.rows());
  SpectralRun run;
  run.mode = s.mode;
  run.n = x.rows();
  run.sigma = sigma;
  const KernelMatrix k = gaussian_kernel(x, sigma);
  run.lambda = s.lambda ? *s.lambda : lambda_for_effective_dimension(k, s.target_s);
  run.s_lambda = effective_dimension(k, run.lambda);
  run.trace_kb = run.s_lambda;
  run.kernel_norm = linalg::symmetric_eigenvalues(k.values).maxCoeff();
  run.required_features = required_features(run.trace_kb, run.s_lambda, s.bound_delta, s.delta0, s.rho);
  run.rff_required_features = rff_required_features(run.n, run.lambda, run.s_lambda, s.bound_delta, s.rho);
  if (s.m) run.m = *s.m;
  else if (s.mode == SpectralMode::Plain) run.m = run.rff_required_features;
  else if (s.mode == SpectralMode::LeverageScore) run.m = run.required_features;
  else run.m = run.n;
  run.pool_size = s.mode == SpectralMode::LeverageScore ? s.pool_factor * run.m : run.m;

  Eigen::MatrixXd center;
  if (s.mode == SpectralMode::LeverageScore) {
    Eigen::MatrixXd reg = k.values;
    reg.diagonal().array() += run.lambda;
    center = linalg::spd_factor(reg, "spectral check").solve(
        Eigen::MatrixXd::Identity(run.n, run.n));
  }
  FeatureMatrix exact;
  if (s.mode == SpectralMode::Exact) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.values);
    exact = FeatureMatrix::from_values(eig.eigenvectors() *
                                       eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }

  std::vector<Eigen::Index> holds(s.deltas.size(), 0);
  const std::uint64_t base = derive_seed(config.master_seed, "spectral");
  for (Eigen::Index t = 0; t < s.trials; ++t) {
    SpectralTrial trial;
    trial.trial = t;
    trial.seed = derive_seed(base, static_cast<std::uint64_t>(t));
    FeatureMatrix z;
    if (s.mode == SpectralMode::Exact) {
      z = exact;
    } else if (s.mode == SpectralMode::Plain) {
      const auto p = pool(x, run.m, sigma, trial.seed, "pool");
      z = kernel_normalized(feature_matrix(x, p, run.m));
    } else {
      const auto p = pool(x, run.pool_size, sigma, trial.seed, "pool");
      const ScoreVector q = score_general(kernel_normalized(feature_matrix(x, p, run.pool_size)), center);
      const Selection sel = sample_proportional(q, run.m, derive_seed(trial.seed, "sample"));
      z = kernel_normalized(reweighted_feature_matrix(x, p, sel.indices, *sel.weight_ratios));
    }
    trial.report = spectral_check(k, z, run.lambda, s.deltas);
    for (std::size_t i = 0; i < s.deltas.size(); ++i) {
      if (trial.report.holds_at[i].second) ++holds[i];
    }
    run.trials.push_back(std::move(trial));
  }
  for (std::size_t i = 0; i < s.deltas.size(); ++i) {
    run.hold_fraction.emplace_back(s.deltas[i], static_cast<double>(holds[i]) / static_cast<double>(s.trials));
  }
  return run;
}

std::string SpectralRun::trial_record(const SpectralTrial& t) const {
  return "record=trial trial=" + std::to_string(t.trial) + " seed=" + std::to_string(t.seed) + " " +
         t.report.to_record();
}

std::string SpectralRun::summary_record() const {
  static const char* names[] = {"ls", "plain", "exact"};
  std::ostringstream out;
  out << "record=summary mode=" << names[static_cast<int>(mode)] << " n=" << n << " sigma=" << fmt(sigma)
      << " lambda=" << fmt(lambda) << " s_lambda=" << fmt(s_lambda) << " trace_kb=" << fmt(trace_kb)
      << " kernel_norm=" << fmt(kernel_norm) << " norm_at_least_lambda=" << (norm_at_least_lambda() ? 1 : 0)
      << " M=" << m << " pool_size=" << pool_size << " required_features=" << required_features
      << " rff_required_features=" << rff_required_features << " trials=" << trials.size();
  for (const auto& [delta, frac] : hold_fraction) out << " hold_fraction[" << fmt(delta) << "]=" << fmt(frac);
  return out.str();
}

std::vector<SelectionDump> run_select(const ExperimentConfig& config) {
  config.validate();
  return run_select(config, prepare_data(config));
}

std::vector<SelectionDump> run_select(const ExperimentConfig& config, const PreparedData& data) {
  const SelectSettings& sel = config.select;
  const Eigen::Index m = sel.m;
  const Eigen::Index m0 = config.pool_for(m);
  if (m0 < m) throw ConfigError("pool size is smaller than select.M");
  static const char* names[] = {"LS", "EERF", "ORCCA1", "ORCCA2"};
  const std::uint64_t seed = repetition_seed(config.master_seed, names[static_cast<int>(sel.rule)], m, 0);
  const auto px = pool(data.x, m0, data.sigma_x, seed, "pool-x");
  const FeatureMatrix zx = feature_matrix(data.x, px, m0);
  std::vector<SelectionDump> out;
  switch (sel.rule) {
    case SelectRule::LeverageScore: {
      const double lambda = config.lambda_ls.value_or(static_cast<double>(data.x.rows()));
      const ScoreVector s = ls_scores(zx, lambda);
      out.push_back({"x", s, sample_proportional(s, m, derive_seed(seed, "sample-x"))});
      break;
    }
    case SelectRule::Eerf:
    case SelectRule::Orcca1: {
      if (data.y.cols() != 1) throw ConfigError("select.rule requires a single Y column");
      const Eigen::VectorXd y = data.y.col(0);
      const ScoreVector s = sel.rule == SelectRule::Eerf ? eerf_scores(zx, y) : orcca1_scores(zx, y, config.mu);
      out.push_back({"x", s, select_top_m(s, m)});
      break;
    }
    case SelectRule::Orcca2: {
      const auto py = pool(data.y, m0, data.sigma_y, seed, "pool-y");
      const auto [sx, sy] = orcca2_scores(zx, feature_matrix(data.y, py, m0), config.mu);
      out.push_back({"x", sx, select_top_m(sx, m)});
      out.push_back({"y", sy, select_top_m(sy, m)});
      break;
    }
  }
  return out;
}

void write_selection_csv(std::ostream& out, const std::vector<SelectionDump>& dumps) {
  out << "view,index,score,chosen,weight_ratio\n";
  for (const auto& d : dumps) {
    std::vector<int> chosen(static_cast<std::size_t>(d.scores.size()), 0);
    std::map<Eigen::Index, double> ratio;
    for (std::size_t j = 0; j < d.selection.indices.size(); ++j) {
      const Eigen::Index idx = d.selection.indices[j];
      ++chosen[static_cast<std::size_t>(idx)];
      if (d.selection.weight_ratios) ratio[idx] = (*d.selection.weight_ratios)(static_cast<Eigen::Index>(j));
    }
    for (Eigen::Index i = 0; i < d.scores.size(); ++i) {
      out << d.view << ',' << i << ',' << fmt(d.scores.scores(i)) << ',' << chosen[static_cast<std::size_t>(i)]
          << ',';
      if (chosen[static_cast<std::size_t>(i)] > 0) out << (ratio.count(i) ? fmt(ratio[i]) : std::string("1"));
      out << '\n';
    }
  }
}

}  // namespace rfcca
