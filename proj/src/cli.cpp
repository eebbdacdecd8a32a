#include "rfcca/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <map>
#include <memory>

#include "rfcca/config.hpp"
#include "rfcca/error.hpp"
#include "rfcca/experiment.hpp"

namespace rfcca {

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  bool no_timing = false;
  bool quiet = false;
  std::map<std::string, std::string> values;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "Config file of key = value lines");
  sub->add_option("--out", o.out_path, "Output file (default: standard output)");
  sub->add_flag("--no-timing", o.no_timing, "Write 0 in the timing columns");
  sub->add_flag("--quiet", o.quiet, "Suppress warnings");
  for (const auto& key : config_keys()) {
    sub->add_option("--" + key, o.values[key], "Config key " + key);
  }
}

ExperimentConfig build_config(CLI::App* sub, const Options& o) {
  ExperimentConfig config;
  KeyValues kv;
  if (!o.config_path.empty()) kv = read_config_file(o.config_path);
  for (const auto& [key, value] : o.values) {
    if (sub->count("--" + key) > 0) kv[key] = value;
  }
  apply_key_values(config, kv);
  config.validate();
  return config;
}

void warn_dropped(const Dataset& raw, const Options& o, std::ostream& err) {
  if (raw.dropped_rows > 0 && !o.quiet) {
    err << "warning: dropped " << raw.dropped_rows << " rows with missing or non-numeric values\n";
  }
}

std::ostream& output(const Options& o, std::ostream& out, std::unique_ptr<std::ofstream>& file) {
  if (o.out_path.empty()) return out;
  file = std::make_unique<std::ofstream>(o.out_path, std::ios::binary);
  if (!*file) throw ConfigError("cannot open output file " + o.out_path);
  return *file;
}

int run(const std::string& command, CLI::App* sub, const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = build_config(sub, o);
  const Dataset raw = load_source(config);
  warn_dropped(raw, o, err);
  std::unique_ptr<std::ofstream> file;

  if (command == "spectral") {
    const PreparedData data = prepare_data(config, raw);
    const SpectralRun r = run_spectral_check(config, data.x, data.sigma_x);
    if (!r.norm_at_least_lambda() && !o.quiet) {
      err << "warning: |K|_2 = " << r.kernel_norm << " is below lambda = " << r.lambda
          << "; the feature-count bounds assume |K|_2 >= lambda\n";
    }
    std::ostream& dst = output(o, out, file);
    for (const auto& t : r.trials) dst << r.trial_record(t) << '\n';
    dst << r.summary_record() << '\n';
    return kExitOk;
  }

  const PreparedData data = prepare_data(config, raw);
  if (command == "select") {
    const auto dumps = run_select(config, data);
    write_selection_csv(output(o, out, file), dumps);
    return kExitOk;
  }
  if (command == "kcca") {
    const MetricsRow row = run_kcca_baseline(config, data);
    write_metrics_csv(output(o, out, file), {row}, !o.no_timing);
    return kExitOk;
  }
  // bench: rows are streamed as they complete.
  std::ostream* dst = nullptr;
  bool header = false;
  run_benchmark(config, data, [&](const MetricsRow& row) {
    if (!header) {
      dst = &output(o, out, file);
      *dst << metrics_header() << '\n';
      header = true;
    }
    *dst << metrics_csv_line(row, !o.no_timing) << '\n';
    dst->flush();
  });
  if (!header) output(o, out, file) << metrics_header() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized-feature canonical correlation analysis"};
  app.require_subcommand(1, 1);
  Options options;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"bench", "Feature-selection comparison over the M grid (CSV)"},
      {"kcca", "Exact kernel CCA baseline (CSV)"},
      {"spectral", "Monte-Carlo spectral approximation check (key=value records)"},
      {"select", "Dump pool scores and the selected features (CSV)"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    add_common(sub, options);
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return run(commands[i].first, subs[i], options, out, err);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace rfcca
