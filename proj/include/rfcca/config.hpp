#pragma once

// Experiment configuration and its flat "dotted.key = value" text form.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rfcca {

enum class Algorithm { RFF, ORF, LS, EERF, ORCCA1, ORCCA2, KCCA };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct SyntheticSource {
  Eigen::Index n = 400;
  Eigen::Index latent_dim = 3;
  Eigen::Index d_x = 8;
  Eigen::Index d_y = 4;
  double noise = 0.3;
  std::uint64_t seed = 1;
};

struct CsvSource {
  std::filesystem::path path;
  std::vector<std::string> x_columns;
  std::vector<std::string> y_columns;
  bool has_header = true;
  char delimiter = ',';
};

enum class SpectralMode { LeverageScore, Plain, Exact };
enum class SelectRule { LeverageScore, Eerf, Orcca1, Orcca2 };

struct SpectralSettings {
  std::optional<Eigen::Index> m;      // auto: feature-count bound for the mode
  std::optional<double> lambda;       // auto: S_lambda(K) = target_s
  double target_s = 10.0;
  std::vector<double> deltas{0.5};
  Eigen::Index trials = 50;
  SpectralMode mode = SpectralMode::LeverageScore;
  double rho = 0.1;
  double delta0 = 0.0;
  double bound_delta = 0.5;           // Delta used in the feature-count bounds
  Eigen::Index pool_factor = 10;
};

struct SelectSettings {
  SelectRule rule = SelectRule::Orcca2;
  Eigen::Index m = 20;
};

struct ExperimentConfig {
  std::variant<SyntheticSource, CsvSource> source;
  std::vector<Algorithm> algorithms{Algorithm::RFF, Algorithm::ORF, Algorithm::LS, Algorithm::ORCCA2};
  std::vector<Eigen::Index> m_grid{20, 50, 100};
  Eigen::Index pool_factor = 10;
  std::optional<Eigen::Index> pool_size;   // overrides pool_factor * M
  double mu = 1e-6;
  std::optional<double> lambda_ls;         // unset: grid search
  std::vector<double> lambda_grid{0.01, 0.1, 1.0, 10.0};  // multiples of n
  std::optional<double> sigma_x;           // unset: nearest-neighbour heuristic
  Eigen::Index sigma_k = 50;
  std::optional<double> sigma_y;           // unset: same as sigma_x
  Eigen::Index repetitions = 30;
  std::uint64_t master_seed = 0;
  std::optional<double> split;             // training fraction
  bool copula_y = true;
  Eigen::Index max_n = 2000;               // exact-kernel guard
  SpectralSettings spectral;
  SelectSettings select;

  Eigen::Index pool_for(Eigen::Index m) const;
  // Throws ConfigError on inconsistent settings.
  void validate() const;
};

using KeyValues = std::map<std::string, std::string>;

// One "key = value" per line; '#' starts a comment, blank lines are ignored.
KeyValues parse_key_values(std::istream& in);
KeyValues read_config_file(const std::filesystem::path& path);

// Every key accepted by apply_key_values, in a stable order.
const std::vector<std::string>& config_keys();

// Throws ConfigError for unknown keys or malformed values.
void apply_key_values(ExperimentConfig& config, const KeyValues& values);

}  // namespace rfcca
