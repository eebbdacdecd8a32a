#pragma once

// Two-view datasets: CSV ingestion, preprocessing (empirical copula,
// nearest-neighbour bandwidth), train/test splits and a synthetic generator.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rfcca {

struct CsvProvenance {
  std::filesystem::path path;
  std::vector<std::string> x_columns;
  std::vector<std::string> y_columns;
};

struct SyntheticProvenance {
  std::string descriptor;
  std::uint64_t seed = 0;
};

struct Dataset {
  Eigen::MatrixXd x;  // n x d_x
  Eigen::MatrixXd y;  // n x d_y
  std::vector<std::string> x_names;
  std::vector<std::string> y_names;
  std::variant<CsvProvenance, SyntheticProvenance> provenance;
  std::size_t dropped_rows = 0;  // rows skipped during ingestion

  Eigen::Index rows() const { return x.rows(); }
};

struct CsvOptions {
  bool has_header = true;
  char delimiter = ',';
};

// Column specs are header names or 0-based indices. Rows with an empty,
// non-numeric or non-finite entry in any selected column are dropped.
Dataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& x_columns,
                 const std::vector<std::string>& y_columns, const CsvOptions& options = {});

// Writes x columns then y columns with 17 significant digits.
void write_csv(const Dataset& data, const std::filesystem::path& path, char delimiter = ',');

// Per-column average ranks divided by n; entries in (0, 1].
Eigen::MatrixXd copula_transform(const Eigen::MatrixXd& x);

// 1 / mean distance to the k-th nearest other point (the (n-1)-th when n-1 < k).
double bandwidth_heuristic(const Eigen::MatrixXd& x, Eigen::Index k = 50);

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
  double fraction = 0.8;
  std::uint64_t seed = 0;
};

// Seeded shuffle; the first round(fraction * n) positions form the training set.
SplitIndices split(Eigen::Index n, double fraction, std::uint64_t seed);

Dataset select_rows(const Dataset& data, std::span<const Eigen::Index> rows);

// Latent T ~ N(0, I); X = tanh(T Ax) + noise Ex, Y = (T Ay)^3 / 3 + noise Ey,
// with Ax, Ay seeded Gaussian mixing matrices scaled by 1/sqrt(latent_dim).
Dataset synthetic_views(Eigen::Index n, Eigen::Index latent_dim, Eigen::Index d_x, Eigen::Index d_y,
                        double noise, std::uint64_t seed);

// Same generator with caller-supplied mixing matrices.
Dataset synthetic_views(Eigen::Index n, const Eigen::MatrixXd& mix_x, const Eigen::MatrixXd& mix_y,
                        double noise, std::uint64_t seed);

}  // namespace rfcca
