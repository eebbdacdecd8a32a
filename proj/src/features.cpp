#include "rfcca/features.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "linalg.hpp"
#include "rfcca/error.hpp"
#include "rfcca/random.hpp"

namespace rfcca {

namespace {

void check_cols(const Eigen::MatrixXd& x, const FeaturePool& pool) {
  if (x.cols() != pool.dimension()) {
    throw ParameterError("feature_matrix: data has " + std::to_string(x.cols()) +
                         " columns but pool dimension is " + std::to_string(pool.dimension()));
  }
}

// Writes the per-feature values for pool entry `entry` into columns starting
// at `col`, multiplied by `factor`.
void fill_feature(const Eigen::MatrixXd& x, const FeaturePool& pool, Eigen::Index entry,
                  double factor, Eigen::MatrixXd& out, Eigen::Index col) {
  const Eigen::VectorXd proj = x * pool.frequencies.row(entry).transpose();
  if (pool.map == FeatureMap::CosineWithOffset) {
    const double b = pool.offsets(entry);
    out.col(col) = factor * (proj.array() + b).cos();
  } else {
    out.col(col) = factor * proj.array().cos();
    out.col(col + 1) = factor * proj.array().sin();
  }
}

FeatureMatrix build(const Eigen::MatrixXd& x, const FeaturePool& pool,
                    std::span<const Eigen::Index> indices, const Eigen::VectorXd* ratios) {
  check_cols(x, pool);
  const auto m = static_cast<Eigen::Index>(indices.size());
  if (m == 0) throw ParameterError("feature_matrix: at least one feature is required");
  for (Eigen::Index idx : indices) {
    if (idx < 0 || idx >= pool.size()) {
      throw ParameterError("feature_matrix: pool index " + std::to_string(idx) + " out of range");
    }
  }

  FeatureMatrix z;
  z.map = pool.map;
  z.feature_count = m;
  const Eigen::Index width = z.columns_per_feature();
  z.values.resize(x.rows(), m * width);
  const double scale = z.scale();
  if (ratios) z.weights = ratios->cwiseSqrt();
  for (Eigen::Index j = 0; j < m; ++j) {
    const double factor = ratios ? scale * (*z.weights)(j) : scale;
    fill_feature(x, pool, indices[static_cast<std::size_t>(j)], factor, z.values, j * width);
  }
  linalg::require_finite(z.values, "feature_matrix");
  return z;
}

}  // namespace

double FeatureMatrix::scale() const {
  return 1.0 / std::sqrt(static_cast<double>(feature_count));
}

FeatureMatrix FeatureMatrix::from_values(Eigen::MatrixXd values) {
  FeatureMatrix z;
  z.feature_count = values.cols();
  z.values = std::move(values);
  return z;
}

FeaturePool sample_pool(Eigen::Index d, Eigen::Index m0, double sigma, FeatureMap map,
                        Sampler sampler, std::uint64_t seed) {
  if (d < 1 || m0 < 1) throw ParameterError("sample_pool: dimensions must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("sample_pool: sigma must be positive and finite");
  }

  FeaturePool pool;
  pool.prior_sigma = sigma;
  pool.map = map;
  pool.sampler = sampler;
  pool.seed = seed;
  pool.frequencies.resize(m0, d);

  Rng freq_rng(derive_seed(seed, "frequencies"));
  std::normal_distribution<double> normal(0.0, 1.0);

  if (sampler == Sampler::IidGaussian) {
    for (Eigen::Index i = 0; i < m0; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) pool.frequencies(i, j) = sigma * normal(freq_rng);
    }
  } else {
    // Blocks of d mutually orthogonal directions; row lengths follow chi_d so
    // each row is marginally N(0, sigma^2 I).
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index start = 0; start < m0; start += d) {
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(freq_rng);
      }
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      Eigen::MatrixXd q = qr.householderQ();
      const Eigen::MatrixXd& r = qr.matrixQR();
      // Sign fix makes Q Haar distributed.
      for (Eigen::Index j = 0; j < d; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
      }
      const Eigen::Index rows = std::min(d, m0 - start);
      for (Eigen::Index i = 0; i < rows; ++i) {
        double sq = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
          const double v = normal(freq_rng);
          sq += v * v;
        }
        pool.frequencies.row(start + i) = sigma * std::sqrt(sq) * q.col(i).transpose();
      }
    }
  }

  if (map == FeatureMap::CosineWithOffset) {
    Rng offset_rng(derive_seed(seed, "offsets"));
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    pool.offsets.resize(m0);
    for (Eigen::Index i = 0; i < m0; ++i) {
      double b = uniform(offset_rng);
      // uniform_real_distribution may round up to the upper bound.
      if (b >= 2.0 * std::numbers::pi) b = 0.0;
      pool.offsets(i) = b;
    }
  }
  return pool;
}

FeatureMatrix feature_matrix(const Eigen::MatrixXd& x, const FeaturePool& pool, Eigen::Index m) {
  if (m < 1 || m > pool.size()) {
    throw ParameterError("feature_matrix: requested " + std::to_string(m) +
                         " features from a pool of " + std::to_string(pool.size()));
  }
  check_cols(x, pool);
  std::vector<Eigen::Index> first(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) first[static_cast<std::size_t>(i)] = i;
  return build(x, pool, first, nullptr);
}

FeatureMatrix feature_matrix(const Eigen::MatrixXd& x, const FeaturePool& pool,
                             std::span<const Eigen::Index> indices) {
  return build(x, pool, indices, nullptr);
}

FeatureMatrix reweighted_feature_matrix(const Eigen::MatrixXd& x, const FeaturePool& pool,
                                        std::span<const Eigen::Index> indices,
                                        const Eigen::VectorXd& weight_ratios) {
  if (weight_ratios.size() != static_cast<Eigen::Index>(indices.size())) {
    throw ParameterError("reweighted_feature_matrix: one weight ratio per index is required");
  }
  for (Eigen::Index i = 0; i < weight_ratios.size(); ++i) {
    if (!(weight_ratios(i) > 0.0) || !std::isfinite(weight_ratios(i))) {
      throw ParameterError("reweighted_feature_matrix: weight ratios must be positive and finite");
    }
  }
  return build(x, pool, indices, &weight_ratios);
}

FeatureMatrix kernel_normalized(const FeatureMatrix& z) {
  FeatureMatrix out = z;
  if (z.map == FeatureMap::CosineWithOffset) out.values *= std::numbers::sqrt2;
  return out;
}

}  // namespace rfcca
