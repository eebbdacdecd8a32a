#pragma once

// Random Fourier feature pools for the Gaussian kernel and the transformed
// data matrices built from them.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rfcca {

enum class FeatureMap {
  CosineWithOffset,  // cos(x.w + b), one column per feature
  CosSinPair,        // (cos(x.w), sin(x.w)), two adjacent columns per feature
};

enum class Sampler { IidGaussian, Orthogonal };

struct FeaturePool {
  Eigen::MatrixXd frequencies;  // M0 x d, one frequency per row
  Eigen::VectorXd offsets;      // M0 phases in [0, 2pi); empty for CosSinPair
  double prior_sigma = 1.0;
  FeatureMap map = FeatureMap::CosineWithOffset;
  Sampler sampler = Sampler::IidGaussian;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return frequencies.rows(); }
  Eigen::Index dimension() const { return frequencies.cols(); }
};

// A transformed data matrix Z. `values` already contains the 1/sqrt(M)
// normalization and, when present, the per-feature importance weights.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::optional<Eigen::VectorXd> weights;  // sqrt(p/q) per feature
  Eigen::Index feature_count = 0;          // M
  FeatureMap map = FeatureMap::CosineWithOffset;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index columns_per_feature() const { return map == FeatureMap::CosSinPair ? 2 : 1; }
  double scale() const;  // 1/sqrt(M)

  // Wraps an arbitrary n x M matrix as an unweighted one-column-per-feature
  // transform.
  static FeatureMatrix from_values(Eigen::MatrixXd values);
};

// Frequencies are drawn row by row from one substream and offsets from
// another, so the first k rows of a pool do not depend on its total size.
FeaturePool sample_pool(Eigen::Index d, Eigen::Index m0, double sigma, FeatureMap map,
                        Sampler sampler, std::uint64_t seed);

// Z built from the first `m` pool entries.
FeatureMatrix feature_matrix(const Eigen::MatrixXd& x, const FeaturePool& pool, Eigen::Index m);

// Z built from the pool entries at `indices` (duplicates allowed), unweighted.
FeatureMatrix feature_matrix(const Eigen::MatrixXd& x, const FeaturePool& pool,
                             std::span<const Eigen::Index> indices);

// Importance-reweighted Z: column m is sqrt(weight_ratios[m]) / sqrt(M) * z(w_{indices[m]}).
FeatureMatrix reweighted_feature_matrix(const Eigen::MatrixXd& x, const FeaturePool& pool,
                                        std::span<const Eigen::Index> indices,
                                        const Eigen::VectorXd& weight_ratios);

// Copy of `z` whose Gram matrix estimates the Gaussian kernel itself. The
// literal cosine-with-offset map estimates half of it in expectation, so its
// columns are multiplied by sqrt(2); CosSinPair is returned unchanged.
FeatureMatrix kernel_normalized(const FeatureMatrix& z);

}  // namespace rfcca
