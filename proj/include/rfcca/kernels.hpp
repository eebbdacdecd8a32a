#pragma once

// Exact kernel matrices, effective dimension, and diagnostics for
// Delta-spectral approximation of K + lambda I by Z Z^T + lambda I.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfcca/features.hpp"

namespace rfcca {

enum class KernelKind { GaussianExact, FromFeatures, Linear };

struct KernelMatrix {
  Eigen::MatrixXd values;  // symmetric n x n
  KernelKind kind = KernelKind::FromFeatures;
  double sigma = 0.0;      // GaussianExact only

  Eigen::Index size() const { return values.rows(); }
};

// k(x, x') = exp(-sigma^2 |x - x'|^2 / 2), the kernel whose Fourier prior is N(0, sigma^2 I).
KernelMatrix gaussian_kernel(const Eigen::MatrixXd& x, double sigma);
KernelMatrix linear_kernel(const Eigen::MatrixXd& x);
KernelMatrix kernel_from_features(const FeatureMatrix& z);

// S_lambda(K) = tr(K (K + lambda I)^{-1}), from the eigenvalues of K.
double effective_dimension(const KernelMatrix& k, double lambda);

struct SpectralReport {
  double delta_achieved = 0.0;  // max(1 - eig_min, eig_max - 1)
  double lambda = 0.0;
  double eig_min = 0.0;
  double eig_max = 0.0;
  std::vector<std::pair<double, bool>> holds_at;  // (requested Delta, delta_achieved <= Delta)

  // Flat "key=value key=value ..." record.
  std::string to_record() const;
};

// Extreme eigenvalues of (K + lambda I)^{-1/2} (Z Z^T + lambda I) (K + lambda I)^{-1/2}.
// Z is used as stored; pass kernel_normalized(z) to compare against the
// Gaussian kernel itself.
SpectralReport spectral_check(const KernelMatrix& k, const FeatureMatrix& z, double lambda,
                              std::span<const double> deltas);

// Feature count sufficient for a Delta-spectral approximation with
// probability 1 - rho when sampling from a score with center matrix B
// satisfying B >= (1 - delta0)(K + lambda I)^{-1}.
Eigen::Index required_features(double trace_kb, double s_lambda, double delta, double delta0,
                               double rho);

// Same guarantee for plain random Fourier features.
Eigen::Index rff_required_features(Eigen::Index n, double lambda, double s_lambda, double delta,
                                   double rho);

}  // namespace rfcca
