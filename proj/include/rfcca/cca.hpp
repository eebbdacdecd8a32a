#pragma once

// Regularized linear CCA, exact kernel CCA and randomized CCA on feature
// transforms. Only canonical correlations are computed, not directions.

#include <Eigen/Dense>
#include <string>

#include "rfcca/features.hpp"
#include "rfcca/kernels.hpp"

namespace rfcca {

struct CcaMetrics {
  double total = 0.0;    // sum of all correlations
  double top10 = 0.0;    // sum of the first min(10, r)
  double largest = 0.0;  // first correlation
};

struct CcaResult {
  Eigen::VectorXd correlations;  // non-increasing, each in [0, 1]
  Eigen::Index r = 0;
  double mu = 0.0;
  CcaMetrics metrics;
  double solve_ms = 0.0;

  // "total,top10,largest,r,mu"
  std::string csv_fragment() const;
};

CcaMetrics summarize(const Eigen::VectorXd& sorted_correlations);

// Singular values of (A^T A + mu I)^{-1/2} A^T B (B^T B + mu I)^{-1/2}.
// mu = 0 is accepted when both Gram matrices are numerically nonsingular.
CcaResult linear_cca(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double mu);

// delta_i^2 are the eigenvalues of Wx^{1/2} Wy Wx^{1/2} with W = K (K + mu I)^{-1}.
CcaResult kcca(const KernelMatrix& kx, const KernelMatrix& ky, double mu);

// linear_cca on the stored (already weighted) feature values.
CcaResult rcca(const FeatureMatrix& zx, const FeatureMatrix& zy, double mu);

// tr((Kx + mu I)^{-1} Ky (Ky + mu I)^{-1} Kx), the sum of squared kernel
// canonical correlations.
double total_correlation_objective(const KernelMatrix& kx, const KernelMatrix& ky, double mu);

}  // namespace rfcca
