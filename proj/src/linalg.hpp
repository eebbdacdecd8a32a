#pragma once

// Dense helpers shared by the library modules. Not part of the public API.

#include <Eigen/Dense>
#include <string_view>

namespace rfcca::linalg {

void require_finite(const Eigen::MatrixXd& m, std::string_view what);

// max |A - A^T| <= rel_tol * max(1, max |A|)
bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol = 1e-12);

// Cholesky factor of a symmetric positive-definite matrix; throws
// NumericalError when the factorization breaks down.
Eigen::LLT<Eigen::MatrixXd> spd_factor(const Eigen::MatrixXd& a, std::string_view what);

// A^{-1/2} via symmetric eigendecomposition, eigenvalues floored at `floor`.
Eigen::MatrixXd inverse_sqrt_psd(const Eigen::MatrixXd& a, double floor);

// Ascending eigenvalues of a symmetric matrix.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

}  // namespace rfcca::linalg
