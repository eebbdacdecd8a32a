#include "linalg.hpp"

#include <string>

#include "rfcca/error.hpp"

namespace rfcca::linalg {

void require_finite(const Eigen::MatrixXd& m, std::string_view what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": non-finite values encountered");
  }
}

bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Eigen::LLT<Eigen::MatrixXd> spd_factor(const Eigen::MatrixXd& a, std::string_view what) {
  require_finite(a, what);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": matrix is not numerically positive definite");
  }
  return llt;
}

Eigen::MatrixXd inverse_sqrt_psd(const Eigen::MatrixXd& a, double floor) {
  require_finite(a, "inverse square root");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("inverse square root: eigendecomposition failed");
  }
  const Eigen::VectorXd s = eig.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  require_finite(a, "symmetric eigenvalues");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("symmetric eigenvalues: eigendecomposition failed");
  }
  return eig.eigenvalues();
}

}  // namespace rfcca::linalg
