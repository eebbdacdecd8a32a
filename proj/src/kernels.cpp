#include "rfcca/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "linalg.hpp"
#include "rfcca/error.hpp"

namespace rfcca {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(what) + " must be positive and finite");
  }
}

void require_symmetric(const KernelMatrix& k, const char* op) {
  if (!linalg::is_symmetric(k.values, 1e-12)) {
    throw ParameterError(std::string(op) + ": kernel matrix is not symmetric");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::Index ceil_count(double v) {
  if (!std::isfinite(v)) throw NumericalError("feature count bound is not finite");
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(v)));
}

}  // namespace

KernelMatrix gaussian_kernel(const Eigen::MatrixXd& x, double sigma) {
  require_positive(sigma, "gaussian_kernel: sigma");
  const Eigen::Index n = x.rows();
  KernelMatrix k;
  k.kind = KernelKind::GaussianExact;
  k.sigma = sigma;
  k.values.resize(n, n);
  const double c = 0.5 * sigma * sigma;
  for (Eigen::Index j = 0; j < n; ++j) {
    k.values(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = std::exp(-c * (x.row(i) - x.row(j)).squaredNorm());
      k.values(i, j) = v;
      k.values(j, i) = v;
    }
  }
  return k;
}

KernelMatrix linear_kernel(const Eigen::MatrixXd& x) {
  KernelMatrix k;
  k.kind = KernelKind::Linear;
  k.values = x * x.transpose();
  k.values = 0.5 * (k.values + k.values.transpose()).eval();
  return k;
}

KernelMatrix kernel_from_features(const FeatureMatrix& z) {
  KernelMatrix k;
  k.kind = KernelKind::FromFeatures;
  k.values = z.values * z.values.transpose();
  k.values = 0.5 * (k.values + k.values.transpose()).eval();
  return k;
}

double effective_dimension(const KernelMatrix& k, double lambda) {
  require_positive(lambda, "effective_dimension: lambda");
  require_symmetric(k, "effective_dimension");
  const Eigen::VectorXd ev = linalg::symmetric_eigenvalues(k.values).cwiseMax(0.0);
  return (ev.array() / (ev.array() + lambda)).sum();
}

SpectralReport spectral_check(const KernelMatrix& k, const FeatureMatrix& z, double lambda,
                              std::span<const double> deltas) {
  require_positive(lambda, "spectral_check: lambda");
  require_symmetric(k, "spectral_check");
  const Eigen::Index n = k.size();
  if (z.rows() != n) throw ParameterError("spectral_check: Z row count differs from kernel size");

  const Eigen::MatrixXd shifted = k.values + lambda * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd whiten = linalg::inverse_sqrt_psd(shifted, lambda * 1e-12);
  Eigen::MatrixXd approx = z.values * z.values.transpose();
  approx.diagonal().array() += lambda;
  Eigen::MatrixXd e = whiten * approx * whiten;
  e = 0.5 * (e + e.transpose()).eval();
  const Eigen::VectorXd ev = linalg::symmetric_eigenvalues(e);

  SpectralReport report;
  report.lambda = lambda;
  report.eig_min = ev(0);
  report.eig_max = ev(ev.size() - 1);
  report.delta_achieved = std::max({1.0 - report.eig_min, report.eig_max - 1.0, 0.0});
  for (double d : deltas) report.holds_at.emplace_back(d, report.delta_achieved <= d);
  return report;
}

std::string SpectralReport::to_record() const {
  std::ostringstream out;
  out << "delta_achieved=" << fmt(delta_achieved) << " lambda=" << fmt(lambda)
      << " eig_min=" << fmt(eig_min) << " eig_max=" << fmt(eig_max);
  for (const auto& [d, ok] : holds_at) out << " holds[" << fmt(d) << "]=" << (ok ? 1 : 0);
  return out.str();
}

Eigen::Index required_features(double trace_kb, double s_lambda, double delta, double delta0,
                               double rho) {
  require_positive(trace_kb, "required_features: trace_KB");
  require_positive(s_lambda, "required_features: S_lambda");
  if (!(delta > 0.0 && delta <= 0.5)) throw ParameterError("required_features: delta must lie in (0, 1/2]");
  if (!(delta0 >= 0.0 && delta0 < 1.0)) throw ParameterError("required_features: delta0 must lie in [0, 1)");
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("required_features: rho must lie in (0, 1)");
  const double bound =
      8.0 * trace_kb / (3.0 * delta * delta * (1.0 - delta0)) * std::log(16.0 * s_lambda / rho);
  return ceil_count(bound);
}

Eigen::Index rff_required_features(Eigen::Index n, double lambda, double s_lambda, double delta,
                                   double rho) {
  if (n < 1) throw ParameterError("rff_required_features: n must be positive");
  require_positive(lambda, "rff_required_features: lambda");
  require_positive(s_lambda, "rff_required_features: S_lambda");
  if (!(delta > 0.0 && delta <= 0.5)) throw ParameterError("rff_required_features: delta must lie in (0, 1/2]");
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("rff_required_features: rho must lie in (0, 1)");
  const double bound = (8.0 / 3.0) / (delta * delta) * (static_cast<double>(n) / lambda) *
                       std::log(16.0 * s_lambda / rho);
  return ceil_count(bound);
}

}  // namespace rfcca
