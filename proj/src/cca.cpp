#include "rfcca/cca.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "linalg.hpp"
#include "rfcca/error.hpp"

namespace rfcca {

namespace {

constexpr double kCorrelationSlack = 1e-8;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct WhitenedView {
  Eigen::MatrixXd u;  // left singular vectors
  Eigen::VectorXd d;  // s / sqrt(s^2 + mu)
};

// A = U S V^T gives (A^T A + mu I)^{-1/2} A^T = V diag(d) U^T, so the
// canonical correlations are the singular values of diag(da) Ua^T Ub diag(db).
WhitenedView whiten(const Eigen::MatrixXd& data, double mu, const char* view) {
  linalg::require_finite(data, "linear_cca");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw NumericalError("linear_cca: SVD failed");
  const Eigen::VectorXd& s = svd.singularValues();
  if (mu == 0.0) {
    const double tol = static_cast<double>(std::max(data.rows(), data.cols())) *
                       std::numeric_limits<double>::epsilon() * s(0);
    const auto rank = (s.array() > tol).count();
    if (rank < data.cols()) {
      throw NumericalError(std::string("linear_cca: Gram matrix of view ") + view +
                           " is singular (numerical rank " + std::to_string(rank) + " of " +
                           std::to_string(data.cols()) + "); use mu > 0");
    }
  }
  WhitenedView w;
  w.u = svd.matrixU();
  w.d = (s.array() / (s.array().square() + mu).sqrt()).matrix();
  for (Eigen::Index i = 0; i < w.d.size(); ++i) {
    if (!(s(i) > 0.0)) w.d(i) = 0.0;
  }
  return w;
}

// Sorts descending and clamps roundoff above 1 into [0, 1].
Eigen::VectorXd finalize(Eigen::VectorXd d) {
  std::sort(d.data(), d.data() + d.size(), std::greater<>());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) > 1.0 + kCorrelationSlack) {
      throw NumericalError("canonical correlation " + std::to_string(d(i)) + " exceeds 1");
    }
    d(i) = std::clamp(d(i), 0.0, 1.0);
  }
  return d;
}

CcaResult make_result(Eigen::VectorXd d, double mu, Clock::time_point start) {
  CcaResult res;
  res.correlations = finalize(std::move(d));
  res.r = res.correlations.size();
  res.mu = mu;
  res.metrics = summarize(res.correlations);
  res.solve_ms = elapsed_ms(start);
  return res;
}

void require_mu(double mu, const char* op) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ParameterError(std::string(op) + ": mu must be positive and finite");
  }
}

// eigenvalues lambda/(lambda + mu) of K (K + mu I)^{-1} with eigenvectors.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> kernel_eig(const KernelMatrix& k, const char* op) {
  if (!linalg::is_symmetric(k.values, 1e-12)) {
    throw ParameterError(std::string(op) + ": kernel matrix is not symmetric");
  }
  linalg::require_finite(k.values, op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.values);
  if (eig.info() != Eigen::Success) throw NumericalError(std::string(op) + ": eigendecomposition failed");
  return eig;
}

}  // namespace

CcaMetrics summarize(const Eigen::VectorXd& d) {
  CcaMetrics m;
  if (d.size() == 0) return m;
  m.total = d.sum();
  m.top10 = d.head(std::min<Eigen::Index>(10, d.size())).sum();
  m.largest = d(0);
  return m;
}

std::string CcaResult::csv_fragment() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%lld,%.17g", metrics.total, metrics.top10,
                metrics.largest, static_cast<long long>(r), mu);
  return buf;
}

CcaResult linear_cca(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double mu) {
  const auto start = Clock::now();
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ParameterError("linear_cca: mu must be nonnegative");
  if (a.rows() != b.rows()) throw ParameterError("linear_cca: views differ in row count");
  if (a.cols() == 0 || b.cols() == 0) throw ParameterError("linear_cca: empty view");

  const WhitenedView wa = whiten(a, mu, "A");
  const WhitenedView wb = whiten(b, mu, "B");
  const Eigen::MatrixXd c = wa.d.asDiagonal() * (wa.u.transpose() * wb.u) * wb.d.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(c);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(std::min(a.cols(), b.cols()));
  d.head(svd.singularValues().size()) = svd.singularValues();
  return make_result(std::move(d), mu, start);
}

CcaResult kcca(const KernelMatrix& kx, const KernelMatrix& ky, double mu) {
  const auto start = Clock::now();
  require_mu(mu, "kcca");
  if (kx.size() != ky.size()) throw ParameterError("kcca: kernel matrices differ in size");

  const auto ex = kernel_eig(kx, "kcca");
  const auto ey = kernel_eig(ky, "kcca");
  const Eigen::ArrayXd lx = ex.eigenvalues().array().max(0.0);
  const Eigen::ArrayXd ly = ey.eigenvalues().array().max(0.0);
  const Eigen::VectorXd sx = (lx / (lx + mu)).sqrt().matrix();
  const Eigen::VectorXd sy = (ly / (ly + mu)).sqrt().matrix();

  // Correlations are the singular values of Wx^{1/2} Wy^{1/2}.
  const Eigen::MatrixXd c = sx.asDiagonal() * (ex.eigenvectors().transpose() * ey.eigenvectors()) * sy.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(c);
  if (svd.info() != Eigen::Success) throw NumericalError("kcca: singular value decomposition failed");
  return make_result(svd.singularValues(), mu, start);
}

CcaResult rcca(const FeatureMatrix& zx, const FeatureMatrix& zy, double mu) {
  return linear_cca(zx.values, zy.values, mu);
}

double total_correlation_objective(const KernelMatrix& kx, const KernelMatrix& ky, double mu) {
  require_mu(mu, "total_correlation_objective");
  const Eigen::Index n = kx.size();
  if (ky.size() != n) throw ParameterError("total_correlation_objective: kernel sizes differ");
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  // (Ky + mu I)^{-1} Kx, then (Kx + mu I)^{-1} Ky times that.
  const auto fy = linalg::spd_factor(ky.values + mu * id, "total_correlation_objective");
  const auto fx = linalg::spd_factor(kx.values + mu * id, "total_correlation_objective");
  const Eigen::MatrixXd inner = fy.solve(kx.values);
  const Eigen::MatrixXd outer = fx.solve(ky.values * inner);
  return outer.trace();
}

}  // namespace rfcca
