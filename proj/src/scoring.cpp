#include "rfcca/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "linalg.hpp"
#include "rfcca/error.hpp"
#include "rfcca/random.hpp"

namespace rfcca {

namespace {

void require_single_column_map(const FeatureMatrix& z, const char* op) {
  if (z.columns_per_feature() != 1) {
    throw ParameterError(std::string(op) + ": scoring needs one column per pool feature");
  }
}

void require_unweighted(const FeatureMatrix& z, const char* op) {
  if (z.weights) throw ParameterError(std::string(op) + ": Z must be unweighted");
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(what) + " must be positive and finite");
  }
}

// Factor of Z^T Z + reg I.
Eigen::LLT<Eigen::MatrixXd> regularized_gram(const Eigen::MatrixXd& z, double reg) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(z.cols(), z.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  g = g.selfadjointView<Eigen::Lower>();
  g.diagonal().array() += reg;
  return linalg::spd_factor(g, "regularized Gram matrix");
}

ScoreVector make(Eigen::VectorXd v, ScoreRule rule, double param) {
  linalg::require_finite(v, "score computation");
  ScoreVector s;
  s.scores = std::move(v);
  s.rule = rule;
  s.parameter = param;
  return s;
}

}  // namespace

ScoreVector score_general(const FeatureMatrix& z, const Eigen::MatrixXd& b) {
  require_unweighted(z, "score_general");
  require_single_column_map(z, "score_general");
  const Eigen::Index n = z.rows();
  if (b.rows() != n || b.cols() != n) {
    throw ParameterError("score_general: center matrix must be " + std::to_string(n) + " x " +
                         std::to_string(n));
  }
  const Eigen::MatrixXd bz = b * z.values;
  return make(z.values.cwiseProduct(bz).colwise().sum().transpose(), ScoreRule::General, 0.0);
}

ScoreVector ls_scores(const FeatureMatrix& z, double lambda) {
  require_positive(lambda, "ls_scores: lambda");
  require_single_column_map(z, "ls_scores");
  Eigen::MatrixXd g = z.values.transpose() * z.values;
  Eigen::MatrixXd a = g;
  a.diagonal().array() += lambda;
  const auto llt = linalg::spd_factor(a, "ls_scores");
  const Eigen::MatrixXd h = llt.solve(g);
  return make(h.diagonal(), ScoreRule::LeverageScore, lambda);
}

ScoreVector eerf_scores(const FeatureMatrix& z, const Eigen::VectorXd& y) {
  require_unweighted(z, "eerf_scores");
  require_single_column_map(z, "eerf_scores");
  if (y.size() != z.rows()) throw ParameterError("eerf_scores: y length differs from row count");
  const double unscale = std::sqrt(static_cast<double>(z.feature_count));
  const double n = static_cast<double>(z.rows());
  Eigen::VectorXd s = ((z.values.transpose() * y) * (unscale / n)).cwiseAbs();
  return make(std::move(s), ScoreRule::Eerf, 0.0);
}

ScoreVector orcca1_scores(const FeatureMatrix& zx, const Eigen::VectorXd& y, double mu) {
  require_positive(mu, "orcca1_scores: mu");
  require_single_column_map(zx, "orcca1_scores");
  if (y.size() != zx.rows()) throw ParameterError("orcca1_scores: y length differs from row count");
  const Eigen::VectorXd zty = zx.values.transpose() * y;
  const Eigen::VectorXd q = regularized_gram(zx.values, mu).solve(zty);
  return make(q.cwiseProduct(zty), ScoreRule::Orcca1, mu);
}

std::pair<ScoreVector, ScoreVector> orcca2_scores(const FeatureMatrix& zx, const FeatureMatrix& zy,
                                                  double mu) {
  require_positive(mu, "orcca2_scores: mu");
  require_single_column_map(zx, "orcca2_scores");
  require_single_column_map(zy, "orcca2_scores");
  if (zx.rows() != zy.rows()) throw ParameterError("orcca2_scores: views differ in row count");

  const Eigen::MatrixXd cross = zx.values.transpose() * zy.values;  // M0x x M0y
  const Eigen::MatrixXd q = regularized_gram(zx.values, mu).solve(cross);
  const Eigen::MatrixXd p = regularized_gram(zy.values, mu).solve(cross.transpose());
  // diag(QP)_i = sum_j Q_ij P_ji
  Eigen::VectorXd sx = q.cwiseProduct(p.transpose()).rowwise().sum();
  Eigen::VectorXd sy = p.cwiseProduct(q.transpose()).rowwise().sum();
  return {make(std::move(sx), ScoreRule::Orcca2X, mu), make(std::move(sy), ScoreRule::Orcca2Y, mu)};
}

ScoreVector normalized(const ScoreVector& s) {
  if (s.size() == 0) throw ParameterError("normalized: empty score vector");
  if ((s.scores.array() < 0.0).any()) {
    throw ParameterError("normalized: scores must be nonnegative");
  }
  const double total = s.scores.sum();
  if (!(total > 0.0)) throw ParameterError("normalized: scores are all zero");
  ScoreVector out = s;
  out.scores /= total;
  out.normalized = true;
  return out;
}

Selection select_top_m(const ScoreVector& s, Eigen::Index m) {
  const Eigen::Index m0 = s.size();
  if (m < 1 || m > m0) {
    throw ParameterError("select_top_m: cannot select " + std::to_string(m) + " of " +
                         std::to_string(m0) + " features");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m0));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return s.scores(a) > s.scores(b); });
  order.resize(static_cast<std::size_t>(m));
  Selection sel;
  sel.indices = std::move(order);
  sel.mode = SelectionMode::TopM;
  return sel;
}

Selection sample_proportional(const ScoreVector& s, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("sample_proportional: M must be positive");
  const ScoreVector q = normalized(s);
  const Eigen::Index m0 = q.size();
  std::discrete_distribution<Eigen::Index> pick(q.scores.data(), q.scores.data() + m0);
  Rng rng(derive_seed(seed, "sample_proportional"));

  Selection sel;
  sel.mode = SelectionMode::SampledProportional;
  sel.indices.resize(static_cast<std::size_t>(m));
  Eigen::VectorXd ratios(m);
  const double prior = 1.0 / static_cast<double>(m0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index idx = pick(rng);
    sel.indices[static_cast<std::size_t>(i)] = idx;
    ratios(i) = prior / q.scores(idx);
  }
  sel.weight_ratios = std::move(ratios);
  return sel;
}

}  // namespace rfcca
