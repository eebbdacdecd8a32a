#pragma once

// Data-dependent scores for pool features and the two ways of turning scores
// into a feature subset: deterministic top-M and proportional resampling.
//
// Every score is a quadratic form z^T B z over the stored, 1/sqrt(M0)-scaled
// columns of the pool transform. Relative to the unscaled feature vectors this
// is a positive factor 1/M0, so rankings and normalized distributions are the
// same either way.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rfcca/features.hpp"

namespace rfcca {

enum class ScoreRule { General, LeverageScore, Eerf, Orcca1, Orcca2X, Orcca2Y };

struct ScoreVector {
  Eigen::VectorXd scores;  // one per pool feature, may be negative for General/ORCCA
  ScoreRule rule = ScoreRule::General;
  double parameter = 0.0;  // lambda for LeverageScore, mu for ORCCA rules
  bool normalized = false;

  Eigen::Index size() const { return scores.size(); }
};

enum class SelectionMode { TopM, SampledProportional };

struct Selection {
  std::vector<Eigen::Index> indices;             // pool positions
  std::optional<Eigen::VectorXd> weight_ratios;  // p/q per chosen feature (sampled only)
  SelectionMode mode = SelectionMode::TopM;
};

// z_m^T B z_m for every column of an unweighted Z.
ScoreVector score_general(const FeatureMatrix& z, const Eigen::MatrixXd& b);

// diag((Z^T Z + lambda I)^{-1} Z^T Z), each entry in [0, 1).
ScoreVector ls_scores(const FeatureMatrix& z, double lambda);

// |(1/n) sum_i y_i phi(x_i, w_m)| on the unscaled feature values.
ScoreVector eerf_scores(const FeatureMatrix& z, const Eigen::VectorXd& y);

// diag((Z^T Z + mu I)^{-1} Z^T y y^T Z).
ScoreVector orcca1_scores(const FeatureMatrix& zx, const Eigen::VectorXd& y, double mu);

// With Q = (Zx^T Zx + mu I)^{-1} Zx^T Zy and P = (Zy^T Zy + mu I)^{-1} Zy^T Zx,
// returns (diag(QP), diag(PQ)).
std::pair<ScoreVector, ScoreVector> orcca2_scores(const FeatureMatrix& zx, const FeatureMatrix& zy,
                                                  double mu);

// Scores divided by their sum; requires nonnegative scores with a positive sum.
ScoreVector normalized(const ScoreVector& s);

// Indices of the M largest scores in descending score order; ties go to the
// smaller pool index.
Selection select_top_m(const ScoreVector& s, Eigen::Index m);

// M i.i.d. draws proportional to the scores, with replacement. Weight ratio
// of a draw is (1/M0) / q(index), the uniform pool prior over the normalized score.
Selection sample_proportional(const ScoreVector& s, Eigen::Index m, std::uint64_t seed);

}  // namespace rfcca
