#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rfcca/error.hpp"
#include "rfcca/features.hpp"
#include "rfcca/kernels.hpp"
#include "rfcca/scoring.hpp"

using namespace rfcca;

namespace {

FeaturePool manual_pool(Eigen::MatrixXd w, Eigen::VectorXd b) {
  FeaturePool p;
  p.frequencies = std::move(w);
  p.offsets = std::move(b);
  return p;
}

}  // namespace

TEST_CASE("offsets lie in [0, 2pi)") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = sample_pool(1, 3, 1.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, seed);
    CHECK(p.offsets.size() == 3);
    CHECK(p.offsets.minCoeff() >= 0.0);
    CHECK(p.offsets.maxCoeff() < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("CosSinPair pools have no offsets") {
  const auto p = sample_pool(3, 5, 1.0, FeatureMap::CosSinPair, Sampler::IidGaussian, 1);
  CHECK(p.offsets.size() == 0);
}

TEST_CASE("orthogonal sampler gives orthogonal directions within each block") {
  const auto p = sample_pool(4, 4, 1.0, FeatureMap::CosSinPair, Sampler::Orthogonal, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      CHECK(std::abs(p.frequencies.row(i).normalized().dot(p.frequencies.row(j).normalized())) < 1e-10);

  const auto q = sample_pool(3, 8, 2.0, FeatureMap::CosSinPair, Sampler::Orthogonal, 4);
  CHECK(q.size() == 8);
  for (int block = 0; block < 3; ++block) {
    for (int i = block * 3; i < std::min(8, block * 3 + 3); ++i)
      for (int j = i + 1; j < std::min(8, block * 3 + 3); ++j)
        CHECK(std::abs(q.frequencies.row(i).normalized().dot(q.frequencies.row(j).normalized())) < 1e-10);
  }
}

TEST_CASE("iid Gaussian frequencies have identity covariance") {
  const auto p = sample_pool(2, 10000, 1.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 11);
  const Eigen::MatrixXd cov = p.frequencies.transpose() * p.frequencies / 10000.0;
  CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("orthogonal rows are marginally N(0, sigma^2 I)") {
  const double sigma = 2.0;
  const auto p = sample_pool(3, 9000, sigma, FeatureMap::CosSinPair, Sampler::Orthogonal, 12);
  const Eigen::MatrixXd cov = p.frequencies.transpose() * p.frequencies / 9000.0;
  CHECK((cov - sigma * sigma * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.3);
  CHECK(p.frequencies.colwise().mean().cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("pools are reproducible and prefix-stable") {
  for (Sampler s : {Sampler::IidGaussian, Sampler::Orthogonal}) {
    const auto a = sample_pool(3, 20, 1.5, FeatureMap::CosineWithOffset, s, 99);
    const auto b = sample_pool(3, 20, 1.5, FeatureMap::CosineWithOffset, s, 99);
    const auto c = sample_pool(3, 50, 1.5, FeatureMap::CosineWithOffset, s, 99);
    const auto d = sample_pool(3, 20, 1.5, FeatureMap::CosineWithOffset, s, 100);
    CHECK(a.frequencies == b.frequencies);
    CHECK(a.offsets == b.offsets);
    CHECK(c.frequencies.topRows(20) == a.frequencies);
    CHECK(c.offsets.head(20) == a.offsets);
    CHECK(a.frequencies != d.frequencies);
  }
}

TEST_CASE("sample_pool rejects bad parameters") {
  CHECK_THROWS_AS(sample_pool(2, 5, 0.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 0), ParameterError);
  CHECK_THROWS_AS(sample_pool(2, 5, -1.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 0), ParameterError);
  CHECK_THROWS_AS(sample_pool(0, 5, 1.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 0), ParameterError);
  CHECK_THROWS_AS(sample_pool(2, 0, 1.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 0), ParameterError);
}

TEST_CASE("feature_matrix closed-form cases") {
  SUBCASE("zero frequency and offset gives 1") {
    const auto p = manual_pool(Eigen::MatrixXd::Zero(1, 3), Eigen::VectorXd::Zero(1));
    const Eigen::MatrixXd x = (Eigen::MatrixXd(1, 3) << 0.3, -7.0, 2.0).finished();
    const auto z = feature_matrix(x, p, 1);
    CHECK(z.values.rows() == 1);
    CHECK(z.values.cols() == 1);
    CHECK(z.values(0, 0) == 1.0);
  }
  SUBCASE("constant map with M = 4 gives 0.5") {
    const auto p = manual_pool(Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(4));
    std::mt19937_64 rng(1);
    const auto z = feature_matrix(oracle::gaussian(rng, 6, 2), p, 4);
    CHECK((z.values.array() == 0.5).all());
  }
}

TEST_CASE("feature_matrix matches the per-entry formula") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = oracle::gaussian(rng, 7, 3);
  const auto p = sample_pool(3, 12, 0.8, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 5);
  const auto z = feature_matrix(x, p, 9);
  REQUIRE(z.values.cols() == 9);
  for (int i = 0; i < 7; ++i) {
    for (int m = 0; m < 9; ++m) {
      double dot = 0.0;
      for (int c = 0; c < 3; ++c) dot += x(i, c) * p.frequencies(m, c);
      CHECK(z.values(i, m) == doctest::Approx(std::cos(dot + p.offsets(m)) / 3.0).epsilon(1e-14));
      CHECK(std::abs(z.values(i, m)) <= 1.0 / 3.0 + 1e-15);
    }
  }
  const auto pair_pool = sample_pool(3, 5, 0.8, FeatureMap::CosSinPair, Sampler::Orthogonal, 5);
  const auto zp = feature_matrix(x, pair_pool, 4);
  REQUIRE(zp.values.cols() == 8);
  for (int i = 0; i < 7; ++i) {
    for (int m = 0; m < 4; ++m) {
      const double dot = x.row(i).dot(pair_pool.frequencies.row(m));
      CHECK(zp.values(i, 2 * m) == doctest::Approx(std::cos(dot) / 2.0).epsilon(1e-14));
      CHECK(zp.values(i, 2 * m + 1) == doctest::Approx(std::sin(dot) / 2.0).epsilon(1e-14));
      const double c = zp.values(i, 2 * m), s = zp.values(i, 2 * m + 1);
      CHECK(4.0 * (c * c + s * s) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("feature_matrix errors") {
  const auto p = sample_pool(2, 5, 1.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 0);
  CHECK_THROWS_AS(feature_matrix(Eigen::MatrixXd::Zero(3, 2), p, 6), ParameterError);
  CHECK_THROWS_AS(feature_matrix(Eigen::MatrixXd::Zero(3, 3), p, 2), ParameterError);
  const std::vector<Eigen::Index> bad{0, 5};
  CHECK_THROWS_AS(feature_matrix(Eigen::MatrixXd::Zero(3, 2), p, bad), ParameterError);
}

TEST_CASE("feature Gram matrix approximates the Gaussian kernel") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd x = oracle::gaussian(rng, 50, 3) * 0.5;
  const double sigma = 1.0;
  const Eigen::MatrixXd k = oracle::gaussian_kernel(x, sigma);
  const auto p = sample_pool(3, 2000, sigma, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 6);
  const auto z = kernel_normalized(feature_matrix(x, p, 2000));
  CHECK((z.values * z.values.transpose() - k).cwiseAbs().maxCoeff() <= 0.08);

  SUBCASE("factor-two convention for the offset map") {
    const Eigen::MatrixXd xs = x.topRows(20);
    const Eigen::MatrixXd ks = k.topLeftCorner(20, 20);
    const auto big = sample_pool(3, 4000, sigma, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 7);
    const Eigen::MatrixXd lit = feature_matrix(xs, big, 4000).values;
    CHECK((2.0 * lit * lit.transpose() - ks).cwiseAbs().maxCoeff() <= 3.0 / std::sqrt(4000.0));
  }
  SUBCASE("CosSinPair needs no correction") {
    const auto pp = sample_pool(3, 2000, sigma, FeatureMap::CosSinPair, Sampler::IidGaussian, 8);
    const auto zp = feature_matrix(x, pp, 2000);
    CHECK((zp.values * zp.values.transpose() - k).cwiseAbs().maxCoeff() <= 3.0 / std::sqrt(2000.0));
    CHECK(kernel_normalized(zp).values == zp.values);
  }
}

TEST_CASE("reweighted_feature_matrix") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd x = oracle::gaussian(rng, 9, 2);
  const auto p = sample_pool(2, 10, 1.0, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 9);
  const std::vector<Eigen::Index> idx{3, 1, 3, 7};

  SUBCASE("unit ratios equal the unweighted transform") {
    const auto zw = reweighted_feature_matrix(x, p, idx, Eigen::VectorXd::Ones(4));
    CHECK(zw.values == feature_matrix(x, p, idx).values);
    REQUIRE(zw.weights.has_value());
    CHECK((zw.weights->array() == 1.0).all());
  }
  SUBCASE("ratio 4 doubles the column") {
    const std::vector<Eigen::Index> one{2};
    const auto zw = reweighted_feature_matrix(x, p, one, Eigen::VectorXd::Constant(1, 4.0));
    CHECK(zw.values.isApprox(2.0 * feature_matrix(x, p, one).values, 1e-15));
    CHECK((*zw.weights)(0) == 2.0);
  }
  SUBCASE("columns carry sqrt(ratio)") {
    const Eigen::VectorXd r = (Eigen::VectorXd(4) << 0.5, 2.0, 3.0, 0.1).finished();
    const auto zw = reweighted_feature_matrix(x, p, idx, r);
    const auto zu = feature_matrix(x, p, idx);
    for (int m = 0; m < 4; ++m) CHECK(zw.values.col(m).isApprox(std::sqrt(r(m)) * zu.values.col(m), 1e-14));
  }
  SUBCASE("nonpositive ratios are rejected") {
    CHECK_THROWS_AS(reweighted_feature_matrix(x, p, idx, Eigen::VectorXd::Zero(4)), ParameterError);
    const Eigen::VectorXd neg = (Eigen::VectorXd(4) << 1, 1, -1, 1).finished();
    CHECK_THROWS_AS(reweighted_feature_matrix(x, p, idx, neg), ParameterError);
    CHECK_THROWS_AS(reweighted_feature_matrix(x, p, idx, Eigen::VectorXd::Ones(3)), ParameterError);
  }
}

TEST_CASE("leverage-score sampling error shrinks with M") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd x = oracle::gaussian(rng, 100, 2) * 0.5;
  const double sigma = 1.0, lambda = 1.0;
  const Eigen::MatrixXd k = oracle::gaussian_kernel(x, sigma);
  const Eigen::MatrixXd center = oracle::inverse(oracle::plus_diag(k, lambda));
  const int trials = 200;
  double err50 = 0.0, err500 = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto p = sample_pool(2, 2000, sigma, FeatureMap::CosineWithOffset, Sampler::IidGaussian, 1000 + t);
    const ScoreVector q = score_general(kernel_normalized(feature_matrix(x, p, 2000)), center);
    for (Eigen::Index m : {50, 500}) {
      const Selection s = sample_proportional(q, m, 5000 + t);
      const auto z = kernel_normalized(reweighted_feature_matrix(x, p, s.indices, *s.weight_ratios));
      const double e = (z.values * z.values.transpose() - k).cwiseAbs().maxCoeff();
      (m == 50 ? err50 : err500) += e / trials;
    }
  }
  CHECK(err500 < err50);
}
