#include "driftfit/inference.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "driftfit/fit_json.hpp"
#include "driftfit/simulate.hpp"
#include "json.hpp"

namespace {

using namespace driftfit;

// Sample-unit truth used throughout: a Full6 process with the inertial peak
// at -0.8 of Nyquist.
ModelParams truth() {
  ModelParams p;
  p.A = 1.0;
  p.c = 0.1;
  p.omega0 = -0.8 * 3.141592653589793;
  p.B = 10.0;
  p.alpha = 0.9;
  p.h = 0.1;
  return p;
}

FrequencyMask both_sides(double f0, double mult) {
  FrequencyMask m;
  m.cutoff = mult * std::abs(f0);
  return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(HessianCov, QuadraticGivesInverseCurvature) {
  Eigen::Matrix3d M;
  M << 4.0, 1.0, 0.5, 1.0, 3.0, -0.2, 0.5, -0.2, 2.0;
  const std::vector<double> a{0.7, -1.3, 2.2};
  const auto ll = [&](const std::vector<double>& x) {
    Eigen::Vector3d d(x[0] - a[0], x[1] - a[1], x[2] - a[2]);
    return -0.5 * d.dot(M * d);
  };
  const auto r = hessian_cov(ll, a);
  const Eigen::Matrix3d inv = M.inverse();
  ASSERT_EQ(r.dim, 3u);
  EXPECT_FALSE(r.degenerate);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(r.cov[i * 3 + j] - inv(i, j)), 1e-6 * std::abs(inv(i, j)) + 1e-12);
      EXPECT_DOUBLE_EQ(r.cov[i * 3 + j], r.cov[j * 3 + i]);
    }
    EXPECT_NEAR(r.std_errors[i], std::sqrt(inv(i, i)), 1e-6);
    EXPECT_NEAR(r.corr[i * 3 + i], 1.0, 1e-12);
    EXPECT_LT(r.ci[i].first, a[i]);
    EXPECT_GT(r.ci[i].second, a[i]);
    EXPECT_NEAR(r.ci[i].second - a[i], 1.959963984540054 * r.std_errors[i], 1e-9);
  }
}

TEST(HessianCov, SingularCurvatureIsFlagged) {
  const auto ll = [](const std::vector<double>& x) {
    const double s = x[0] + x[1];
    return -0.5 * s * s;
  };
  const auto r = hessian_cov(ll, {0.0, 0.0});
  EXPECT_TRUE(r.degenerate);
  for (double v : r.cov) EXPECT_TRUE(std::isfinite(v));
}

TEST(Lrt, ThresholdAndPValue) {
  EXPECT_NEAR(chi_square_threshold95(1), 3.841458820694124, 1e-12);
  EXPECT_EQ(chi_square_threshold95(0), 0.0);

  FitResult null_fit, alt_fit;
  null_fit.params.variant = Variant::kFixedFreq5;
  alt_fit.params.variant = Variant::kFull6;
  null_fit.n = alt_fit.n = 100;
  null_fit.data_digest = alt_fit.data_digest = 42;
  null_fit.loglik = -500.0;
  alt_fit.loglik = -500.0 + 3.841 / 2.0;
  const auto r = likelihood_ratio(null_fit, alt_fit);
  EXPECT_EQ(r.df, 1);
  EXPECT_NEAR(r.statistic, 3.841, 1e-9);
  EXPECT_NEAR(r.p_value, 0.05, 1e-4);
  EXPECT_NEAR(r.threshold95, 3.841458820694124, 1e-12);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Lrt, IdenticalFitsGiveZero) {
  FitResult f;
  f.params.variant = Variant::kFull6;
  f.loglik = -10.0;
  const auto r = likelihood_ratio(f, f);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.df, 0);
}

TEST(Lrt, NegativeStatisticIsFlooredWithWarning) {
  FitResult null_fit, alt_fit;
  null_fit.params.variant = Variant::kFixedFreq5;
  alt_fit.params.variant = Variant::kFull6;
  null_fit.loglik = -100.0;
  alt_fit.loglik = -100.0 - 1e-8;
  auto r = likelihood_ratio(null_fit, alt_fit);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(r.warnings.empty());
  alt_fit.loglik = -101.0;
  r = likelihood_ratio(null_fit, alt_fit);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Lrt, RejectsMismatchedFits) {
  FitResult a, b;
  a.params.variant = Variant::kMaternOnly3;
  b.params.variant = Variant::kOuOnly3;
  EXPECT_THROW(likelihood_ratio(a, b), std::invalid_argument);
  a.params.variant = Variant::kFixedFreq5;
  b.params.variant = Variant::kFull6;
  b.mask.side = Side::kNegative;
  EXPECT_THROW(likelihood_ratio(a, b), std::invalid_argument);
  b.mask = a.mask;
  b.kind = LikelihoodKind::kWhittle;
  EXPECT_THROW(likelihood_ratio(a, b), std::invalid_argument);
  b.kind = a.kind;
  b.data_digest = a.data_digest + 1;
  EXPECT_THROW(likelihood_ratio(a, b), std::invalid_argument);
}

TEST(Lrt, BoundaryNullCarriesCaveat) {
  FitResult a, b;
  a.params.variant = Variant::kFbmBackground5;
  b.params.variant = Variant::kFull6;
  b.loglik = 2.0;
  const auto r = likelihood_ratio(a, b);
  EXPECT_EQ(r.df, 1);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(InitialGuess, FindsPureOscillationPeak) {
  ModelParams p;
  p.variant = Variant::kOuOnly3;
  p.A = 1.0;
  p.c = 0.05;
  p.omega0 = -1.1;
  const auto pg = periodogram(simulate(p, 1000, 1.0, 3));
  const auto g = initial_guess(pg, -1.0, Variant::kFull6);
  EXPECT_LE(std::abs(g.omega0 - p.omega0), pg.spacing());
  EXPECT_NO_THROW(g.validate(1.0));
}

TEST(InitialGuess, BackgroundOnlyIgnoresInertialBand) {
  ModelParams p;
  p.variant = Variant::kMaternOnly3;
  p.B = 10.0;
  p.alpha = 0.9;
  p.h = 0.1;
  const auto pg = periodogram(simulate(p, 800, 1.0, 5));
  const auto a = initial_guess(pg, -1.0, Variant::kMaternOnly3);
  const auto b = initial_guess(pg, 2.0, Variant::kMaternOnly3);
  EXPECT_EQ(a.B, b.B);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.h, b.h);
  EXPECT_NO_THROW(a.validate(1.0));
}

TEST(InitialGuess, FlatSpectrumClipsSlopeAtLowerBound) {
  Periodogram pg;
  pg.n = 512;
  pg.dt = 1.0;
  pg.freqs = fourier_frequencies(512, 1.0);
  pg.values.assign(pg.size(), 1.0);
  const auto g = initial_guess(pg, -1.0, Variant::kMaternOnly3);
  EXPECT_GT(g.alpha, 0.5);
  EXPECT_LE(g.alpha, 0.55 + 1e-12);
}

class FitOnSimulated : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    z_ = new ComplexSeries(simulate(truth(), 1200, 1.0, 20240501));
    pg_ = new Periodogram(periodogram(*z_));
    base_ = new FitResult(fit(*pg_, Variant::kFull6, both_sides(f0(), 1.5), f0()));
  }
  static void TearDownTestSuite() {
    delete base_;
    delete pg_;
    delete z_;
  }
  static double f0() { return truth().omega0; }
  static ComplexSeries* z_;
  static Periodogram* pg_;
  static FitResult* base_;
};
ComplexSeries* FitOnSimulated::z_ = nullptr;
Periodogram* FitOnSimulated::pg_ = nullptr;
FitResult* FitOnSimulated::base_ = nullptr;

TEST_F(FitOnSimulated, RecoversTruthWithinIntervals) {
  const auto& r = *base_;
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.covariance.degenerate);
  const auto t = truth();
  for (Param k : r.free) {
    const auto [lo, hi] = r.ci_of(k);
    EXPECT_LT(lo, r.params.get(k));
    EXPECT_GT(hi, r.params.get(k));
    // Generous: three interval half-widths.
    EXPECT_LT(std::abs(r.params.get(k) - t.get(k)), 3.0 * (hi - lo) / 2.0) << param_name(k);
  }
  EXPECT_EQ(r.free.size(), 6u);
  EXPECT_EQ(r.n, 1200u);
}

TEST_F(FitOnSimulated, CovarianceIsSymmetricPositiveSemidefinite) {
  const auto& c = base_->covariance;
  const auto d = static_cast<Eigen::Index>(c.dim);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      m(i, j) = c.cov[i * d + j];
      EXPECT_DOUBLE_EQ(c.cov[i * d + j], c.cov[j * d + i]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * es.eigenvalues().maxCoeff());
}

TEST_F(FitOnSimulated, GradientVanishesAtEstimate) {
  const auto& r = *base_;
  Objective obj(*pg_, r.mask, r.kind);
  for (Param k : r.free) {
    const double x = r.params.get(k);
    const double step = 1e-5 * std::max(std::abs(x), 1e-3);
    auto hi = r.params, lo = r.params;
    hi.set(k, x + step);
    lo.set(k, x - step);
    // Score change over a relative step, compared with the score's own scale.
    const double g = (obj(hi) - obj(lo)) / (2.0 * step) * std::max(std::abs(x), 1e-3);
    EXPECT_LT(std::abs(g), 1e-3 * std::abs(r.loglik)) << param_name(k);
  }
}

TEST_F(FitOnSimulated, TransformChoiceDoesNotChangeEstimates) {
  FitOptions o;
  o.transform = Transform::kSoftplus;
  const auto alt = fit(*pg_, Variant::kFull6, base_->mask, f0(), std::nullopt, o);
  for (Param k : base_->free) {
    EXPECT_LT(rel(alt.params.get(k), base_->params.get(k)), 1e-4) << param_name(k);
  }
  EXPECT_NEAR(alt.loglik, base_->loglik, 1e-5);
}

TEST_F(FitOnSimulated, ScaleEquivariance) {
  const double gamma = 3.0;
  ComplexSeries scaled = *z_;
  for (auto& v : scaled.values) v *= gamma;
  const auto r = fit(scaled, Variant::kFull6, base_->mask, f0());
  EXPECT_LT(rel(r.params.A, gamma * base_->params.A), 1e-4);
  EXPECT_LT(rel(r.params.B, gamma * base_->params.B), 1e-4);
  for (Param k : {Param::kOmega0, Param::kC, Param::kH, Param::kAlpha}) {
    EXPECT_LT(rel(r.params.get(k), base_->params.get(k)), 1e-4) << param_name(k);
  }
}

TEST_F(FitOnSimulated, DeterministicAndDigestTracked) {
  const auto again = fit(*pg_, Variant::kFull6, base_->mask, f0());
  EXPECT_EQ(again.loglik, base_->loglik);
  EXPECT_EQ(again.params.omega0, base_->params.omega0);
  EXPECT_EQ(again.data_digest, data_digest(*pg_));
}

TEST_F(FitOnSimulated, NestedFitsAreOrdered) {
  const auto nf = fit_nested(*pg_, Variant::kFixedFreq5, Variant::kFull6, base_->mask, f0());
  EXPECT_GE(nf.alt_fit.loglik, nf.null_fit.loglik - 1e-6);
  EXPECT_GE(nf.lrt.statistic, 0.0);
  EXPECT_EQ(nf.lrt.df, 1);
  EXPECT_EQ(nf.null_fit.params.omega0, f0());
  // True omega0 equals f0 here, so both fits should agree within intervals.
  for (Param k : nf.null_fit.free) {
    const auto [lo1, hi1] = nf.null_fit.ci_of(k);
    const auto [lo2, hi2] = nf.alt_fit.ci_of(k);
    EXPECT_TRUE(lo1 <= hi2 && lo2 <= hi1) << param_name(k);
  }
  const auto mo = fit_nested(*pg_, Variant::kMaternOnly3, Variant::kFull6, base_->mask, f0());
  EXPECT_GE(mo.alt_fit.loglik, mo.null_fit.loglik - 1e-6);
  EXPECT_EQ(mo.lrt.df, 3);
  EXPECT_LT(mo.lrt.p_value, 1e-6);
}

TEST_F(FitOnSimulated, JsonDocument) {
  const auto j = nlohmann::json::parse(fit_to_json(*base_));
  EXPECT_EQ(j["variant"], "full6");
  EXPECT_EQ(j["likelihood"], "blurred");
  EXPECT_DOUBLE_EQ(j["loglik"].get<double>(), base_->loglik);
  EXPECT_EQ(j["cov"].size(), 36u);
  EXPECT_EQ(j["free"].size(), 6u);
  EXPECT_TRUE(j.contains("mask"));
  EXPECT_TRUE(j.contains("data_digest"));
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_DOUBLE_EQ(j["params"]["alpha"].get<double>(), base_->params.alpha);
}

TEST(Fit, PhysicalUnitsMatchSampleUnits) {
  const double dt = 7200.0;
  const auto z_unit = simulate(truth(), 600, 1.0, 77);
  ComplexSeries z_phys(z_unit.values, dt);
  const double f0 = truth().omega0;
  const auto a = fit(z_unit, Variant::kFull6, both_sides(f0, 1.5), f0);
  const auto b = fit(z_phys, Variant::kFull6, both_sides(f0 / dt, 1.5), f0 / dt);
  const auto back = b.params.to_sample_units(dt);
  for (Param k : a.free) EXPECT_LT(rel(back.get(k), a.params.get(k)), 1e-6) << param_name(k);
  EXPECT_NEAR(b.loglik, a.loglik - a.num_frequencies * std::log(dt), 1e-6 * std::abs(a.loglik));
  // Standard errors scale like the parameters.
  EXPECT_LT(rel(b.std_error_of(Param::kC) * dt, a.std_error_of(Param::kC)), 1e-3);
  EXPECT_LT(rel(b.std_error_of(Param::kAlpha), a.std_error_of(Param::kAlpha)), 1e-3);
}

TEST(Fit, MaternOnlyRecoversBackgroundParameters) {
  ModelParams p;
  p.variant = Variant::kMaternOnly3;
  p.B = 10.0;
  p.alpha = 0.9;
  p.h = 0.1;
  const auto r = fit(simulate(p, 2000, 1.0, 8), Variant::kMaternOnly3, FrequencyMask{}, -1.0);
  EXPECT_TRUE(r.converged);
  for (Param k : r.free) {
    const auto [lo, hi] = r.ci_of(k);
    EXPECT_TRUE(lo <= p.get(k) && p.get(k) <= hi) << param_name(k) << " " << r.params.get(k);
  }
  EXPECT_TRUE(std::isnan(r.std_error_of(Param::kA)));
}

TEST(Fit, TooFewFrequenciesRejected) {
  const auto z = simulate(truth(), 64, 1.0, 1);
  FrequencyMask m;
  m.cutoff = 0.3;  // keeps 3 per side at n = 64
  m.side = Side::kNegative;
  EXPECT_THROW(fit(z, Variant::kFull6, m, -0.2), std::invalid_argument);
}

TEST(Fit, InitOverridesGuess) {
  const auto z = simulate(truth(), 400, 1.0, 2);
  auto init = truth();
  FitOptions o;
  o.max_evals = 1;
  o.max_restarts = 0;
  o.compute_cov = false;
  const auto r = fit(z, Variant::kFull6, both_sides(init.omega0, 1.5), init.omega0, init, o);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_NEAR(r.params.alpha, init.alpha, 1e-12);
}

}  // namespace
