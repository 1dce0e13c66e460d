#include "driftfit/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "driftfit/simulate.hpp"
#include "oracles.hpp"

namespace {

using namespace driftfit;
constexpr double kPi = std::numbers::pi;

ComplexSeries random_series(std::size_t n, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng) + 3.0, g(rng) - 1.0};
  return ComplexSeries(std::move(v), dt);
}

ModelParams matern(double B, double alpha, double h) {
  ModelParams p;
  p.variant = Variant::kMaternOnly3;
  p.B = B;
  p.alpha = alpha;
  p.h = h;
  return p;
}

TEST(FourierGrid, EvenLengthHoldsNyquistOnce) {
  const auto f = fourier_frequencies(4, 1.0);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_DOUBLE_EQ(f[0], -kPi);
  EXPECT_DOUBLE_EQ(f[1], -kPi / 2.0);
  EXPECT_DOUBLE_EQ(f[2], kPi / 2.0);
  EXPECT_EQ(fourier_bin(0, 4), -2);
  EXPECT_EQ(fourier_bin(2, 4), 1);
}

TEST(FourierGrid, OddLength) {
  const auto f = fourier_frequencies(5, 1.0);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_DOUBLE_EQ(f[0], -4.0 * kPi / 5.0);
  EXPECT_DOUBLE_EQ(f[1], -2.0 * kPi / 5.0);
  EXPECT_DOUBLE_EQ(f[2], 2.0 * kPi / 5.0);
  EXPECT_DOUBLE_EQ(f[3], 4.0 * kPi / 5.0);
}

TEST(FourierGrid, SpacingForTwoHourlyRecord) {
  const double dt = 7200.0;
  const auto f = fourier_frequencies(1200, dt);
  EXPECT_EQ(f.size(), 1199u);
  // 2 pi / 2400 rad per hour.
  EXPECT_NEAR((f[1] - f[0]) * 3600.0, 2.0 * kPi / 2400.0, 1e-15);
  for (double w : f) EXPECT_NE(w, 0.0);
}

TEST(Periodogram, ConstantSeriesIsZero) {
  ComplexSeries z(std::vector<cplx>(64, cplx(2.5, -1.0)), 10.0);
  const auto pg = periodogram(z);
  for (double v : pg.values) EXPECT_EQ(v, 0.0);
}

TEST(Periodogram, ComplexExponentialConcentratesAtItsFrequency) {
  const std::size_t n = 96;
  const double dt = 2.0;
  const auto freqs = fourier_frequencies(n, dt);
  const std::size_t k = 30;
  std::vector<cplx> v(n);
  for (std::size_t t = 0; t < n; ++t) v[t] = std::polar(1.0, freqs[k] * t * dt);
  const auto pg = periodogram(ComplexSeries(v, dt));
  for (std::size_t i = 0; i < pg.size(); ++i) {
    if (i == k) {
      EXPECT_NEAR(pg.values[i], n * dt, 1e-9);
    } else {
      EXPECT_LT(pg.values[i], 1e-20);
    }
  }
}

TEST(Periodogram, MatchesDirectDft) {
  for (std::size_t n : {7u, 16u, 101u, 256u}) {
    const auto z = random_series(n, 3.0, n);
    const auto pg = periodogram(z);
    const auto direct = driftfit::testing::direct_periodogram(z.values, z.dt);
    ASSERT_EQ(direct.size(), pg.size());
    for (std::size_t i = 0; i < pg.size(); ++i) {
      EXPECT_NEAR(pg.values[i], direct[i], 1e-10 * (1.0 + direct[i])) << n << " " << i;
    }
  }
}

TEST(Periodogram, ParsevalOnRandomSeries) {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<std::size_t> len(2, 600);
  std::uniform_real_distribution<double> dtd(0.1, 10000.0);
  for (int trial = 0; trial < 120; ++trial) {
    const auto z = random_series(len(rng), dtd(rng), 1000 + trial);
    const auto pg = periodogram(z);
    const double n = static_cast<double>(z.size());
    cplx m = 0.0;
    for (const auto& x : z.values) m += x;
    m /= n;
    double lhs = 0.0, rhs = 0.0;
    for (double v : pg.values) lhs += v;
    lhs /= n * z.dt;
    for (const auto& x : z.values) rhs += std::norm(x - m);
    rhs /= n;
    EXPECT_LT(std::abs(lhs - rhs) / rhs, 1e-10) << "trial " << trial;
  }
}

TEST(Periodogram, InvariantToAddedConstant) {
  auto z = random_series(300, 1.0, 5);
  const auto a = periodogram(z);
  for (auto& x : z.values) x += cplx(1e3, -250.0);
  const auto b = periodogram(z);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.values[i], b.values[i], 1e-7 * (1.0 + a.values[i]));
  }
}

TEST(Periodogram, RealSeriesIsSymmetricExactly) {
  for (std::size_t n : {9u, 10u, 257u}) {
    auto z = random_series(n, 1.0, n);
    for (auto& x : z.values) x = x.real();
    const auto pg = periodogram(z);
    const std::size_t off = n % 2 == 0 ? 1 : 0;  // skip the lone Nyquist entry
    const std::size_t m = pg.size() - off;
    for (std::size_t i = 0; i < m / 2; ++i) {
      EXPECT_EQ(pg.values[off + i], pg.values[pg.size() - 1 - i]);
    }
  }
}

TEST(ExpectedPeriodogram, WhiteNoiseIsFlat) {
  const double sigma2 = 2.5, dt = 3.0;
  Acvs a;
  a.dt = dt;
  a.values.assign(50, cplx(0.0));
  a.values[0] = sigma2;
  const auto v = expected_periodogram_values(a, 50);
  ASSERT_EQ(v.size(), 49u);
  for (double x : v) EXPECT_NEAR(x, sigma2 * dt, 1e-12);
}

TEST(ExpectedPeriodogram, MatchesDirectLagSum) {
  ModelParams p;
  p.A = 1.0;
  p.c = 0.1;
  p.omega0 = -0.5;
  p.B = 10.0;
  p.alpha = 0.9;
  p.h = 0.1;
  for (std::size_t n : {6u, 33u, 128u}) {
    const auto fast = expected_periodogram(p, n, 1.0);
    const auto slow = driftfit::testing::direct_expected_periodogram(p, n, 1.0);
    double imag_ratio = 1.0;
    expected_periodogram_values(model_acvs_sequence(p, n, 1.0), n, &imag_ratio);
    EXPECT_LT(imag_ratio, 1e-8);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      EXPECT_LT(std::abs(fast.values[i] - slow[i]) / slow[i], 1e-10) << n << " " << i;
      EXPECT_GT(fast.values[i], 0.0);
    }
  }
}

TEST(ExpectedPeriodogram, ScalesWithPhysicalInterval) {
  ModelParams p;
  p.A = 0.05;
  p.c = 4e-6;
  p.omega0 = -7e-5;
  p.B = 0.3;
  p.alpha = 1.1;
  p.h = 5e-6;
  const double dt = 7200.0;
  const auto phys = expected_periodogram(p, 200, dt);
  const auto unit = expected_periodogram(p.to_sample_units(dt), 200, 1.0);
  for (std::size_t i = 0; i < phys.size(); ++i) {
    EXPECT_NEAR(phys.freqs[i] * dt, unit.freqs[i], 1e-14);
    EXPECT_LT(std::abs(phys.values[i] - unit.values[i] * dt) / phys.values[i], 1e-10);
  }
}

TEST(ExpectedPeriodogram, ConvergesToSpectrumAsLengthGrows) {
  const auto p = matern(1.0, 1.2, 0.3);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const auto ep = expected_periodogram(p, n, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < ep.size(); ++i) {
      if (std::abs(ep.freqs[i]) > kPi / 2.0) continue;
      const double s = matern_spectrum(p, ep.freqs[i]);
      worst = std::max(worst, std::abs(ep.values[i] - s) / s);
    }
    EXPECT_LT(worst, prev) << n;
    prev = worst;
  }
}

TEST(ExpectedPeriodogram, SteepSpectrumLeaksAboveTruthAtHighFrequency) {
  const auto p = matern(10.0, 1.65, 0.1);
  const auto ep = expected_periodogram(p, 512, 1.0);
  for (std::size_t i = 0; i < ep.size(); ++i) {
    if (std::abs(ep.freqs[i]) < 2.0) continue;
    EXPECT_GT(ep.values[i], matern_spectrum(p, ep.freqs[i])) << ep.freqs[i];
  }
}

TEST(ExpectedPeriodogram, SimulatedMeanWithinMonteCarloError) {
  // Small-scale version of the acceptance check.
  const auto p = matern(10.0, 0.9, 0.1);
  const std::size_t n = 128, reps = 400;
  const auto ep = expected_periodogram(p, n, 1.0);
  std::vector<double> s(ep.size()), s2(ep.size());
  for (std::size_t r = 0; r < reps; ++r) {
    const auto pg = periodogram(simulate(p, n, 1.0, derive_seed(99, r)));
    for (std::size_t i = 0; i < pg.size(); ++i) {
      s[i] += pg.values[i];
      s2[i] += pg.values[i] * pg.values[i];
    }
  }
  std::size_t ok = 0;
  for (std::size_t i = 0; i < ep.size(); ++i) {
    const double m = s[i] / reps;
    const double sd = std::sqrt((s2[i] / reps - m * m) * reps / (reps - 1.0));
    if (std::abs(m - ep.values[i]) <= 3.0 * sd / std::sqrt(static_cast<double>(reps))) ++ok;
  }
  EXPECT_GE(static_cast<double>(ok) / ep.size(), 0.97);
}

Periodogram grid(std::size_t n) {
  Periodogram pg;
  pg.n = n;
  pg.dt = 1.0;
  pg.freqs = fourier_frequencies(n, 1.0);
  pg.values.assign(pg.freqs.size(), 1.0);
  return pg;
}

TEST(FrequencyMask, NegativeSideHalvesSymmetricGrid) {
  const auto pg = grid(513);
  FrequencyMask both, neg, pos;
  neg.side = Side::kNegative;
  pos.side = Side::kPositive;
  EXPECT_EQ(both.select(pg).size(), 512u);
  EXPECT_EQ(neg.select(pg).size(), 256u);
  EXPECT_EQ(pos.select(pg).size(), 256u);
}

TEST(FrequencyMask, CutoffExcludesAndZero) {
  const auto pg = grid(100);
  FrequencyMask m;
  m.cutoff = 1.0;
  m.excludes = {{-0.5, -0.3}};
  for (std::size_t i : m.select(pg)) {
    const double w = pg.freqs[i];
    EXPECT_LE(std::abs(w), 1.0);
    EXPECT_FALSE(w >= -0.5 && w <= -0.3);
    EXPECT_NE(w, 0.0);
  }
  EXPECT_FALSE(m.contains(0.0));
}

TEST(FrequencyMask, RejectsEmptyOrTooTightCutoff) {
  const auto pg = grid(100);
  FrequencyMask m;
  m.cutoff = 0.01;  // below 2 pi / 100
  EXPECT_THROW(m.select(pg), std::invalid_argument);
  FrequencyMask e;
  e.excludes = {{-4.0, 4.0}};
  EXPECT_THROW(e.select(pg), std::invalid_argument);
}

TEST(MaskRule, HemisphereAndCutoff) {
  MaskRule r;
  const auto north = r.resolve(-7.29e-5);
  EXPECT_EQ(north.side, Side::kNegative);
  ASSERT_TRUE(north.cutoff.has_value());
  EXPECT_DOUBLE_EQ(*north.cutoff, 1.75 * 7.29e-5);
  EXPECT_EQ(r.resolve(7.29e-5).side, Side::kPositive);
  r.cutoff_kind = MaskRule::CutoffKind::kNone;
  EXPECT_EQ(r.resolve(0.0).side, Side::kBoth);
  EXPECT_FALSE(r.resolve(0.0).cutoff.has_value());
}

TEST(MaskRule, ParsesFlags) {
  EXPECT_EQ(MaskRule::parse_side("neg"), MaskRule::SideRule::kNegative);
  EXPECT_EQ(MaskRule::parse_side("auto"), MaskRule::SideRule::kAuto);
  EXPECT_THROW(MaskRule::parse_side("left"), std::invalid_argument);
  auto [k1, v1] = MaskRule::parse_cutoff("1.5");
  EXPECT_EQ(k1, MaskRule::CutoffKind::kMultipleOfF0);
  EXPECT_EQ(v1, 1.5);
  auto [k2, v2] = MaskRule::parse_cutoff("2e-4rad/s");
  EXPECT_EQ(k2, MaskRule::CutoffKind::kAbsolute);
  EXPECT_EQ(v2, 2e-4);
  EXPECT_EQ(MaskRule::parse_cutoff("none").first, MaskRule::CutoffKind::kNone);
  EXPECT_THROW(MaskRule::parse_cutoff("-1"), std::invalid_argument);
  EXPECT_THROW(MaskRule::parse_cutoff("2hz"), std::invalid_argument);
}

}  // namespace
