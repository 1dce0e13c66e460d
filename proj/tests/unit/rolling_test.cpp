#include "driftfit/rolling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "driftfit/ingest.hpp"
#include "driftfit/simulate.hpp"

namespace {

using namespace driftfit;

constexpr double kDt = 21600.0;

// Six-hourly record at a fixed latitude, inertial peak at the local f0.
struct Record {
  ComplexSeries z;
  std::vector<double> lat;
};

Record make_record(std::size_t n, double lat, std::uint64_t seed) {
  ModelParams p;
  p.A = 1.0;
  p.c = 0.1;
  p.omega0 = coriolis_frequency(lat) * kDt;
  p.B = 10.0;
  p.alpha = 0.9;
  p.h = 0.1;
  auto z = simulate(p, n, 1.0, seed);
  z.dt = kDt;
  z.t0 = 0.0;
  return {z, std::vector<double>(n, lat)};
}

RollingOptions options(std::size_t window, std::size_t stride) {
  RollingOptions o;
  o.window = window;
  o.stride = stride;
  o.jobs = 1;
  return o;
}

TEST(WindowStarts, CompleteWindowsOnly) {
  const auto s = window_starts(10, 4, 3);
  EXPECT_EQ(s, (std::vector<std::size_t>{0, 3, 6}));
  EXPECT_TRUE(window_starts(3, 4, 1).empty());
  EXPECT_EQ(window_starts(8, 8, 5), (std::vector<std::size_t>{0}));
}

TEST(Rolling, RejectsBadWindows) {
  const auto r = make_record(100, 30.0, 1);
  EXPECT_THROW(rolling_fit(r.z, r.lat, options(51, 1)), std::invalid_argument);
  EXPECT_THROW(rolling_fit(r.z, r.lat, options(102, 1)), std::invalid_argument);
  EXPECT_THROW(rolling_fit(r.z, std::vector<double>(99, 30.0), options(50, 1)),
               std::invalid_argument);
  EXPECT_THROW(rolling_fit(r.z, r.lat, options(50, 0)), std::invalid_argument);
}

TEST(Rolling, FullLengthWindowEqualsSingleFit) {
  const auto r = make_record(600, 30.0, 2);
  const auto opts = options(600, 25);
  const auto rf = rolling_fit(r.z, r.lat, opts);
  ASSERT_EQ(rf.windows.size(), 1u);
  ASSERT_TRUE(rf.windows[0].fit.has_value());
  EXPECT_EQ(rf.windows[0].center, 299u);
  const double f0 = coriolis_frequency(30.0);
  const auto direct = fit(r.z, Variant::kFull6, opts.mask_rule.resolve(f0), f0);
  EXPECT_EQ(rf.windows[0].fit->loglik, direct.loglik);
  for (int i = 0; i < kNumParams; ++i) {
    const auto k = static_cast<Param>(i);
    EXPECT_EQ(rf.windows[0].fit->params.get(k), direct.params.get(k));
  }
}

TEST(Rolling, StrideSubsamplesUnitStride) {
  const auto r = make_record(420, 30.0, 3);
  auto o1 = options(400, 1);
  auto o5 = options(400, 5);
  o1.jobs = o5.jobs = 0;
  const auto a = rolling_fit(r.z, r.lat, o1);
  const auto b = rolling_fit(r.z, r.lat, o5);
  ASSERT_EQ(a.windows.size(), 21u);
  ASSERT_EQ(b.windows.size(), 5u);
  for (std::size_t k = 0; k < b.windows.size(); ++k) {
    const auto& wa = a.windows[5 * k];
    const auto& wb = b.windows[k];
    EXPECT_EQ(wa.center, wb.center);
    ASSERT_TRUE(wa.fit && wb.fit);
    EXPECT_EQ(wa.fit->loglik, wb.fit->loglik);
    EXPECT_EQ(wa.fit->params.omega0, wb.fit->params.omega0);
  }
  const auto c = a.centers();
  for (std::size_t k = 1; k < c.size(); ++k) EXPECT_GT(c[k], c[k - 1]);
}

TEST(Rolling, SideFollowsHemisphere) {
  for (double lat : {30.0, -30.0}) {
    const auto r = make_record(500, lat, 4);
    const auto rf = rolling_fit(r.z, r.lat, options(400, 50));
    for (const auto& w : rf.windows) {
      EXPECT_EQ(w.mask.side, lat > 0 ? Side::kNegative : Side::kPositive);
      EXPECT_DOUBLE_EQ(w.f0, coriolis_frequency(lat));
      ASSERT_TRUE(w.mask.cutoff.has_value());
      EXPECT_DOUBLE_EQ(*w.mask.cutoff, 1.75 * std::abs(w.f0));
    }
  }
}

TEST(Rolling, MeanLatitudeSetsWindowF0) {
  auto r = make_record(400, 30.0, 5);
  for (std::size_t i = 0; i < r.lat.size(); ++i) r.lat[i] = 20.0 + 20.0 * i / 399.0;
  auto o = options(200, 200);
  o.variant = Variant::kMaternOnly3;
  const auto rf = rolling_fit(r.z, r.lat, o);
  ASSERT_EQ(rf.windows.size(), 2u);
  double m = 0.0;
  for (std::size_t i = 0; i < 200; ++i) m += r.lat[i];
  EXPECT_NEAR(rf.windows[0].f0, coriolis_frequency(m / 200.0), 1e-18);
}

TEST(Rolling, WarmStartDoesNotChangeAnswers) {
  const auto r = make_record(1400, 30.0, 6);
  auto cold = options(1000, 200);
  auto warm = cold;
  warm.warm_start = true;
  const auto a = rolling_fit(r.z, r.lat, cold);
  const auto b = rolling_fit(r.z, r.lat, warm);
  ASSERT_EQ(a.windows.size(), b.windows.size());
  for (std::size_t k = 0; k < a.windows.size(); ++k) {
    ASSERT_TRUE(a.windows[k].fit && b.windows[k].fit);
    for (int i = 0; i < kNumParams; ++i) {
      const auto p = static_cast<Param>(i);
      const double x = a.windows[k].fit->params.get(p);
      const double y = b.windows[k].fit->params.get(p);
      EXPECT_LE(std::abs(x - y), 1e-3 * std::abs(x)) << "window " << k << " " << param_name(p);
    }
  }
}

TEST(Rolling, GapWindowsAreSkipped) {
  auto r = make_record(300, 30.0, 7);
  r.z.values[150] = {std::nan(""), 0.0};
  auto o = options(100, 50);
  o.variant = Variant::kMaternOnly3;
  const auto rf = rolling_fit(r.z, r.lat, o);
  ASSERT_EQ(rf.windows.size(), 5u);
  for (const auto& w : rf.windows) {
    const bool covers = w.start <= 150 && 150 < w.start + 100;
    EXPECT_EQ(w.fit.has_value(), !covers);
    if (covers) EXPECT_FALSE(w.skipped.empty());
  }
  const auto s = tv_spectrogram(rf);
  EXPECT_TRUE(std::isnan(s.at(0, 2)));
  EXPECT_TRUE(std::isfinite(s.at(0, 0)));
}

TEST(Spectrogram, SingleWindowIsTheFittedSpectrum) {
  const auto r = make_record(300, 30.0, 8);
  auto o = options(300, 1);
  o.variant = Variant::kMaternOnly3;
  const auto rf = rolling_fit(r.z, r.lat, o);
  const auto s = tv_spectrogram(rf);
  ASSERT_EQ(s.num_windows(), 1u);
  ASSERT_EQ(s.freqs.size(), 299u);
  for (std::size_t f = 0; f < s.freqs.size(); ++f) {
    EXPECT_NEAR(s.at(f, 0), 10.0 * std::log10(model_spectrum(rf.windows[0].fit->params, s.freqs[f])),
                1e-12);
  }
  const auto d = windowed_periodogram(r.z, 300, 1);
  const auto pg = periodogram(r.z);
  for (std::size_t f = 0; f < pg.size(); ++f) {
    EXPECT_NEAR(d.at(f, 0), 10.0 * std::log10(pg.values[f]), 1e-9);
  }
}

TEST(LrtTrace, IdenticalVariantsGiveZero) {
  const auto r = make_record(500, 30.0, 9);
  const auto tr = lrt_trace(r.z, r.lat, Variant::kFixedFreq5, Variant::kFixedFreq5, options(400, 50));
  EXPECT_EQ(tr.df, 0);
  for (const auto& w : tr.windows) {
    ASSERT_TRUE(w.fits.has_value());
    EXPECT_EQ(w.fits->lrt.statistic, 0.0);
  }
  EXPECT_EQ(tr.exceedance_fraction(), 0.0);
}

TEST(LrtTrace, NestedPairUsesSharedMaskAndThreshold) {
  const auto r = make_record(500, 30.0, 10);
  const auto tr = lrt_trace(r.z, r.lat, Variant::kFixedFreq5, Variant::kFull6, options(400, 50));
  EXPECT_EQ(tr.df, 1);
  EXPECT_NEAR(tr.threshold95, 3.841458820694124, 1e-12);
  for (const auto& w : tr.windows) {
    ASSERT_TRUE(w.fits.has_value());
    EXPECT_EQ(w.fits->null_fit.mask, w.fits->alt_fit.mask);
    EXPECT_GE(w.fits->lrt.statistic, 0.0);
  }
  EXPECT_THROW(lrt_trace(r.z, r.lat, Variant::kFull6, Variant::kFixedFreq5, options(400, 50)),
               std::invalid_argument);
  std::ostringstream os;
  write_lrt_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# null=fixedfreq5 alt=full6 df=1", 0), 0u);
  std::getline(is, line);
  EXPECT_EQ(line.rfind("center_index,center_time,f0_rad_per_s,R,p_value,threshold95,exceeds", 0), 0u);
}

TEST(RollingCsv, OneRowPerWindow) {
  const auto r = make_record(300, 30.0, 11);
  auto o = options(200, 50);
  o.variant = Variant::kMaternOnly3;
  const auto rf = rolling_fit(r.z, r.lat, o);
  std::ostringstream os;
  write_rolling_csv(os, rf);
  std::istringstream is(os.str());
  std::string header, line;
  std::getline(is, header);
  EXPECT_EQ(header,
            "center_index,center_time,f0_rad_per_s,A,A_ci_halfwidth,B,B_ci_halfwidth,omega0,"
            "omega0_ci_halfwidth,c,c_ci_halfwidth,h,h_ci_halfwidth,alpha,alpha_ci_halfwidth,"
            "loglik,R,converged,status");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 18);
  }
  EXPECT_EQ(rows, rf.windows.size());
}

}  // namespace
