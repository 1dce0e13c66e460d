#include "driftfit/rolling.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "driftfit/ingest.hpp"
#include "driftfit/parallel.hpp"
#include "driftfit/series_io.hpp"

namespace driftfit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct WindowSetup {
  std::size_t start = 0;
  std::size_t center = 0;
  double center_time = 0.0;
  double f0 = 0.0;
  FrequencyMask mask;
  std::string skipped;
};

void check_inputs(const ComplexSeries& z, const std::vector<double>& lat,
                  const RollingOptions& opts) {
  if (!(z.dt > 0.0)) throw std::invalid_argument("rolling: dt must be positive");
  if (lat.size() != z.size()) {
    throw std::invalid_argument("rolling: need one latitude per sample");
  }
  if (opts.window < 4 || opts.window % 2 != 0) {
    throw std::invalid_argument("rolling: window length must be even and at least 4");
  }
  if (opts.window > z.size()) {
    throw std::invalid_argument("rolling: window length " + std::to_string(opts.window) +
                                " exceeds series length " + std::to_string(z.size()));
  }
  if (opts.stride < 1) throw std::invalid_argument("rolling: stride must be at least 1");
}

std::vector<WindowSetup> setup_windows(const ComplexSeries& z, const std::vector<double>& lat,
                                       const RollingOptions& opts) {
  std::vector<WindowSetup> out;
  for (const std::size_t s : window_starts(z.size(), opts.window, opts.stride)) {
    WindowSetup w;
    w.start = s;
    w.center = s + opts.window / 2 - 1;
    w.center_time = z.time_at(w.center);
    double lat_sum = 0.0;
    std::size_t lat_n = 0;
    bool gap = false;
    for (std::size_t i = s; i < s + opts.window; ++i) {
      if (!std::isfinite(z.values[i].real()) || !std::isfinite(z.values[i].imag())) gap = true;
      if (std::isfinite(lat[i])) {
        lat_sum += lat[i];
        ++lat_n;
      }
    }
    if (gap) {
      w.skipped = "window overlaps a data gap";
    } else if (lat_n == 0) {
      w.skipped = "no latitude in window";
    } else {
      try {
        w.f0 = coriolis_frequency(lat_sum / static_cast<double>(lat_n));
        w.mask = opts.mask_rule.resolve(w.f0);
      } catch (const std::exception& e) {
        w.skipped = e.what();
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

Periodogram window_periodogram(const ComplexSeries& z, std::size_t start, std::size_t len) {
  return periodogram(z.slice(start, len));
}

std::string fmt_opt(double v) { return std::isfinite(v) ? fmt_double(v) : ""; }

}  // namespace

std::vector<std::size_t> RollingFit::centers() const {
  std::vector<std::size_t> c;
  c.reserve(windows.size());
  for (const auto& w : windows) c.push_back(w.center);
  return c;
}

std::vector<std::size_t> window_starts(std::size_t n, std::size_t window, std::size_t stride) {
  std::vector<std::size_t> out;
  if (window == 0 || stride == 0 || window > n) return out;
  for (std::size_t s = 0; s + window <= n; s += stride) out.push_back(s);
  return out;
}

RollingFit rolling_fit(const ComplexSeries& z, const std::vector<double>& lat,
                       const RollingOptions& opts) {
  check_inputs(z, lat, opts);
  const auto setups = setup_windows(z, lat, opts);
  RollingFit rf;
  rf.window_len = opts.window;
  rf.stride = opts.stride;
  rf.dt = z.dt;
  rf.windows.resize(setups.size());

  const auto run = [&](std::size_t k, const std::optional<ModelParams>& init) {
    const WindowSetup& s = setups[k];
    WindowFit& w = rf.windows[k];
    w.start = s.start;
    w.center = s.center;
    w.center_time = s.center_time;
    w.f0 = s.f0;
    w.mask = s.mask;
    w.skipped = s.skipped;
    if (!w.skipped.empty()) return;
    try {
      w.fit = fit(window_periodogram(z, s.start, opts.window), opts.variant, s.mask, s.f0, init,
                  opts.fit);
    } catch (const std::exception& e) {
      w.skipped = std::string("fit failed: ") + e.what();
    }
  };

  if (opts.warm_start) {
    std::optional<ModelParams> prev;
    for (std::size_t k = 0; k < setups.size(); ++k) {
      run(k, prev);
      if (rf.windows[k].fit) prev = rf.windows[k].fit->params;
    }
  } else {
    parallel_for(setups.size(), opts.jobs, [&](std::size_t k) { run(k, std::nullopt); });
  }
  return rf;
}

double LrtTrace::exceedance_fraction() const {
  std::size_t fitted = 0, over = 0;
  for (const auto& w : windows) {
    if (!w.fits) continue;
    ++fitted;
    if (df > 0 && w.fits->lrt.statistic > threshold95) ++over;
  }
  return fitted == 0 ? kNaN : static_cast<double>(over) / static_cast<double>(fitted);
}

LrtTrace lrt_trace(const ComplexSeries& z, const std::vector<double>& lat, Variant null_variant,
                   Variant alt_variant, const RollingOptions& opts) {
  check_inputs(z, lat, opts);
  if (!is_nested(null_variant, alt_variant)) {
    throw std::invalid_argument("lrt_trace: " + std::string(to_string(null_variant)) +
                                " is not nested in " + std::string(to_string(alt_variant)));
  }
  const auto setups = setup_windows(z, lat, opts);
  LrtTrace tr;
  tr.null_variant = null_variant;
  tr.alt_variant = alt_variant;
  tr.df = static_cast<int>(free_params(alt_variant).size() - free_params(null_variant).size());
  tr.threshold95 = chi_square_threshold95(tr.df);
  tr.windows.resize(setups.size());
  parallel_for(setups.size(), opts.warm_start ? 1 : opts.jobs, [&](std::size_t k) {
    const WindowSetup& s = setups[k];
    WindowLrt& w = tr.windows[k];
    w.center = s.center;
    w.center_time = s.center_time;
    w.f0 = s.f0;
    w.skipped = s.skipped;
    if (!w.skipped.empty()) return;
    try {
      w.fits = fit_nested(window_periodogram(z, s.start, opts.window), null_variant, alt_variant,
                          s.mask, s.f0, opts.fit);
    } catch (const std::exception& e) {
      w.skipped = std::string("fit failed: ") + e.what();
    }
  });
  return tr;
}

Spectrogram tv_spectrogram(const RollingFit& rf) {
  Spectrogram s;
  s.freqs = fourier_frequencies(rf.window_len, rf.dt);
  const std::size_t nw = rf.windows.size();
  for (const auto& w : rf.windows) s.center_times.push_back(w.center_time);
  s.values_db.assign(s.freqs.size() * nw, kNaN);
  for (std::size_t k = 0; k < nw; ++k) {
    const auto& w = rf.windows[k];
    if (!w.fit) continue;
    for (std::size_t f = 0; f < s.freqs.size(); ++f) {
      s.values_db[f * nw + k] = 10.0 * std::log10(model_spectrum(w.fit->params, s.freqs[f]));
    }
  }
  return s;
}

Spectrogram windowed_periodogram(const ComplexSeries& z, std::size_t window, std::size_t stride) {
  if (window < 2 || window > z.size()) {
    throw std::invalid_argument("windowed_periodogram: window must lie in [2, n]");
  }
  if (stride < 1) throw std::invalid_argument("windowed_periodogram: stride must be at least 1");
  Spectrogram s;
  s.freqs = fourier_frequencies(window, z.dt);
  const auto starts = window_starts(z.size(), window, stride);
  const std::size_t nw = starts.size();
  s.values_db.assign(s.freqs.size() * nw, kNaN);
  for (std::size_t k = 0; k < nw; ++k) {
    s.center_times.push_back(z.time_at(starts[k] + window / 2 - 1));
    const ComplexSeries piece = z.slice(starts[k], window);
    bool gap = false;
    for (const auto& v : piece.values) gap = gap || !std::isfinite(v.real()) || !std::isfinite(v.imag());
    if (gap) continue;
    const Periodogram pg = periodogram(piece);
    for (std::size_t f = 0; f < pg.size(); ++f) {
      s.values_db[f * nw + k] = 10.0 * std::log10(pg.values[f]);
    }
  }
  return s;
}

void write_rolling_csv(std::ostream& out, const RollingFit& rf,
                       const std::vector<double>* lrt_statistic) {
  out << "center_index,center_time,f0_rad_per_s";
  for (int i = 0; i < kNumParams; ++i) {
    const std::string name(param_name(static_cast<Param>(i)));
    out << ',' << name << ',' << name << "_ci_halfwidth";
  }
  out << ",loglik,R,converged,status\n";
  for (std::size_t k = 0; k < rf.windows.size(); ++k) {
    const auto& w = rf.windows[k];
    out << w.center << ',' << fmt_double(w.center_time) << ',' << fmt_double(w.f0);
    for (int i = 0; i < kNumParams; ++i) {
      const auto p = static_cast<Param>(i);
      if (w.fit) {
        const double v = uses_param(w.fit->params.variant, p) ? w.fit->params.get(p) : kNaN;
        const double half = 1.959963984540054 * w.fit->std_error_of(p);
        out << ',' << fmt_opt(v) << ',' << fmt_opt(half);
      } else {
        out << ",,";
      }
    }
    out << ',' << (w.fit ? fmt_opt(w.fit->loglik) : "") << ',';
    if (lrt_statistic && k < lrt_statistic->size()) out << fmt_opt((*lrt_statistic)[k]);
    out << ',' << (w.fit ? (w.fit->converged ? "true" : "false") : "") << ',';
    if (!w.fit) {
      out << "skipped: " << w.skipped;
    } else if (!w.fit->warnings.empty()) {
      out << "warning: " << w.fit->warnings.front();
    } else {
      out << "ok";
    }
    out << '\n';
  }
}

void write_lrt_csv(std::ostream& out, const LrtTrace& trace) {
  out << "# null=" << to_string(trace.null_variant) << " alt=" << to_string(trace.alt_variant)
      << " df=" << trace.df << " threshold95=" << fmt_double(trace.threshold95) << '\n';
  out << "center_index,center_time,f0_rad_per_s,R,p_value,threshold95,exceeds,null_loglik,"
         "alt_loglik,converged,status\n";
  for (const auto& w : trace.windows) {
    out << w.center << ',' << fmt_double(w.center_time) << ',' << fmt_double(w.f0) << ',';
    if (w.fits) {
      const auto& f = *w.fits;
      const bool conv = f.null_fit.converged && f.alt_fit.converged;
      out << fmt_double(f.lrt.statistic) << ',' << fmt_double(f.lrt.p_value) << ','
          << fmt_double(trace.threshold95) << ','
          << (trace.df > 0 && f.lrt.statistic > trace.threshold95 ? "true" : "false") << ','
          << fmt_double(f.null_fit.loglik) << ',' << fmt_double(f.alt_fit.loglik) << ','
          << (conv ? "true" : "false") << ',';
      if (!f.lrt.warnings.empty()) {
        out << "warning: " << f.lrt.warnings.front();
      } else if (!conv) {
        out << "warning: a fit did not converge";
      } else {
        out << "ok";
      }
    } else {
      out << ",," << fmt_double(trace.threshold95) << ",,,,,skipped: " << w.skipped;
    }
    out << '\n';
  }
}

void write_spectrogram_csv(std::ostream& out, const Spectrogram& s) {
  out << "freq_rad_per_s,freq_cpd";
  for (const double t : s.center_times) out << ",t=" << fmt_double(t);
  out << '\n';
  const std::size_t nw = s.num_windows();
  for (std::size_t f = 0; f < s.freqs.size(); ++f) {
    out << fmt_double(s.freqs[f]) << ',' << fmt_double(rad_per_s_to_cpd(s.freqs[f]));
    for (std::size_t w = 0; w < nw; ++w) out << ',' << fmt_opt(s.values_db[f * nw + w]);
    out << '\n';
  }
}

}  // namespace driftfit
