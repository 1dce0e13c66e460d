#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "driftfit/inference.hpp"
#include "driftfit/series.hpp"
#include "driftfit/spectral.hpp"

namespace driftfit {

struct RollingOptions {
  std::size_t window = 1000;  // W, even
  std::size_t stride = 25;
  Variant variant = Variant::kFull6;
  MaskRule mask_rule;
  FitOptions fit;
  bool warm_start = false;  // sequential, each window starts from the previous estimate
  unsigned jobs = 0;        // 0 = all cores; ignored with warm_start
};

/// One window Z[start .. start + W - 1], centred at start + W/2 - 1.
struct WindowFit {
  std::size_t start = 0;
  std::size_t center = 0;
  double center_time = 0.0;  // seconds (since the epoch when the series has t0)
  double f0 = 0.0;           // Coriolis frequency of the mean latitude, rad/s
  FrequencyMask mask;
  std::optional<FitResult> fit;
  std::string skipped;  // reason when fit is empty
};

struct RollingFit {
  std::vector<WindowFit> windows;
  std::size_t window_len = 0;
  std::size_t stride = 0;
  double dt = 1.0;

  std::vector<std::size_t> centers() const;
};

/// Start indices of all complete windows.
std::vector<std::size_t> window_starts(std::size_t n, std::size_t window, std::size_t stride);

/// Sliding-window fits. `lat` holds one latitude per sample. Windows that
/// contain non-finite samples are skipped with a reason; a failed fit is
/// recorded per window and never aborts the run.
RollingFit rolling_fit(const ComplexSeries& z, const std::vector<double>& lat,
                       const RollingOptions& opts);

struct WindowLrt {
  std::size_t center = 0;
  double center_time = 0.0;
  double f0 = 0.0;
  std::optional<NestedFits> fits;
  std::string skipped;
};

struct LrtTrace {
  std::vector<WindowLrt> windows;
  Variant null_variant = Variant::kFixedFreq5;
  Variant alt_variant = Variant::kFull6;
  int df = 0;
  double threshold95 = 0.0;

  /// Fraction of fitted windows with R above the 95% threshold.
  double exceedance_fraction() const;
};

/// Per-window likelihood-ratio statistics; both fits in a window share the
/// same mask. opts.variant is ignored.
LrtTrace lrt_trace(const ComplexSeries& z, const std::vector<double>& lat, Variant null_variant,
                   Variant alt_variant, const RollingOptions& opts);

/// Time-frequency surface in decibels; values[f * num_windows + w].
/// Skipped windows are NaN columns.
struct Spectrogram {
  std::vector<double> freqs;         // rad/s, Fourier grid of the window
  std::vector<double> center_times;  // seconds
  std::vector<double> values_db;

  std::size_t num_windows() const { return center_times.size(); }
  double at(std::size_t f, std::size_t w) const { return values_db[f * num_windows() + w]; }
};

/// Fitted model spectrum of each window on the window's Fourier frequencies.
Spectrogram tv_spectrogram(const RollingFit& rf);

/// Periodogram of each complete window, the data analogue of tv_spectrogram.
Spectrogram windowed_periodogram(const ComplexSeries& z, std::size_t window, std::size_t stride);

/// One row per window: centre, f0, estimates and CI half-widths, loglik,
/// optional R, converged and status.
void write_rolling_csv(std::ostream& out, const RollingFit& rf,
                       const std::vector<double>* lrt_statistic = nullptr);
void write_lrt_csv(std::ostream& out, const LrtTrace& trace);
/// Rows are frequencies, columns window centres.
void write_spectrogram_csv(std::ostream& out, const Spectrogram& s);

}  // namespace driftfit
