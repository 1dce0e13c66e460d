#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftfit/model.hpp"
#include "driftfit/series.hpp"

namespace driftfit {

/// Spectral density estimates on the nonzero Fourier frequencies, ordered
/// from most negative to most positive. For even n the Nyquist frequency
/// appears once, at -pi/dt; there are always n - 1 entries.
struct Periodogram {
  std::vector<double> freqs;   // rad per unit of dt
  std::vector<double> values;  // same units as the spectral density
  std::size_t n = 0;
  double dt = 1.0;

  std::size_t size() const { return freqs.size(); }
  double spacing() const;
};

std::vector<double> fourier_frequencies(std::size_t n, double dt);

/// Signed DFT bin of the i-th entry of the Fourier grid for length n,
/// e.g. -n/2 .. -1, 1 .. n/2 - 1 for even n.
long fourier_bin(std::size_t i, std::size_t n);

/// Mean-removed periodogram (dt / n) |sum_t (Z_t - mean) e^{-i w t dt}|^2.
Periodogram periodogram(const ComplexSeries& z);

/// Expected periodogram dt * sum_tau (1 - |tau|/n) s_tau e^{-i w tau dt}
/// of a model on the Fourier grid of (n, dt). Aliasing is included because
/// the autocovariance is only sampled at multiples of dt.
Periodogram expected_periodogram(const ModelParams& p, std::size_t n, double dt);

/// Same from a precomputed autocovariance sequence (acvs.dt used as dt).
/// Returns values in Fourier-grid order; `max_imag_ratio`, when given,
/// receives the largest |Im|/|Re| discarded.
std::vector<double> expected_periodogram_values(const Acvs& acvs, std::size_t n,
                                                double* max_imag_ratio = nullptr);

/// The model spectrum sampled on the Fourier grid of a periodogram.
std::vector<double> model_spectrum_on(const ModelParams& p, const std::vector<double>& freqs);

enum class Side { kNegative, kPositive, kBoth };

std::string_view to_string(Side s);

/// The set of fitted frequencies.
struct FrequencyMask {
  Side side = Side::kBoth;
  std::optional<double> cutoff;                      // max |omega|, rad per unit of dt
  std::vector<std::pair<double, double>> excludes;   // closed intervals removed

  bool contains(double omega) const;
  /// Indices into pg.freqs that lie in the mask. Throws std::invalid_argument
  /// if the result is empty or the cutoff is below the first Fourier frequency.
  std::vector<std::size_t> select(const Periodogram& pg) const;
  std::string describe() const;

  bool operator==(const FrequencyMask&) const = default;
};

/// A recipe for building masks from the local Coriolis frequency.
struct MaskRule {
  enum class SideRule { kNegative, kPositive, kBoth, kAuto };
  enum class CutoffKind { kNone, kMultipleOfF0, kAbsolute };

  SideRule side = SideRule::kAuto;
  CutoffKind cutoff_kind = CutoffKind::kMultipleOfF0;
  double cutoff_value = 1.75;
  std::vector<std::pair<double, double>> excludes;

  /// kAuto picks the side the inertial peak sits on: negative for f0 < 0
  /// (northern hemisphere), positive for f0 > 0, both at the equator.
  FrequencyMask resolve(double f0) const;

  static SideRule parse_side(std::string_view s);
  /// "1.75" or "1.75f" -> multiple of |f0|; "2e-4rad/s" or "2e-4rad" ->
  /// absolute; "none" -> no cutoff.
  static std::pair<CutoffKind, double> parse_cutoff(std::string_view s);
};

}  // namespace driftfit
