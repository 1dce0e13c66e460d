#include "driftfit/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "driftfit/fft.hpp"

namespace driftfit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t bin_to_fft_index(long bin, std::size_t m) {
  const long mm = static_cast<long>(m);
  return static_cast<std::size_t>(((bin % mm) + mm) % mm);
}

}  // namespace

double Periodogram::spacing() const { return kTwoPi / (static_cast<double>(n) * dt); }

long fourier_bin(std::size_t i, std::size_t n) {
  const long neg = static_cast<long>(n / 2);  // number of negative bins
  const long ii = static_cast<long>(i);
  return ii < neg ? ii - neg : ii - neg + 1;
}

std::vector<double> fourier_frequencies(std::size_t n, double dt) {
  if (n < 2) throw std::invalid_argument("fourier_frequencies: n must be at least 2");
  if (!(dt > 0.0)) throw std::invalid_argument("fourier_frequencies: dt must be positive");
  const double df = kTwoPi / (static_cast<double>(n) * dt);
  std::vector<double> freqs(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    freqs[i] = static_cast<double>(fourier_bin(i, n)) * df;
  }
  return freqs;
}

Periodogram periodogram(const ComplexSeries& z) {
  z.validate();
  const std::size_t n = z.size();
  std::complex<double> mean{0.0, 0.0};
  for (const auto& v : z.values) mean += v;
  mean /= static_cast<double>(n);

  std::vector<std::complex<double>> buf(n);
  std::transform(z.values.begin(), z.values.end(), buf.begin(),
                 [&](const std::complex<double>& v) { return v - mean; });
  fft::forward_inplace(buf);

  Periodogram pg;
  pg.n = n;
  pg.dt = z.dt;
  pg.freqs = fourier_frequencies(n, z.dt);
  pg.values.resize(n - 1);
  const double scale = z.dt / static_cast<double>(n);
  // A real series has a mirror-symmetric periodogram; averaging the two
  // mirrored bins removes the FFT's rounding asymmetry.
  const bool real = std::all_of(z.values.begin(), z.values.end(),
                                [](const std::complex<double>& v) { return v.imag() == 0.0; });
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const long k = fourier_bin(i, n);
    const double p = std::norm(buf[bin_to_fft_index(k, n)]);
    pg.values[i] = real ? scale * 0.5 * (p + std::norm(buf[bin_to_fft_index(-k, n)])) : scale * p;
  }
  return pg;
}

std::vector<double> expected_periodogram_values(const Acvs& acvs, std::size_t n,
                                                double* max_imag_ratio) {
  if (n < 2) throw std::invalid_argument("expected_periodogram: n must be at least 2");
  const std::size_t m = 2 * n;
  const double nn = static_cast<double>(n);
  std::vector<std::complex<double>> buf(m, {0.0, 0.0});
  const std::size_t lags = std::min(acvs.size(), n);
  for (std::size_t k = 0; k < lags; ++k) {
    const std::complex<double> w = (1.0 - static_cast<double>(k) / nn) * acvs.values[k];
    buf[k] += w;
    if (k > 0) buf[m - k] += std::conj(w);
  }
  fft::forward_inplace(buf);

  std::vector<double> out(n - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Fourier frequency bin j of length n is bin 2j of length 2n.
    const auto& v = buf[bin_to_fft_index(2 * fourier_bin(i, n), m)];
    out[i] = acvs.dt * v.real();
    if (v.real() != 0.0) worst = std::max(worst, std::abs(v.imag() / v.real()));
  }
  if (max_imag_ratio) *max_imag_ratio = worst;
  return out;
}

Periodogram expected_periodogram(const ModelParams& p, std::size_t n, double dt) {
  Periodogram pg;
  pg.n = n;
  pg.dt = dt;
  pg.freqs = fourier_frequencies(n, dt);
  pg.values = expected_periodogram_values(model_acvs_sequence(p, n, dt), n);
  return pg;
}

std::vector<double> model_spectrum_on(const ModelParams& p, const std::vector<double>& freqs) {
  std::vector<double> out(freqs.size());
  std::transform(freqs.begin(), freqs.end(), out.begin(),
                 [&](double w) { return model_spectrum(p, w); });
  return out;
}

std::string_view to_string(Side s) {
  switch (s) {
    case Side::kNegative: return "negative";
    case Side::kPositive: return "positive";
    case Side::kBoth: return "both";
  }
  return "?";
}

bool FrequencyMask::contains(double omega) const {
  if (omega == 0.0) return false;
  if (side == Side::kNegative && omega > 0.0) return false;
  if (side == Side::kPositive && omega < 0.0) return false;
  if (cutoff && std::abs(omega) > *cutoff) return false;
  return std::none_of(excludes.begin(), excludes.end(), [&](const auto& iv) {
    return omega >= iv.first && omega <= iv.second;
  });
}

std::vector<std::size_t> FrequencyMask::select(const Periodogram& pg) const {
  if (cutoff) {
    // Small slack so a cutoff landing exactly on a grid point is honoured.
    if (*cutoff < pg.spacing() * (1.0 - 1e-9)) {
      throw std::invalid_argument("frequency mask: cutoff below the first Fourier frequency");
    }
  }
  std::vector<std::size_t> idx;
  idx.reserve(pg.size());
  const FrequencyMask slack = [&] {
    FrequencyMask m = *this;
    if (m.cutoff) m.cutoff = *m.cutoff * (1.0 + 1e-12);
    return m;
  }();
  for (std::size_t i = 0; i < pg.size(); ++i) {
    if (slack.contains(pg.freqs[i])) idx.push_back(i);
  }
  if (idx.empty()) throw std::invalid_argument("frequency mask: no Fourier frequencies selected");
  return idx;
}

std::string FrequencyMask::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "side=" << to_string(side);
  if (cutoff) {
    os << ";cutoff=" << *cutoff;
  } else {
    os << ";cutoff=none";
  }
  for (const auto& [lo, hi] : excludes) os << ";exclude=[" << lo << "," << hi << "]";
  return os.str();
}

FrequencyMask MaskRule::resolve(double f0) const {
  FrequencyMask m;
  switch (side) {
    case SideRule::kNegative: m.side = Side::kNegative; break;
    case SideRule::kPositive: m.side = Side::kPositive; break;
    case SideRule::kBoth: m.side = Side::kBoth; break;
    case SideRule::kAuto:
      m.side = f0 < 0.0 ? Side::kNegative : (f0 > 0.0 ? Side::kPositive : Side::kBoth);
      break;
  }
  switch (cutoff_kind) {
    case CutoffKind::kNone: break;
    case CutoffKind::kMultipleOfF0:
      if (f0 == 0.0) {
        throw std::invalid_argument("mask rule: cutoff relative to f0 is undefined at the equator");
      }
      m.cutoff = cutoff_value * std::abs(f0);
      break;
    case CutoffKind::kAbsolute: m.cutoff = cutoff_value; break;
  }
  m.excludes = excludes;
  return m;
}

MaskRule::SideRule MaskRule::parse_side(std::string_view s) {
  if (s == "neg" || s == "negative") return SideRule::kNegative;
  if (s == "pos" || s == "positive") return SideRule::kPositive;
  if (s == "both") return SideRule::kBoth;
  if (s == "auto") return SideRule::kAuto;
  throw std::invalid_argument("unknown side '" + std::string(s) + "' (neg|pos|both|auto)");
}

std::pair<MaskRule::CutoffKind, double> MaskRule::parse_cutoff(std::string_view s) {
  if (s == "none") return {CutoffKind::kNone, 0.0};
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || !(v > 0.0)) {
    throw std::invalid_argument("cutoff must be a positive number: '" + std::string(s) + "'");
  }
  const std::string_view suffix(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr));
  if (suffix.empty() || suffix == "f" || suffix == "f0") return {CutoffKind::kMultipleOfF0, v};
  if (suffix == "rad" || suffix == "rad/s") return {CutoffKind::kAbsolute, v};
  throw std::invalid_argument("unknown cutoff unit '" + std::string(suffix) + "'");
}

}  // namespace driftfit
