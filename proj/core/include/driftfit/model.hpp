#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace driftfit {

using cplx = std::complex<double>;

/// Which components and free parameters a model carries.
enum class Variant {
  kFull6,          // OU + Matern, all six parameters free
  kFixedFreq5,     // omega0 pinned to the Coriolis frequency
  kFbmBackground5, // OU + pure power-law background (h = 0)
  kMaternOnly3,    // background only
  kOuOnly3,        // inertial oscillation only
};

std::string_view to_string(Variant v);
/// Accepts canonical names ("full6", "fixedfreq5", ...) and short aliases
/// ("full", "fixed", "fbm", "matern", "ou").
Variant parse_variant(std::string_view name);

/// Parameter identifiers in canonical order (A, B, omega0, c, h, alpha).
enum class Param : int { kA = 0, kB, kOmega0, kC, kH, kAlpha };
constexpr int kNumParams = 6;
std::string_view param_name(Param p);

bool has_ou(Variant v);
bool has_background(Variant v);
/// True when p belongs to a component the variant carries (free or pinned).
bool uses_param(Variant v, Param p);
/// Free parameters of a variant, canonical order.
std::vector<Param> free_params(Variant v);
/// True when every free parameter of `inner` is also free in `outer`.
bool is_nested(Variant inner, Variant outer);

/// The aggregated inertial-oscillation + turbulent-background model.
///
/// Units follow the sampling interval in force: omega0, c and h are per
/// time unit, A has units velocity * time^(-1/2), B velocity *
/// time^(alpha - 1/2). Parameters of components the variant drops are
/// ignored (conventionally zero).
struct ModelParams {
  double A = 0.0;
  double B = 0.0;
  double omega0 = 0.0;
  double c = 0.0;
  double h = 0.0;
  double alpha = 1.0;
  Variant variant = Variant::kFull6;

  double get(Param p) const;
  void set(Param p, double value);

  /// Throws std::domain_error when the invariants for `variant` fail.
  /// When `dt` is given, also checks |omega0| <= pi / dt.
  void validate(std::optional<double> dt = std::nullopt) const;

  /// Same values expressed with time measured in units of `dt`
  /// (so the sampling interval becomes 1), and the inverse map.
  ModelParams to_sample_units(double dt) const;
  ModelParams from_sample_units(double dt) const;
};

// Inertial oscillation (complex OU) component.
cplx ou_acvs(const ModelParams& p, double tau);
double ou_spectrum(const ModelParams& p, double omega);

// Matern background component; real-valued autocovariance.
double matern_acvs(const ModelParams& p, double tau);
double matern_spectrum(const ModelParams& p, double omega);

/// Intrinsic covariance of the h = 0 power-law background:
/// -E|X(t+tau) - X(t)|^2 / 2. Defined up to an additive constant, which
/// cancels at every nonzero Fourier frequency. Requires 1/2 < alpha < 3/2.
double fbm_generalized_acvs(const ModelParams& p, double tau);

/// Sum of the components present in p.variant.
double model_spectrum(const ModelParams& p, double omega);
cplx model_acvs(const ModelParams& p, double tau);

/// Autocovariance sampled at lags 0, dt, ..., (n-1) dt. Negative lags follow
/// from Hermitian symmetry s(-k) = conj(s(k)).
struct Acvs {
  std::vector<cplx> values;
  double dt = 1.0;

  std::size_t size() const { return values.size(); }
  cplx at(long lag) const;
};

Acvs model_acvs_sequence(const ModelParams& p, std::size_t n, double dt);

}  // namespace driftfit
