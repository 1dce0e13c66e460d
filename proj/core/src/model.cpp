#include "driftfit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "driftfit/bessel.hpp"

namespace driftfit {

namespace {

constexpr double kPi = std::numbers::pi;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

void require(bool cond, const char* what) {
  if (!cond) throw std::domain_error(what);
}

// log of the Matern autocovariance prefactor B^2 / (2^nu sqrt(pi) G(alpha) h^(2 nu)).
double matern_log_prefactor(const ModelParams& p) {
  const double nu = p.alpha - 0.5;
  return 2.0 * std::log(p.B) - nu * std::log(2.0) - 0.5 * std::log(kPi) -
         std::lgamma(p.alpha) - 2.0 * nu * std::log(p.h);
}

double fbm_structure_coeff(const ModelParams& p) {
  const double hurst = p.alpha - 0.5;
  return p.B * p.B / (std::tgamma(2.0 * p.alpha) * std::sin(kPi * hurst));
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kFull6: return "full6";
    case Variant::kFixedFreq5: return "fixedfreq5";
    case Variant::kFbmBackground5: return "fbm5";
    case Variant::kMaternOnly3: return "matern3";
    case Variant::kOuOnly3: return "ou3";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  const std::string s = lower(name);
  if (s == "full6" || s == "full") return Variant::kFull6;
  if (s == "fixedfreq5" || s == "fixed" || s == "fixedfreq") return Variant::kFixedFreq5;
  if (s == "fbm5" || s == "fbm" || s == "fbmbackground5") return Variant::kFbmBackground5;
  if (s == "matern3" || s == "matern" || s == "maternonly3") return Variant::kMaternOnly3;
  if (s == "ou3" || s == "ou" || s == "ouonly3") return Variant::kOuOnly3;
  throw std::invalid_argument("unknown model variant '" + std::string(name) + "'");
}

std::string_view param_name(Param p) {
  switch (p) {
    case Param::kA: return "A";
    case Param::kB: return "B";
    case Param::kOmega0: return "omega0";
    case Param::kC: return "c";
    case Param::kH: return "h";
    case Param::kAlpha: return "alpha";
  }
  return "?";
}

bool has_ou(Variant v) { return v != Variant::kMaternOnly3; }
bool has_background(Variant v) { return v != Variant::kOuOnly3; }

bool uses_param(Variant v, Param p) {
  const bool ou_part = p == Param::kA || p == Param::kOmega0 || p == Param::kC;
  return ou_part ? has_ou(v) : has_background(v);
}

std::vector<Param> free_params(Variant v) {
  switch (v) {
    case Variant::kFull6:
      return {Param::kA, Param::kB, Param::kOmega0, Param::kC, Param::kH, Param::kAlpha};
    case Variant::kFixedFreq5:
      return {Param::kA, Param::kB, Param::kC, Param::kH, Param::kAlpha};
    case Variant::kFbmBackground5:
      return {Param::kA, Param::kB, Param::kOmega0, Param::kC, Param::kAlpha};
    case Variant::kMaternOnly3:
      return {Param::kB, Param::kH, Param::kAlpha};
    case Variant::kOuOnly3:
      return {Param::kA, Param::kOmega0, Param::kC};
  }
  return {};
}

bool is_nested(Variant inner, Variant outer) {
  const auto in = free_params(inner);
  const auto out = free_params(outer);
  return std::all_of(in.begin(), in.end(), [&](Param p) {
    return std::find(out.begin(), out.end(), p) != out.end();
  });
}

double ModelParams::get(Param p) const {
  switch (p) {
    case Param::kA: return A;
    case Param::kB: return B;
    case Param::kOmega0: return omega0;
    case Param::kC: return c;
    case Param::kH: return h;
    case Param::kAlpha: return alpha;
  }
  return 0.0;
}

void ModelParams::set(Param p, double value) {
  switch (p) {
    case Param::kA: A = value; break;
    case Param::kB: B = value; break;
    case Param::kOmega0: omega0 = value; break;
    case Param::kC: c = value; break;
    case Param::kH: h = value; break;
    case Param::kAlpha: alpha = value; break;
  }
}

void ModelParams::validate(std::optional<double> dt) const {
  for (int i = 0; i < kNumParams; ++i) {
    require(std::isfinite(get(static_cast<Param>(i))), "model: parameters must be finite");
  }
  require(alpha > 0.5, "model: alpha must exceed 1/2");
  if (has_ou(variant)) {
    require(A > 0.0, "model: A must be positive");
    require(c > 0.0, "model: c must be positive");
    if (dt) {
      require(*dt > 0.0, "model: sampling interval must be positive");
      require(std::abs(omega0) <= kPi / *dt * (1.0 + 1e-12),
              "model: |omega0| must not exceed the Nyquist frequency");
    }
  }
  if (has_background(variant)) {
    require(B > 0.0, "model: B must be positive");
    if (variant == Variant::kFbmBackground5) {
      require(h == 0.0, "model: fbm background requires h == 0");
      require(alpha < 1.5, "model: fbm background requires alpha < 3/2");
    } else {
      require(h > 0.0, "model: h must be positive");
    }
  }
}

ModelParams ModelParams::to_sample_units(double dt) const {
  ModelParams q = *this;
  q.A = A * std::sqrt(dt);
  q.B = B * std::pow(dt, alpha - 0.5);
  q.omega0 = omega0 * dt;
  q.c = c * dt;
  q.h = h * dt;
  return q;
}

ModelParams ModelParams::from_sample_units(double dt) const {
  ModelParams q = *this;
  q.A = A / std::sqrt(dt);
  q.B = B / std::pow(dt, alpha - 0.5);
  q.omega0 = omega0 / dt;
  q.c = c / dt;
  q.h = h / dt;
  return q;
}

cplx ou_acvs(const ModelParams& p, double tau) {
  require(p.c > 0.0, "ou_acvs: c must be positive");
  require(p.A > 0.0, "ou_acvs: A must be positive");
  const double var = p.A * p.A / (2.0 * p.c);
  return var * std::exp(-p.c * std::abs(tau)) * std::polar(1.0, p.omega0 * tau);
}

double ou_spectrum(const ModelParams& p, double omega) {
  require(p.c > 0.0, "ou_spectrum: c must be positive");
  const double d = omega - p.omega0;
  return p.A * p.A / (d * d + p.c * p.c);
}

double matern_acvs(const ModelParams& p, double tau) {
  require(p.h > 0.0, "matern_acvs: h must be positive (use the fbm variant for h = 0)");
  require(p.alpha > 0.5, "matern_acvs: alpha must exceed 1/2");
  require(p.B > 0.0, "matern_acvs: B must be positive");
  const double nu = p.alpha - 0.5;
  return std::exp(matern_log_prefactor(p)) * bessel_k_xpow(nu, p.h * std::abs(tau));
}

double matern_spectrum(const ModelParams& p, double omega) {
  require(p.alpha > 0.5, "matern_spectrum: alpha must exceed 1/2");
  require(p.h >= 0.0, "matern_spectrum: h must be non-negative");
  if (p.h == 0.0) {
    require(p.variant == Variant::kFbmBackground5,
            "matern_spectrum: h == 0 is only valid for the fbm background");
    require(omega != 0.0, "matern_spectrum: power-law spectrum is singular at omega = 0");
  }
  return p.B * p.B / std::pow(omega * omega + p.h * p.h, p.alpha);
}

double fbm_generalized_acvs(const ModelParams& p, double tau) {
  require(p.alpha > 0.5 && p.alpha < 1.5, "fbm: alpha must lie in (1/2, 3/2)");
  return -0.5 * fbm_structure_coeff(p) * std::pow(std::abs(tau), 2.0 * p.alpha - 1.0);
}

double model_spectrum(const ModelParams& p, double omega) {
  double s = 0.0;
  if (has_ou(p.variant)) s += ou_spectrum(p, omega);
  if (has_background(p.variant)) s += matern_spectrum(p, omega);
  return s;
}

cplx model_acvs(const ModelParams& p, double tau) {
  cplx s{0.0, 0.0};
  if (has_ou(p.variant)) s += ou_acvs(p, tau);
  if (has_background(p.variant)) {
    s += p.variant == Variant::kFbmBackground5 ? fbm_generalized_acvs(p, tau)
                                               : matern_acvs(p, tau);
  }
  return s;
}

cplx Acvs::at(long lag) const {
  const auto k = static_cast<std::size_t>(lag < 0 ? -lag : lag);
  if (k >= values.size()) return {0.0, 0.0};
  return lag < 0 ? std::conj(values[k]) : values[k];
}

Acvs model_acvs_sequence(const ModelParams& p, std::size_t n, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("model_acvs_sequence: dt must be positive");
  Acvs out;
  out.dt = dt;
  out.values.assign(n, cplx{0.0, 0.0});
  if (n == 0) return out;

  if (has_ou(p.variant)) {
    require(p.c > 0.0 && p.A > 0.0, "model_acvs: OU component needs A > 0 and c > 0");
    const double var = p.A * p.A / (2.0 * p.c);
    for (std::size_t k = 0; k < n; ++k) {
      const double tau = static_cast<double>(k) * dt;
      const double mag = var * std::exp(-p.c * tau);
      if (mag < 1e-300) break;
      out.values[k] += mag * std::polar(1.0, p.omega0 * tau);
    }
  }

  if (has_background(p.variant)) {
    if (p.variant == Variant::kFbmBackground5) {
      require(p.B > 0.0, "model_acvs: B must be positive");
      for (std::size_t k = 0; k < n; ++k) {
        out.values[k] += fbm_generalized_acvs(p, static_cast<double>(k) * dt);
      }
    } else {
      require(p.h > 0.0 && p.B > 0.0 && p.alpha > 0.5,
              "model_acvs: Matern component needs B > 0, h > 0, alpha > 1/2");
      const double nu = p.alpha - 0.5;
      const double log_pref = matern_log_prefactor(p);
      const double pref = std::exp(log_pref);
      const double s0 = pref * bessel_k_xpow(nu, 0.0);
      out.values[0] += s0;
      // x^nu K_nu(x) is decreasing, so once a lag is negligible all later ones are.
      for (std::size_t k = 1; k < n; ++k) {
        const double v = pref * bessel_k_xpow(nu, p.h * static_cast<double>(k) * dt);
        if (v < s0 * 1e-20) break;
        out.values[k] += v;
      }
    }
  }
  return out;
}

}  // namespace driftfit
