#include "driftfit/inference.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "driftfit/optimize.hpp"

namespace driftfit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEulerGamma = 0.57721566490153286;

double softplus(double u) { return u > 30.0 ? u : std::log1p(std::exp(u)); }
double softplus_inv(double x) { return x > 30.0 ? x : x + std::log(-std::expm1(-x)); }
double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Maps between the free parameters (sample units) and the search space.
struct Codec {
  Variant variant;
  Transform transform;
  std::vector<Param> free;
  ModelParams pinned;  // supplies the values of parameters that are not free

  std::vector<double> encode(const ModelParams& p) const {
    std::vector<double> u;
    u.reserve(free.size());
    const bool soft = transform == Transform::kSoftplus;
    for (const Param k : free) {
      const double v = p.get(k);
      switch (k) {
        case Param::kOmega0:
          u.push_back(soft ? v / 2.0 : v);
          break;
        case Param::kAlpha:
          if (variant == Variant::kFbmBackground5) {
            const double q = std::clamp(v - 0.5, 1e-9, 1.0 - 1e-9);
            u.push_back(soft ? logit(q) / 2.0 : logit(q));
          } else {
            u.push_back(soft ? softplus_inv(v - 0.5) : std::log(v - 0.5));
          }
          break;
        default:
          u.push_back(soft ? softplus_inv(v) : std::log(v));
      }
    }
    return u;
  }

  ModelParams decode(const std::vector<double>& u) const {
    ModelParams p = pinned;
    p.variant = variant;
    const bool soft = transform == Transform::kSoftplus;
    for (std::size_t i = 0; i < free.size(); ++i) {
      const double x = u[i];
      switch (free[i]) {
        case Param::kOmega0:
          p.omega0 = std::clamp(soft ? 2.0 * x : x, -kPi, kPi);
          break;
        case Param::kAlpha:
          if (variant == Variant::kFbmBackground5) {
            p.alpha = 0.5 + logistic(soft ? 2.0 * x : x);
          } else {
            p.alpha = 0.5 + (soft ? softplus(x) : std::exp(x));
          }
          break;
        default:
          p.set(free[i], soft ? softplus(x) : std::exp(x));
      }
    }
    return p;
  }
};

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= b[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t kFnvBasis = 0xCBF29CE484222325ULL;

Periodogram to_sample_units(const Periodogram& pg) {
  Periodogram s = pg;
  for (auto& w : s.freqs) w *= pg.dt;
  for (auto& v : s.values) v /= pg.dt;
  s.dt = 1.0;
  return s;
}

FrequencyMask to_sample_units(const FrequencyMask& m, double dt) {
  FrequencyMask s = m;
  if (s.cutoff) *s.cutoff *= dt;
  for (auto& [a, b] : s.excludes) {
    a *= dt;
    b *= dt;
  }
  return s;
}

bool valid_for(const ModelParams& p, Param k) {
  const double v = p.get(k);
  if (!std::isfinite(v)) return false;
  switch (k) {
    case Param::kOmega0: return std::abs(v) <= kPi;
    case Param::kAlpha:
      return v > 0.5 && (p.variant != Variant::kFbmBackground5 || v < 1.5);
    default: return v > 0.0;
  }
}

void fill_derived(CovarianceReport& r, const std::vector<double>& theta, double z) {
  const std::size_t d = r.dim;
  r.std_errors.assign(d, kNaN);
  r.corr.assign(d * d, kNaN);
  r.ci.assign(d, {kNaN, kNaN});
  for (std::size_t i = 0; i < d; ++i) {
    const double v = r.cov[i * d + i];
    r.std_errors[i] = v >= 0.0 ? std::sqrt(v) : kNaN;
    r.ci[i] = {theta[i] - z * r.std_errors[i], theta[i] + z * r.std_errors[i]};
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double den = r.std_errors[i] * r.std_errors[j];
      r.corr[i * d + j] = den > 0.0 ? r.cov[i * d + j] / den : kNaN;
    }
  }
}

// Mean of the periodogram over a few bins around index i.
double local_level(const std::vector<double>& v, std::size_t i, std::size_t half) {
  const std::size_t lo = i >= half ? i - half : 0;
  const std::size_t hi = std::min(v.size(), i + half + 1);
  double s = 0.0;
  for (std::size_t k = lo; k < hi; ++k) s += v[k];
  return s / static_cast<double>(hi - lo);
}

}  // namespace

std::optional<std::size_t> FitResult::index_of(Param p) const {
  const auto it = std::find(free.begin(), free.end(), p);
  if (it == free.end()) return std::nullopt;
  return static_cast<std::size_t>(it - free.begin());
}

double FitResult::std_error_of(Param p) const {
  const auto i = index_of(p);
  if (!i || covariance.std_errors.empty()) return kNaN;
  return covariance.std_errors[*i];
}

std::pair<double, double> FitResult::ci_of(Param p) const {
  const auto i = index_of(p);
  if (!i || covariance.ci.empty()) return {kNaN, kNaN};
  return covariance.ci[*i];
}

double FitResult::corr_of(Param a, Param b) const {
  const auto i = index_of(a);
  const auto j = index_of(b);
  if (!i || !j || covariance.corr.empty()) return kNaN;
  return covariance.corr[*i * covariance.dim + *j];
}

std::uint64_t data_digest(const ComplexSeries& z) {
  std::uint64_t h = kFnvBasis;
  if (!z.values.empty()) h = fnv1a(h, z.values.data(), z.values.size() * sizeof(z.values[0]));
  return fnv1a(h, &z.dt, sizeof z.dt);
}

std::uint64_t data_digest(const Periodogram& pg) {
  std::uint64_t h = kFnvBasis;
  if (!pg.values.empty()) h = fnv1a(h, pg.values.data(), pg.values.size() * sizeof(double));
  h = fnv1a(h, &pg.dt, sizeof pg.dt);
  const std::uint64_t n = pg.n;
  return fnv1a(h, &n, sizeof n);
}

ModelParams initial_guess(const Periodogram& pg, double f0, Variant variant) {
  if (pg.size() == 0) throw std::invalid_argument("initial_guess: empty periodogram");
  const Periodogram s = to_sample_units(pg);
  const double f = f0 * pg.dt;
  const double dw = 2.0 * kPi / static_cast<double>(s.n);
  const std::size_t k = s.size();

  ModelParams g;
  g.variant = variant;
  g.c = 5.0 * dw;
  g.h = variant == Variant::kFbmBackground5 ? 0.0 : 10.0 * dw;
  g.omega0 = std::clamp(f, -kPi, kPi);
  g.alpha = 1.0;

  // Inertial search band [0.5 f0, 1.5 f0].
  const double band_lo = std::min(0.5 * f, 1.5 * f);
  const double band_hi = std::max(0.5 * f, 1.5 * f);
  const auto in_band = [&](double w) { return f != 0.0 && w >= band_lo && w <= band_hi; };

  if (has_background(variant)) {
    // Log-log regression over frequencies away from zero and from the band.
    const double floor_w = std::max(3.0 * std::max(g.h, dw), 2.0 * dw);
    std::vector<double> xs, ys;
    const auto collect = [&](double min_w, bool skip_band) {
      xs.clear();
      ys.clear();
      for (std::size_t i = 0; i < k; ++i) {
        const double w = s.freqs[i];
        if (std::abs(w) < min_w || s.values[i] <= 0.0) continue;
        if (skip_band && in_band(w)) continue;
        xs.push_back(std::log(std::abs(w)));
        ys.push_back(std::log(s.values[i]));
      }
    };
    collect(floor_w, has_ou(variant));
    if (xs.size() < 5) collect(0.5 * dw, false);
    double slope = -2.0;
    if (xs.size() >= 2) {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
      }
      if (sxx > 0.0) slope = sxy / sxx;
    }
    g.alpha = -slope / 2.0;
    if (variant == Variant::kFbmBackground5) {
      g.alpha = std::clamp(g.alpha, 0.55, 1.45);
    } else {
      g.alpha = std::clamp(g.alpha, 0.55, 4.0);
    }
    // log of an exponential variate averages -gamma.
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      acc += ys[i] + g.alpha * std::log(std::exp(2.0 * xs[i]) + g.h * g.h);
    }
    const double log_b2 = xs.empty() ? 0.0 : acc / static_cast<double>(xs.size()) + kEulerGamma;
    g.B = std::exp(0.5 * log_b2);
  }

  const auto background = [&](double w) {
    if (!has_background(variant)) return 0.0;
    return matern_spectrum(g, w == 0.0 ? dw : w);
  };
  const std::size_t half = std::max<std::size_t>(2, s.n / 200);

  if (has_ou(variant) && variant != Variant::kFixedFreq5) {
    // Largest smoothed excess over the background trend.
    double best = -1.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!in_band(s.freqs[i])) continue;
      const double bg = background(s.freqs[i]);
      const double level = local_level(s.values, i, half);
      const double score = bg > 0.0 ? level / bg : level;
      if (score > best) {
        best = score;
        g.omega0 = s.freqs[i];
      }
    }
  }

  if (has_ou(variant)) {
    std::size_t at = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      if (std::abs(s.freqs[i] - g.omega0) < dist) {
        dist = std::abs(s.freqs[i] - g.omega0);
        at = i;
      }
    }
    const double peak = local_level(s.values, at, half);
    const double excess = std::max(peak - background(g.omega0), 0.1 * peak);
    g.A = std::sqrt(std::max(excess, 1e-300)) * g.c;
  }
  return g.from_sample_units(pg.dt);
}

CovarianceReport hessian_cov(const std::function<double(const std::vector<double>&)>& loglik,
                             const std::vector<double>& theta, double z) {
  const std::size_t d = theta.size();
  CovarianceReport r;
  r.dim = d;
  const auto nll = [&](const std::vector<double>& x) {
    try {
      const double v = -loglik(x);
      return std::isfinite(v) ? v : kNaN;
    } catch (const std::exception&) {
      return kNaN;
    }
  };
  std::vector<double> step(d);
  for (std::size_t i = 0; i < d; ++i) step[i] = std::max(1e-4 * std::abs(theta[i]), 1e-6);

  Eigen::MatrixXd H(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const double f0 = nll(theta);
  std::vector<double> x = theta;
  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    x[i] = theta[i] + step[i];
    const double fp = nll(x);
    x[i] = theta[i] - step[i];
    const double fm = nll(x);
    x[i] = theta[i];
    H(ii, ii) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
    for (std::size_t j = 0; j < i; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      double acc = 0.0;
      for (const int si : {1, -1}) {
        for (const int sj : {1, -1}) {
          x[i] = theta[i] + si * step[i];
          x[j] = theta[j] + sj * step[j];
          acc += si * sj * nll(x);
        }
      }
      x[i] = theta[i];
      x[j] = theta[j];
      H(ii, jj) = H(jj, ii) = acc / (4.0 * step[i] * step[j]);
    }
  }

  r.cov.assign(d * d, kNaN);
  if (!H.allFinite()) {
    r.degenerate = true;
    fill_derived(r, theta, z);
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  const double tol = top * 1e-12 * static_cast<double>(d);
  Eigen::VectorXd inv(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > tol) {
      inv(i) = 1.0 / lam(i);
    } else {
      inv(i) = 0.0;
      r.degenerate = true;
    }
  }
  const Eigen::MatrixXd C = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      r.cov[i * d + j] = 0.5 * (C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                                 C(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
    }
  }
  fill_derived(r, theta, z);
  return r;
}

FitResult fit(const ComplexSeries& z, Variant variant, const FrequencyMask& mask, double f0,
              const std::optional<ModelParams>& init, const FitOptions& opts) {
  z.validate();
  FitResult r = fit(periodogram(z), variant, mask, f0, init, opts);
  r.data_digest = data_digest(z);
  return r;
}

FitResult fit(const Periodogram& pg, Variant variant, const FrequencyMask& mask, double f0,
              const std::optional<ModelParams>& init, const FitOptions& opts) {
  if (pg.size() == 0 || pg.n != pg.size() + 1) {
    throw std::invalid_argument("fit: periodogram must cover the n - 1 nonzero Fourier frequencies");
  }
  if (!(pg.dt > 0.0)) throw std::invalid_argument("fit: sampling interval must be positive");
  if (!std::isfinite(f0)) throw std::invalid_argument("fit: Coriolis frequency must be finite");
  const double dt = pg.dt;
  const auto free = free_params(variant);

  const Objective obj(to_sample_units(pg), to_sample_units(mask, dt), opts.kind);
  const std::size_t kept = obj.indices().size();
  if (kept < free.size() + 2) {
    throw std::invalid_argument("fit: mask keeps " + std::to_string(kept) + " frequencies, need at least " +
                                std::to_string(free.size() + 2) + " for " +
                                std::to_string(free.size()) + " free parameters");
  }

  // Start: heuristic guess, overlaid with any valid caller-supplied values.
  ModelParams start = initial_guess(pg, f0, variant).to_sample_units(dt);
  if (init) {
    ModelParams given = init->to_sample_units(dt);
    given.variant = variant;
    for (const Param k : free) {
      if (valid_for(given, k)) start.set(k, given.get(k));
    }
  }
  start.variant = variant;
  if (variant == Variant::kFixedFreq5) start.omega0 = f0 * dt;
  if (variant == Variant::kFbmBackground5) start.h = 0.0;
  if (!has_ou(variant)) start.A = start.c = start.omega0 = 0.0;
  if (!has_background(variant)) {
    start.B = start.h = 0.0;
    start.alpha = 1.0;
  }

  const Codec codec{variant, opts.transform, free, start};
  const auto neg = [&](const std::vector<double>& u) {
    try {
      return -obj(codec.decode(u));
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  SimplexOptions so;
  so.max_evals = opts.max_evals;
  so.initial_step.assign(free.size(), 0.1);
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (free[i] == Param::kOmega0) {
      const double bins = 3.0 * 2.0 * kPi / static_cast<double>(pg.n);
      so.initial_step[i] = opts.transform == Transform::kSoftplus ? bins / 2.0 : bins;
    }
  }

  FitResult r;
  r.free = free;
  r.mask = mask;
  r.kind = opts.kind;
  r.n = pg.n;
  r.dt = dt;
  r.num_frequencies = kept;
  r.data_digest = data_digest(pg);

  // One simplex search from `from`, restarted from the incumbent until a
  // fresh simplex stops finding gains.
  const auto search = [&](const ModelParams& from, bool& settled) {
    SimplexResult best = nelder_mead(neg, codec.encode(from), so);
    r.evaluations += best.evals;
    r.iterations += best.iterations;
    settled = opts.max_restarts == 0 && best.converged;
    for (int k = 0; k < opts.max_restarts && std::isfinite(best.fval); ++k) {
      SimplexResult next = nelder_mead(neg, best.x, so);
      ++r.restarts;
      r.evaluations += next.evals;
      r.iterations += next.iterations;
      const double gain = best.fval - next.fval;
      const bool next_converged = next.converged;
      if (gain > 0.0) best = std::move(next);
      if (gain < opts.tolerance) {
        settled = best.converged || next_converged;
        break;
      }
    }
    return best;
  };

  bool settled = false;
  SimplexResult best = search(start, settled);
  // A noisy periodogram can pull the heuristic peak away from f0; also
  // start at f0 itself and keep the better optimum.
  const double f0s = f0 * dt;
  const bool free_omega = std::find(free.begin(), free.end(), Param::kOmega0) != free.end();
  if (!init && free_omega && std::abs(f0s) <= kPi &&
      std::abs(start.omega0 - f0s) > 3.0 * 2.0 * kPi / static_cast<double>(pg.n)) {
    ModelParams alt = start;
    alt.omega0 = f0s;
    bool alt_settled = false;
    SimplexResult other = search(alt, alt_settled);
    if (other.fval < best.fval) {
      best = std::move(other);
      settled = alt_settled;
    }
  }
  if (!std::isfinite(best.fval)) {
    throw std::runtime_error("fit: objective is not finite anywhere the search went");
  }
  r.converged = settled;
  if (!r.converged) {
    r.warnings.push_back("optimizer did not converge within " + std::to_string(r.evaluations) +
                         " evaluations");
  }

  const ModelParams est = codec.decode(best.x);
  r.params = est.from_sample_units(dt);
  r.loglik = -best.fval - static_cast<double>(kept) * std::log(dt);

  const double dw = 2.0 * kPi / static_cast<double>(pg.n);
  if (has_background(variant) && variant != Variant::kFbmBackground5 && est.h < 0.5 * dw) {
    r.fbm_indistinguishable = true;
    r.warnings.push_back("h is below half a frequency spacing: fBm-indistinguishable");
  }
  for (const Param k : free) {
    const double v = est.get(k);
    bool edge = false;
    switch (k) {
      case Param::kOmega0: edge = std::abs(v) > kPi * (1.0 - 1e-6); break;
      case Param::kAlpha:
        edge = v - 0.5 < 1e-3 || (variant == Variant::kFbmBackground5 && 1.5 - v < 1e-3);
        break;
      default: edge = v < 1e-8;
    }
    if (edge) {
      r.near_boundary = true;
      r.warnings.push_back("estimate of " + std::string(param_name(k)) + " is at its bound");
    }
  }

  if (opts.compute_cov) {
    std::vector<double> theta;
    for (const Param k : free) theta.push_back(est.get(k));
    const auto ll = [&](const std::vector<double>& x) {
      ModelParams q = est;
      for (std::size_t i = 0; i < free.size(); ++i) q.set(free[i], x[i]);
      return obj(q);
    };
    const CovarianceReport cs = hessian_cov(ll, theta);

    // Jacobian of physical with respect to sample-unit parameters.
    const std::size_t d = free.size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const auto b_idx = r.index_of(Param::kB);
    const auto a_idx = r.index_of(Param::kAlpha);
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      switch (free[i]) {
        case Param::kA: J(ii, ii) = 1.0 / std::sqrt(dt); break;
        case Param::kB: J(ii, ii) = std::pow(dt, -(est.alpha - 0.5)); break;
        case Param::kAlpha: J(ii, ii) = 1.0; break;
        default: J(ii, ii) = 1.0 / dt;
      }
    }
    if (b_idx && a_idx) {
      J(static_cast<Eigen::Index>(*b_idx), static_cast<Eigen::Index>(*a_idx)) =
          -r.params.B * std::log(dt);
    }
    Eigen::MatrixXd Cs(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        Cs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cs.cov[i * d + j];
      }
    }
    const Eigen::MatrixXd Cp = J * Cs * J.transpose();
    CovarianceReport& out = r.covariance;
    out.dim = d;
    out.degenerate = cs.degenerate;
    out.cov.resize(d * d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        out.cov[i * d + j] = 0.5 * (Cp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                                   Cp(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      }
    }
    std::vector<double> phys;
    for (const Param k : free) phys.push_back(r.params.get(k));
    fill_derived(out, phys, 1.959963984540054);
    if (out.degenerate) {
      r.warnings.push_back("Hessian is singular or indefinite; covariance is a pseudo-inverse");
    }
  }
  return r;
}

double chi_square_threshold95(int df) {
  if (df <= 0) return 0.0;
  return boost::math::quantile(boost::math::chi_squared(df), 0.95);
}

LrtResult likelihood_ratio(const FitResult& null_fit, const FitResult& alt_fit) {
  const Variant nv = null_fit.params.variant;
  const Variant av = alt_fit.params.variant;
  if (!is_nested(nv, av)) {
    throw std::invalid_argument("likelihood_ratio: " + std::string(to_string(nv)) +
                                " is not nested in " + std::string(to_string(av)));
  }
  if (!(null_fit.mask == alt_fit.mask)) {
    throw std::invalid_argument("likelihood_ratio: fits use different frequency masks");
  }
  if (null_fit.kind != alt_fit.kind) {
    throw std::invalid_argument("likelihood_ratio: fits use different likelihoods");
  }
  if (null_fit.data_digest != alt_fit.data_digest || null_fit.n != alt_fit.n) {
    throw std::invalid_argument("likelihood_ratio: fits are of different data");
  }
  LrtResult out;
  out.df = static_cast<int>(free_params(av).size() - free_params(nv).size());
  double stat = 2.0 * (alt_fit.loglik - null_fit.loglik);
  if (stat < 0.0) {
    if (stat < -1e-6) {
      out.warnings.push_back("negative likelihood ratio " + std::to_string(stat) +
                             " floored to 0; the alternative fit is suboptimal");
    }
    stat = 0.0;
  }
  out.statistic = stat;
  if (out.df > 0) {
    const boost::math::chi_squared dist(out.df);
    out.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    out.threshold95 = chi_square_threshold95(out.df);
  } else {
    out.p_value = 1.0;
    out.threshold95 = 0.0;
  }
  if (nv == Variant::kFbmBackground5 && av != nv) {
    out.warnings.push_back(
        "null pins h = 0 on the parameter boundary; the chi-square reference is conservative "
        "(a 50:50 mixture of chi-square 0 and 1 is the usual boundary law)");
  }
  return out;
}

NestedFits fit_nested(const Periodogram& pg, Variant null_variant, Variant alt_variant,
                      const FrequencyMask& mask, double f0, const FitOptions& opts) {
  if (!is_nested(null_variant, alt_variant)) {
    throw std::invalid_argument("fit_nested: " + std::string(to_string(null_variant)) +
                                " is not nested in " + std::string(to_string(alt_variant)));
  }
  NestedFits out;
  out.null_fit = fit(pg, null_variant, mask, f0, std::nullopt, opts);

  // The null estimate guarantees the alternative never scores below the null;
  // a fresh start catches optima the null cannot reach (e.g. a shifted peak).
  ModelParams embed = out.null_fit.params;
  embed.variant = alt_variant;
  out.alt_fit = fit(pg, alt_variant, mask, f0, embed, opts);
  FitResult fresh = fit(pg, alt_variant, mask, f0, std::nullopt, opts);
  if (fresh.loglik > out.alt_fit.loglik) out.alt_fit = std::move(fresh);
  out.lrt = likelihood_ratio(out.null_fit, out.alt_fit);
  return out;
}

}  // namespace driftfit
