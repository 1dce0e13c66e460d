#include "driftfit/simulate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "driftfit/fft.hpp"

namespace driftfit {

namespace {

std::vector<std::complex<double>> dense_pair(const std::function<double(std::size_t)>& r,
                                             std::size_t n, std::mt19937_64& rng) {
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cov(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = r(static_cast<std::size_t>(i - j));
    }
  }
  Eigen::MatrixXd root;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    root = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
      throw std::runtime_error("simulate: covariance square root failed");
    }
    const Eigen::VectorXd sq = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root = eig.eigenvectors() * sq.asDiagonal();
  }
  std::normal_distribution<double> gauss;
  Eigen::VectorXd a(nn), b(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    a(i) = gauss(rng);
    b(i) = gauss(rng);
  }
  const Eigen::VectorXd xa = root * a;
  const Eigen::VectorXd xb = root * b;
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {xa(static_cast<Eigen::Index>(i)), xb(static_cast<Eigen::Index>(i))};
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::complex<double>> sample_gaussian_pair(const std::function<double(std::size_t)>& r,
                                                       std::size_t n, std::mt19937_64& rng,
                                                       const EmbeddingOptions& opts) {
  if (n == 0) return {};
  if (n == 1) {
    std::normal_distribution<double> gauss;
    const double sd = std::sqrt(std::max(r(0), 0.0));
    const double re = gauss(rng);
    const double im = gauss(rng);
    return {{sd * re, sd * im}};
  }
  const std::size_t base = 2 * (n - 1);
  for (int k = 0; k <= opts.max_doublings; ++k) {
    const std::size_t m = base << k;
    std::vector<std::complex<double>> row(m);
    for (std::size_t j = 0; j < m; ++j) row[j] = r(std::min(j, m - j));
    fft::forward_inplace(row);
    double lmax = 0.0, lmin = 0.0;
    for (const auto& v : row) {
      lmax = std::max(lmax, v.real());
      lmin = std::min(lmin, v.real());
    }
    if (!(lmax > 0.0) || lmin < -1e-10 * lmax) continue;

    std::normal_distribution<double> gauss;
    std::vector<std::complex<double>> w(m);
    const double md = static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double sd = std::sqrt(std::max(row[j].real(), 0.0) / md);
      const double re = gauss(rng);
      const double im = gauss(rng);
      w[j] = {sd * re, sd * im};
    }
    fft::forward_inplace(w);
    w.resize(n);
    return w;
  }
  if (!opts.allow_dense_fallback) {
    throw std::runtime_error("simulate: circulant embedding is not nonnegative definite");
  }
  return dense_pair(r, n, rng);
}

ComplexSeries simulate(const ModelParams& p, std::size_t n, double dt, std::uint64_t seed,
                       const EmbeddingOptions& opts) {
  if (n < 2) throw std::invalid_argument("simulate: n must be at least 2");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  p.validate(dt);

  ComplexSeries out;
  out.dt = dt;
  out.values.assign(n, {0.0, 0.0});

  if (has_ou(p.variant)) {
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::normal_distribution<double> gauss;
    const double var = p.A * p.A / (2.0 * p.c);
    const std::complex<double> phi = std::exp(std::complex<double>(-p.c * dt, p.omega0 * dt));
    const double innov_sd = std::sqrt(var * -std::expm1(-2.0 * p.c * dt) / 2.0);
    const double init_sd = std::sqrt(var / 2.0);
    const double z_re = gauss(rng);
    const double z_im = gauss(rng);
    std::complex<double> z{init_sd * z_re, init_sd * z_im};
    for (std::size_t t = 0; t < n; ++t) {
      out.values[t] += z;
      const double re = gauss(rng);
      const double im = gauss(rng);
      z = phi * z + std::complex<double>(innov_sd * re, innov_sd * im);
    }
  }

  if (has_background(p.variant)) {
    if (p.variant == Variant::kFbmBackground5) {
      const ComplexSeries bg = simulate_fbm(p.B, p.alpha, n, dt, derive_seed(seed, 2));
      for (std::size_t t = 0; t < n; ++t) out.values[t] += bg.values[t];
    } else {
      std::mt19937_64 rng(derive_seed(seed, 2));
      ModelParams bg = p;
      bg.variant = Variant::kMaternOnly3;
      const auto r = [&](std::size_t k) {
        return 0.5 * matern_acvs(bg, static_cast<double>(k) * dt);
      };
      const auto draw = sample_gaussian_pair(r, n, rng, opts);
      for (std::size_t t = 0; t < n; ++t) out.values[t] += draw[t];
    }
  }
  return out;
}

ComplexSeries simulate_fbm(double B, double alpha, std::size_t n, double dt, std::uint64_t seed) {
  if (!(alpha > 0.5 && alpha < 1.5)) {
    throw std::domain_error("simulate_fbm: alpha must lie in (1/2, 3/2)");
  }
  if (!(B > 0.0)) throw std::domain_error("simulate_fbm: B must be positive");
  if (n < 2) throw std::invalid_argument("simulate_fbm: n must be at least 2");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_fbm: dt must be positive");

  const double hurst = alpha - 0.5;
  // Per-component increment variance over one step.
  const double step_var = B * B / (2.0 * std::tgamma(2.0 * alpha) * std::sin(std::numbers::pi * hurst)) *
                          std::pow(dt, 2.0 * hurst);
  const auto gamma = [&](std::size_t k) {
    const double kk = static_cast<double>(k);
    const double e = 2.0 * hurst;
    return 0.5 * step_var *
           (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(std::abs(kk - 1.0), e));
  };
  std::mt19937_64 rng(seed);
  const auto inc = sample_gaussian_pair(gamma, n - 1, rng);

  ComplexSeries out;
  out.dt = dt;
  out.values.resize(n);
  out.values[0] = {0.0, 0.0};
  for (std::size_t t = 1; t < n; ++t) out.values[t] = out.values[t - 1] + inc[t - 1];
  return out;
}

}  // namespace driftfit
