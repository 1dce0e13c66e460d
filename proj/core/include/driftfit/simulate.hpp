#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "driftfit/model.hpp"
#include "driftfit/series.hpp"

namespace driftfit {

/// Deterministic sub-seed for stream `k` of a run seeded with `seed`
/// (splitmix64 mixing). Used for ensemble members and model components.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

struct EmbeddingOptions {
  int max_doublings = 4;             // embedding sizes 2(n-1) * 2^k, k <= max_doublings
  bool allow_dense_fallback = true;  // covariance square root when embedding fails
};

/// Draws a complex series of length n whose real and imaginary parts are
/// independent stationary Gaussian series with autocovariance r(k), via
/// circulant embedding. Throws std::runtime_error when no embedding up to
/// the doubling limit is nonnegative definite and the fallback is disabled.
std::vector<std::complex<double>> sample_gaussian_pair(const std::function<double(std::size_t)>& r,
                                                       std::size_t n, std::mt19937_64& rng,
                                                       const EmbeddingOptions& opts = {});

/// Exact stationary draw of the model at lags of dt. The OU part uses the
/// exact AR(1) recursion with circular complex innovations started from its
/// stationary law; the background is drawn by circulant embedding (Matern)
/// or as fractional Brownian motion (h = 0 variant). Deterministic per seed.
ComplexSeries simulate(const ModelParams& p, std::size_t n, double dt, std::uint64_t seed,
                       const EmbeddingOptions& opts = {});

/// Complex fractional Brownian motion with generalized spectrum
/// B^2 |omega|^(-2 alpha), Hurst index alpha - 1/2, starting at zero.
/// Real and imaginary parts are independent.
ComplexSeries simulate_fbm(double B, double alpha, std::size_t n, double dt, std::uint64_t seed);

}  // namespace driftfit
