#pragma once

#include <complex>
#include <span>
#include <vector>

namespace driftfit::fft {

/// Unnormalized forward DFT: X_k = sum_t x_t exp(-2 pi i k t / n).
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x);

/// Unnormalized inverse DFT: x_t = sum_k X_k exp(+2 pi i k t / n).
std::vector<std::complex<double>> backward(std::span<const std::complex<double>> x);

void forward_inplace(std::span<std::complex<double>> x);
void backward_inplace(std::span<std::complex<double>> x);

}  // namespace driftfit::fft
