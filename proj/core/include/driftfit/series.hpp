#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace driftfit {

/// Regularly sampled complex velocity record u + i v.
struct ComplexSeries {
  std::vector<std::complex<double>> values;  // cm/s
  double dt = 1.0;                           // seconds
  std::optional<double> t0;                  // seconds since the Unix epoch

  ComplexSeries() = default;
  ComplexSeries(std::vector<std::complex<double>> v, double dt_,
                std::optional<double> t0_ = std::nullopt);

  std::size_t size() const { return values.size(); }
  double dt_days() const { return dt / 86400.0; }
  double time_at(std::size_t i) const;

  /// Throws std::invalid_argument unless length >= 2, dt > 0 and all values finite.
  void validate() const;

  ComplexSeries slice(std::size_t start, std::size_t count) const;
};

}  // namespace driftfit
