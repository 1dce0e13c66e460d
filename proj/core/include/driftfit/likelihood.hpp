#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "driftfit/model.hpp"
#include "driftfit/spectral.hpp"

namespace driftfit {

enum class LikelihoodKind { kWhittle, kBlurred };

std::string_view to_string(LikelihoodKind k);

/// -sum_{w in mask} (I(w) / S(w) + log S(w)) with S the model spectrum.
/// Larger is better. Throws std::domain_error if S <= 0 on the mask.
double whittle_loglik(const Periodogram& pg, const ModelParams& p, const FrequencyMask& mask);

/// As whittle_loglik with S replaced by the expected periodogram for the
/// periodogram's length and sampling interval.
double blurred_whittle_loglik(const Periodogram& pg, const ModelParams& p,
                              const FrequencyMask& mask);

/// A frequency-domain objective bound to a periodogram and a mask. The
/// masked index set is resolved once at construction.
class Objective {
 public:
  Objective(Periodogram pg, FrequencyMask mask, LikelihoodKind kind);

  double operator()(const ModelParams& p) const;

  /// Model curve the objective compares against on the full grid
  /// (spectrum or expected periodogram).
  std::vector<double> model_curve(const ModelParams& p) const;

  const Periodogram& periodogram() const { return pg_; }
  const FrequencyMask& mask() const { return mask_; }
  LikelihoodKind kind() const { return kind_; }
  const std::vector<std::size_t>& indices() const { return idx_; }

 private:
  Periodogram pg_;
  FrequencyMask mask_;
  LikelihoodKind kind_;
  std::vector<std::size_t> idx_;
};

/// The score from already computed curves; exposed for tests.
double whittle_sum(const std::vector<double>& data, const std::vector<double>& model,
                   const std::vector<std::size_t>& idx);

}  // namespace driftfit
