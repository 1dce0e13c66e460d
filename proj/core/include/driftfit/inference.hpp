#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftfit/likelihood.hpp"
#include "driftfit/model.hpp"
#include "driftfit/series.hpp"
#include "driftfit/spectral.hpp"

namespace driftfit {

/// How free parameters are mapped to the unconstrained search space.
/// kLog is the default (log for scales, log(alpha - 1/2) for the slope);
/// kSoftplus is an equivalent alternative used to check that estimates do
/// not depend on the choice.
enum class Transform { kLog, kSoftplus };

struct FitOptions {
  LikelihoodKind kind = LikelihoodKind::kBlurred;
  Transform transform = Transform::kLog;
  int max_evals = 2000;    // per simplex run
  int max_restarts = 4;    // simplex restarts from the incumbent
  double tolerance = 1e-6; // loglik improvement that ends the restarts
  bool compute_cov = true;
};

/// Covariance summary from a numerical Hessian.
struct CovarianceReport {
  std::size_t dim = 0;
  std::vector<double> cov;     // dim x dim, row-major
  std::vector<double> corr;    // dim x dim, row-major
  std::vector<double> std_errors; // sqrt of the diagonal
  std::vector<std::pair<double, double>> ci;
  bool degenerate = false;     // pseudo-inverse was used
};

struct FitResult {
  ModelParams params;  // estimates, physical units
  double loglik = 0.0;
  std::vector<Param> free;      // order used by cov / corr / ci
  CovarianceReport covariance;  // empty when not computed
  int iterations = 0;
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;
  bool fbm_indistinguishable = false;  // h below half a frequency spacing
  bool near_boundary = false;
  std::vector<std::string> warnings;
  FrequencyMask mask;
  LikelihoodKind kind = LikelihoodKind::kBlurred;
  std::size_t n = 0;
  double dt = 1.0;
  std::size_t num_frequencies = 0;
  std::uint64_t data_digest = 0;

  /// Position of p in `free`, or nullopt when it was held fixed.
  std::optional<std::size_t> index_of(Param p) const;
  /// Standard error, CI and correlation by parameter; NaN when not free or
  /// no covariance was computed.
  double std_error_of(Param p) const;
  std::pair<double, double> ci_of(Param p) const;
  double corr_of(Param a, Param b) const;
};

struct LrtResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  double threshold95 = 0.0;  // chi-square 95% quantile for df (0 when df = 0)
  std::vector<std::string> warnings;
};

/// FNV-1a digest of a series (values and sampling interval).
std::uint64_t data_digest(const ComplexSeries& z);
std::uint64_t data_digest(const Periodogram& pg);

/// Heuristic starting point from the periodogram; physical units. f0 is the
/// local Coriolis frequency in rad per unit of pg.dt.
ModelParams initial_guess(const Periodogram& pg, double f0, Variant variant);

/// Maximizes the chosen Whittle-type likelihood over the variant's free
/// parameters. Throws std::invalid_argument when the mask keeps fewer than
/// (free parameters + 2) frequencies. Non-convergence is reported through
/// `converged` and `warnings`.
FitResult fit(const Periodogram& pg, Variant variant, const FrequencyMask& mask, double f0,
              const std::optional<ModelParams>& init = std::nullopt, const FitOptions& opts = {});
FitResult fit(const ComplexSeries& z, Variant variant, const FrequencyMask& mask, double f0,
              const std::optional<ModelParams>& init = std::nullopt, const FitOptions& opts = {});

/// Central-difference Hessian of -loglik at theta with steps
/// max(1e-4 |theta_i|, 1e-6); covariance is its inverse (pseudo-inverse
/// when not positive definite) and intervals are theta +- z * stderr.
CovarianceReport hessian_cov(const std::function<double(const std::vector<double>&)>& loglik,
                             const std::vector<double>& theta, double z = 1.959963984540054);

/// R = 2 (l_alt - l_null) with a chi-square p-value on the difference in
/// free-parameter counts. Throws std::invalid_argument for non-nested
/// variants or fits of different data, masks or likelihoods.
LrtResult likelihood_ratio(const FitResult& null_fit, const FitResult& alt_fit);

/// 95% quantile of chi-square with df degrees of freedom; 0 for df = 0.
double chi_square_threshold95(int df);

struct NestedFits {
  FitResult null_fit;
  FitResult alt_fit;
  LrtResult lrt;
};

/// Fits both variants on the same data and mask. The alternative is fitted
/// from the null estimates, so its likelihood cannot fall below the null's
/// when the null is an interior special case, and again from the default
/// guess; the better of the two is kept.
NestedFits fit_nested(const Periodogram& pg, Variant null_variant, Variant alt_variant,
                      const FrequencyMask& mask, double f0, const FitOptions& opts = {});

}  // namespace driftfit
