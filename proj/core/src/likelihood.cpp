#include "driftfit/likelihood.hpp"

#include <cmath>
#include <stdexcept>

namespace driftfit {

std::string_view to_string(LikelihoodKind k) {
  return k == LikelihoodKind::kWhittle ? "whittle" : "blurred";
}

double whittle_sum(const std::vector<double>& data, const std::vector<double>& model,
                   const std::vector<std::size_t>& idx) {
  double sum = 0.0;
  for (const std::size_t i : idx) {
    const double s = model[i];
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::domain_error("likelihood: model spectrum is not positive on the mask");
    }
    sum += data[i] / s + std::log(s);
  }
  return -sum;
}

double whittle_loglik(const Periodogram& pg, const ModelParams& p, const FrequencyMask& mask) {
  return Objective(pg, mask, LikelihoodKind::kWhittle)(p);
}

double blurred_whittle_loglik(const Periodogram& pg, const ModelParams& p,
                              const FrequencyMask& mask) {
  return Objective(pg, mask, LikelihoodKind::kBlurred)(p);
}

Objective::Objective(Periodogram pg, FrequencyMask mask, LikelihoodKind kind)
    : pg_(std::move(pg)), mask_(std::move(mask)), kind_(kind), idx_(mask_.select(pg_)) {
  if (pg_.values.size() != pg_.freqs.size()) {
    throw std::invalid_argument("objective: periodogram freqs/values size mismatch");
  }
  if (kind_ == LikelihoodKind::kBlurred && pg_.n != pg_.freqs.size() + 1) {
    throw std::invalid_argument("objective: blurred likelihood needs the source length n");
  }
}

std::vector<double> Objective::model_curve(const ModelParams& p) const {
  if (kind_ == LikelihoodKind::kWhittle) {
    std::vector<double> out(pg_.size(), 0.0);
    for (const std::size_t i : idx_) out[i] = model_spectrum(p, pg_.freqs[i]);
    return out;
  }
  return expected_periodogram_values(model_acvs_sequence(p, pg_.n, pg_.dt), pg_.n);
}

double Objective::operator()(const ModelParams& p) const {
  return whittle_sum(pg_.values, model_curve(p), idx_);
}

}  // namespace driftfit
