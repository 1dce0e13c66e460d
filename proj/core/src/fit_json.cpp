#include "driftfit/fit_json.hpp"

#include <cstdio>

#include "json.hpp"

namespace driftfit {

namespace {

using nlohmann::json;

json mask_json(const FrequencyMask& m) {
  json j;
  j["side"] = std::string(to_string(m.side));
  j["cutoff_rad_per_s"] = m.cutoff ? json(*m.cutoff) : json(nullptr);
  j["excludes"] = json::array();
  for (const auto& [a, b] : m.excludes) j["excludes"].push_back({a, b});
  j["description"] = m.describe();
  return j;
}

}  // namespace

std::string fit_to_json(const FitResult& r, int indent) {
  json j;
  j["variant"] = std::string(to_string(r.params.variant));
  j["likelihood"] = std::string(to_string(r.kind));
  json params;
  for (int i = 0; i < kNumParams; ++i) {
    const auto p = static_cast<Param>(i);
    params[std::string(param_name(p))] = r.params.get(p);
  }
  j["params"] = params;
  j["loglik"] = r.loglik;
  json names = json::array();
  for (const Param p : r.free) names.push_back(std::string(param_name(p)));
  j["free"] = names;
  j["cov"] = r.covariance.cov;
  j["corr"] = r.covariance.corr;
  json ci, se;
  for (std::size_t i = 0; i < r.covariance.ci.size(); ++i) {
    const std::string name(param_name(r.free[i]));
    ci[name] = {r.covariance.ci[i].first, r.covariance.ci[i].second};
    se[name] = r.covariance.std_errors[i];
  }
  j["ci"] = ci.is_null() ? json::object() : ci;
  j["stderr"] = se.is_null() ? json::object() : se;
  j["cov_degenerate"] = r.covariance.degenerate;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["restarts"] = r.restarts;
  j["fbm_indistinguishable"] = r.fbm_indistinguishable;
  j["near_boundary"] = r.near_boundary;
  j["warnings"] = r.warnings;
  j["mask"] = mask_json(r.mask);
  j["n"] = r.n;
  j["dt"] = r.dt;
  j["num_frequencies"] = r.num_frequencies;
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.data_digest));
  j["data_digest"] = digest;
  return j.dump(indent);
}

std::string lrt_to_json(const LrtResult& r, int indent) {
  json j;
  j["statistic"] = r.statistic;
  j["df"] = r.df;
  j["p_value"] = r.p_value;
  j["threshold95"] = r.threshold95;
  j["warnings"] = r.warnings;
  return j.dump(indent);
}

}  // namespace driftfit
