#pragma once

#include <string>

#include "driftfit/inference.hpp"

namespace driftfit {

/// JSON document for a fit: params, loglik, cov (row-major over `free`),
/// ci, corr, converged, warnings, mask descriptor and data digest.
/// Non-finite numbers are written as null.
std::string fit_to_json(const FitResult& r, int indent = 2);

std::string lrt_to_json(const LrtResult& r, int indent = 2);

}  // namespace driftfit
