#pragma once

namespace driftfit {

/// Modified Bessel function of the second kind K_nu(x) for real order nu
/// and x > 0. Temme's series is used for x <= 2 and Steed's continued
/// fraction above; integer steps of the order use upward recurrence.
double bessel_k(double nu, double x);

/// exp(x) * K_nu(x). Stays finite where K_nu underflows.
double bessel_k_scaled(double nu, double x);

/// x^nu * K_nu(x) for nu > 0, continuous at x = 0 where it equals
/// Gamma(nu) * 2^(nu-1).
double bessel_k_xpow(double nu, double x);

}  // namespace driftfit
