#pragma once

namespace menet {

// Inverse CDF of the standard normal distribution.
// Acklam's rational approximation refined with one Halley step against
// erfc, absolute error well below 1e-9. Throws std::domain_error for
// arguments outside (0, 1).
double std_normal_quantile(double eta);

// CDF of the standard normal distribution.
double std_normal_cdf(double x);

}  // namespace menet
