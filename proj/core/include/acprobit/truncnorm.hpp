#pragma once

#include "acprobit/rng.hpp"

namespace acprobit {

/// Which half-line a latent variable is truncated to. The numeric value
/// matches the binary response that induces it.
enum class TruncSide : int {
  negative = 0,  // (-inf, 0), response 0
  positive = 1,  // (0, inf), response 1
};

inline TruncSide side_from_response(int y) {
  return y == 1 ? TruncSide::positive : TruncSide::negative;
}

/// Standard normal density.
double norm_pdf(double x);
/// Standard normal distribution function, accurate in both tails.
double norm_cdf(double x);
/// log Phi(x), finite for every finite x.
double log_norm_cdf(double x);

/// phi(theta)/Phi(theta). Uses erfc while Phi(theta) is comfortably
/// representable and a Lentz continued fraction for the left tail (theta < -8).
double inverse_mills(double theta);

/// g(theta) = theta*phi/Phi + (phi/Phi)^2, the variance deficit of TN(theta, 1; 1).
double g(double theta);

/// Mean of TN(theta, 1; side).
double tn_mean(double theta, TruncSide side);

/// Variance of TN(theta, 1; side); 1 - g(theta) or 1 - g(-theta).
double tn_var(double theta, TruncSide side);

/// One draw from TN(theta, 1; side). Plain rejection from N(theta, 1) when the
/// admissible half-line has mass >= 0.2, otherwise a translated-exponential
/// rejection sampler with the optimal rate for the tail.
double tn_sample(double theta, TruncSide side, Rng& rng);

}  // namespace acprobit
