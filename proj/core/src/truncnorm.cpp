#include "acprobit/truncnorm.hpp"

#include <cmath>

#include <boost/math/constants/constants.hpp>

#include "acprobit/errors.hpp"

namespace acprobit {

namespace {

constexpr double kLeftTailSwitch = -8.0;
constexpr double kNaiveMassThreshold = 0.2;

void require_finite(double theta) {
  if (!std::isfinite(theta)) {
    throw InvalidInput("truncated-normal argument must be finite");
  }
}

// For x > 0, phi(x)/Phi(-x) = x + t(x) with
//   t(x) = 1/(x + 2/(x + 3/(x + ...))).
// Modified Lentz evaluation; converges in a few dozen terms for x >= 8.
double left_tail_remainder(double x) {
  constexpr double tiny = 1e-300;
  double f = tiny;
  double c = f;
  double d = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double a = static_cast<double>(k);
    d = x + a * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

}  // namespace

double norm_pdf(double x) {
  // x^2 split into hi + lo so the rounding of x*x is not amplified by exp.
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(-0.5 * hi) * std::exp(-0.5 * lo) *
         boost::math::double_constants::one_div_root_two_pi;
}

double norm_cdf(double x) {
  if (x < kLeftTailSwitch) return norm_pdf(x) / inverse_mills(x);
  return 0.5 * std::erfc(-x * boost::math::double_constants::one_div_root_two);
}

double log_norm_cdf(double x) {
  if (x < kLeftTailSwitch) {
    // Phi(x) = phi(x) / inverse_mills(x)
    return -0.5 * x * x - 0.5 * std::log(2.0 * boost::math::double_constants::pi) -
           std::log(inverse_mills(x));
  }
  if (x > 5.0) {
    return std::log1p(-norm_cdf(-x));
  }
  return std::log(norm_cdf(x));
}

double inverse_mills(double theta) {
  require_finite(theta);
  if (theta < kLeftTailSwitch) {
    const double x = -theta;
    return x + left_tail_remainder(x);
  }
  return norm_pdf(theta) / norm_cdf(theta);
}

double g(double theta) {
  require_finite(theta);
  if (theta < kLeftTailSwitch) {
    // theta + m = t exactly, which avoids cancelling two numbers near |theta|.
    const double x = -theta;
    const double t = left_tail_remainder(x);
    return (x + t) * t;
  }
  const double m = inverse_mills(theta);
  return m * (theta + m);
}

double tn_mean(double theta, TruncSide side) {
  require_finite(theta);
  if (side == TruncSide::positive) {
    return theta + inverse_mills(theta);
  }
  return theta - inverse_mills(-theta);
}

double tn_var(double theta, TruncSide side) {
  require_finite(theta);
  return side == TruncSide::positive ? 1.0 - g(theta) : 1.0 - g(-theta);
}

namespace {

// Draw from TN(theta, 1; positive).
double sample_positive(double theta, Rng& rng) {
  if (norm_cdf(theta) >= kNaiveMassThreshold) {
    for (;;) {
      const double z = theta + rng.normal();
      if (z > 0.0) return z;
    }
  }
  // Tail case: W = Z - theta is N(0,1) restricted to (a, inf) with a = -theta > 0.
  // Proposal W = a + E, E ~ Exp(rate), accepted with prob exp(-(W - rate)^2 / 2).
  const double a = -theta;
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double e = rng.exponential(rate);
    const double w = a + e;
    const double u = rng.uniform();
    if (u <= std::exp(-0.5 * (w - rate) * (w - rate)) && e > 0.0) {
      return e;  // Z = theta + W = E
    }
  }
}

}  // namespace

double tn_sample(double theta, TruncSide side, Rng& rng) {
  require_finite(theta);
  if (side == TruncSide::positive) {
    return sample_positive(theta, rng);
  }
  return -sample_positive(-theta, rng);
}

}  // namespace acprobit
