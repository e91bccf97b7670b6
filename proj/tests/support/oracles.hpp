#pragma once

// Reference computations that do not go through the library: quadrature for
// truncated-normal moments, the Kolmogorov distribution, and plain helpers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

struct Moments {
  double mean;
  double var;
};

// Moments of TN(theta, 1) on (0, inf) by adaptive quadrature. For theta < 0 the
// density is rescaled by exp(theta^2/2) so that nothing underflows.
inline Moments tn_positive_moments(double theta) {
  auto kernel = [theta](double z) {
    return theta < 0.0 ? std::exp(-0.5 * z * z + z * theta) : std::exp(-0.5 * (z - theta) * (z - theta));
  };
  // The kernel is below e^{-800} past this point.
  const double upper = std::max(theta, 0.0) + 40.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double m0 = GK::integrate(kernel, 0.0, upper, 15, 1e-14);
  const double m1 = GK::integrate([&](double z) { return z * kernel(z); }, 0.0, upper, 15, 1e-14);
  const double m2 = GK::integrate([&](double z) { return z * z * kernel(z); }, 0.0, upper, 15, 1e-14);
  const double mean = m1 / m0;
  return {mean, m2 / m0 - mean * mean};
}

inline Moments tn_moments(double theta, bool positive) {
  if (positive) return tn_positive_moments(theta);
  const Moments m = tn_positive_moments(-theta);
  return {-m.mean, m.var};
}

inline double g_quadrature(double theta) { return 1.0 - tn_positive_moments(theta).var; }

inline double normal_cdf(double x) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// Upper tail Q(x) = 1 - Phi(x).
inline double normal_upper(double x) {
  return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), x));
}

// CDF of TN(theta, 1) on (0, inf): 1 - Q(z - theta)/Q(-theta).
inline double tn_positive_cdf(double z, double theta) {
  if (z <= 0.0) return 0.0;
  return 1.0 - normal_upper(z - theta) / normal_upper(-theta);
}

inline double tn_cdf(double z, double theta, bool positive) {
  if (positive) return tn_positive_cdf(z, theta);
  // Z = -Z+ with Z+ ~ TN(-theta, 1; positive).
  return 1.0 - tn_positive_cdf(-z, -theta);
}

// Kolmogorov limiting distribution P(K <= x).
inline double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  double s = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return 1.0 - 2.0 * s;
}

// Critical value of the one-sample KS statistic at level alpha for sample size n.
inline double ks_critical(double alpha, std::size_t n) {
  double lo = 0.1, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf(mid) < 1.0 - alpha ? lo : hi) = mid;
  }
  const double rn = std::sqrt(static_cast<double>(n));
  return 0.5 * (lo + hi) / (rn + 0.12 + 0.11 / rn);
}

inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace oracle
