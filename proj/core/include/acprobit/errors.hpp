#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace acprobit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input, dimension mismatches, out-of-range arguments.
class InvalidInput : public Error {
public:
  using Error::Error;
};

class NotPositiveSemidefinite : public Error {
public:
  NotPositiveSemidefinite(const std::string& what, double lambda_min)
      : Error(what), lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

private:
  double lambda_min_;
};

class NotPositiveDefinite : public Error {
public:
  NotPositiveDefinite(const std::string& what, double lambda_min)
      : Error(what), lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

private:
  double lambda_min_;
};

class ImproperPosterior : public Error {
public:
  using Error::Error;
};

/// Newton iteration for the posterior mode ran out of iterations.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, Eigen::VectorXd last_iterate, double grad_norm)
      : Error(what), last_iterate_(std::move(last_iterate)), grad_norm_(grad_norm) {}
  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double grad_norm() const noexcept { return grad_norm_; }

private:
  Eigen::VectorXd last_iterate_;
  double grad_norm_;
};

/// The design does not have the rank an operation requires.
class RankDeficiency : public Error {
public:
  using Error::Error;
};

/// Orthant enumeration would need 2^p scans with p above the configured cap.
class CombinatorialBlowup : public Error {
public:
  using Error::Error;
};

/// No drift coefficient below one, or the optimized rate bound is vacuous.
class CertificationFailure : public Error {
public:
  CertificationFailure(const std::string& what, double achieved = 1.0)
      : Error(what), achieved_(achieved) {}
  /// Best value reached (a drift coefficient or a rate bound, depending on the raiser).
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

class InsufficientLength : public Error {
public:
  using Error::Error;
};

class Inconclusive : public Error {
public:
  using Error::Error;
};

}  // namespace acprobit
