#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ambitalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A game or channel description violates its invariants.
class InvalidSpec : public Error {
public:
  using Error::Error;
};

/// A word is never observed under the channel being evaluated.
class DegenerateWord : public Error {
public:
  using Error::Error;
};

class InvalidCut : public Error {
public:
  using Error::Error;
};

class UnsupportedLoss : public Error {
public:
  using Error::Error;
};

class TooManyWords : public Error {
public:
  using Error::Error;
};

class LengthMismatch : public Error {
public:
  using Error::Error;
};

class SpaceMismatch : public Error {
public:
  using Error::Error;
};

/// An iterative solver stopped before meeting its tolerance.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string &what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

private:
  int iterations_;
  double residual_;
};

/// No fixed point beat babbling although the channel is informative.
class EfficiencyAssertionFailed : public Error {
public:
  using Error::Error;
};

} // namespace ambitalk
