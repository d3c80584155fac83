#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ssesprit {

using Index = Eigen::Index;
using cdouble = std::complex<double>;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument or dimension violations (bad multi-index, mismatched sizes, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown during estimation: rank-deficient invariance
// equations, defective pairing matrix, non-PSD correlation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient least-squares system in one shift-invariance mode.
class RankDeficientInvariance : public NumericalError {
 public:
  RankDeficientInvariance(int mode, const std::string& what)
      : NumericalError(what), mode_(mode) {}
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace ssesprit
