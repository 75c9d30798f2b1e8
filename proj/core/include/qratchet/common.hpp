// Copyright 2026 The qratchet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qratchet {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// ||U^dagger U - I||_max above the accepted bound after a build.
class UnitarityViolation : public Error {
 public:
  UnitarityViolation(const std::string& msg, double defect)
      : Error(msg), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

// Adaptive integrator could not meet its tolerance.
class StepSizeUnderflow : public Error {
 public:
  using Error::Error;
};

// Initial state has less than the required weight inside the basis.
class NormDeficit : public Error {
 public:
  NormDeficit(const std::string& msg, double weight)
      : Error(msg), weight_(weight) {}
  double weight() const noexcept { return weight_; }

 private:
  double weight_;
};

// Band matching failed: some successive overlap is too small.
class TrackingAmbiguity : public Error {
 public:
  TrackingAmbiguity(const std::string& msg, std::size_t step, double overlap)
      : Error(msg), step_(step), overlap_(overlap) {}
  std::size_t step() const noexcept { return step_; }
  double overlap() const noexcept { return overlap_; }

 private:
  std::size_t step_;
  double overlap_;
};

class InsufficientChaoticSamples : public Error {
 public:
  InsufficientChaoticSamples(const std::string& msg, std::size_t accepted,
                             std::size_t requested)
      : Error(msg), accepted_(accepted), requested_(requested) {}
  std::size_t accepted() const noexcept { return accepted_; }
  std::size_t requested() const noexcept { return requested_; }

 private:
  std::size_t accepted_;
  std::size_t requested_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

}  // namespace qratchet
