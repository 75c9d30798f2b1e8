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

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qratchet/floquet.hpp"

namespace qratchet {

// Reduced model of the pair |n>, |-n> coupled by delta and split by the
// parity-breaking epsilon. Vectors are ordered (|n>, |-n>).
struct TwoLevelModel {
  int n = 1;
  double delta = 0.0;
  double epsilon = 0.0;

  double gamma() const { return epsilon / delta; }
  // Throws InvalidArgument when n < 1.
  void validate() const;
};

struct TwoLevelStates {
  Eigen::Vector2d phi_s;
  Eigen::Vector2d phi_a;
  // Set when delta == 0: the states are then the uncoupled limits |+-n>,
  // or the parity pair when epsilon is also zero.
  bool zero_coupling = false;
};

// One-step propagator [[1 - eps, delta], [delta, 1 + eps]].
Eigen::Matrix2d two_level_propagator(const TwoLevelModel& m);

// Phi_s = [1, g] / L, Phi_a = [g, -1] / L, g = gamma + sqrt(1 + gamma^2),
// L = sqrt(1 + g^2).
TwoLevelStates eigenstates(const TwoLevelModel& m);

// Exact momenta n (|c_n|^2 - |c_-n|^2) in units of the recoil momentum.
std::pair<double, double> momenta(const TwoLevelModel& m);

// Labeled approximations: -+gamma n for small gamma and
// -+n (1 + 1 / (4 gamma^2)) for large gamma.
std::pair<double, double> momenta_small_gamma(const TwoLevelModel& m);
std::pair<double, double> momenta_large_gamma(const TwoLevelModel& m);

// Synthetic scan over epsilon: each point carries the two eigenphases
// -+sqrt(eps^2 + delta^2) of H = [[-eps, delta], [delta, eps]], its
// eigenvectors and exact momenta, in a form accepted by track_bands.
std::vector<FloquetDecomposition> synthetic_scan(int n, double delta,
                                                 const std::vector<double>& epsilons);

struct SplittingFit {
  // log(delta_n) = intercept + slope * n log n.
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  // log(delta_n) = a + b n, for comparison.
  double exp_slope = 0.0;
  double exp_rms_residual = 0.0;
  std::vector<double> residuals;
};

// Least-squares fits of log(delta_n) against n log n and against n.
// Requires at least three points with n >= 2 and delta_n > 0.
SplittingFit splitting_scaling(const std::vector<std::pair<int, double>>& series);

// Doublet gaps from a decomposition at a symmetric point: states are
// labeled by the |n| that carries most of their weight and every label
// held by exactly two states yields (|n|, circular gap).
std::vector<std::pair<int, double>> doublet_gaps(const FloquetDecomposition& dec);

}  // namespace qratchet
