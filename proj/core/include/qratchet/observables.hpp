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

#include <string>
#include <vector>

#include "qratchet/common.hpp"
#include "qratchet/floquet.hpp"
#include "qratchet/model.hpp"
#include "qratchet/propagator.hpp"

namespace qratchet {

enum class InitialKind { kPlaneWaveZero, kCustomCoefficients };

struct InitialState {
  InitialKind kind = InitialKind::kPlaneWaveZero;
  // Plane-wave coefficients, index n + M for a basis -M..M. Used only for
  // kCustomCoefficients.
  ComplexVector coeffs;

  static InitialState plane_wave_zero() { return {}; }
  static InitialState custom(ComplexVector c);

  // Coefficients restricted to the basis -n_cut..n_cut.
  ComplexVector coefficients(int n_cut) const;
};

inline constexpr double kMinInitialWeight = 0.999;

// Overlaps C_a = <phi_a|psi> of the initial state with the columns of the
// decomposition. Throws NormDeficit when sum |C_a|^2 < 0.999.
ComplexVector floquet_weights(const FloquetDecomposition& dec, const InitialState& init);

// J = sum_a <p>_a |C_a|^2, generalized to C^dagger M C on degenerate
// clusters. Momentum in Hamiltonian units (divide by hbar for recoil
// units).
double asymptotic_current_floquet(const FloquetDecomposition& dec, const InitialState& init);

// J(t0) on the uniform grid t0_k = k T / n_t0 and its mean.
struct CurrentProfile {
  std::vector<double> t0;
  std::vector<double> j;
  double mean = 0.0;
};

// Profile from one reference build. ref must start at t = 0, carry
// checkpoints whose count is a multiple of n_t0, and dec must be its
// decomposition. A drive phase t0 is equivalent to conjugating the
// reference propagator with U(sigma, 0), sigma = (ref phase - t0) mod T.
CurrentProfile current_profile(const FloquetMatrix& ref, const FloquetDecomposition& dec,
                               const InitialState& init, int n_t0);

// Builds the reference at drive phase 0 with max(64, n_t0) checkpoints and
// returns the profile. Requires n_t0 >= 8.
CurrentProfile averaged_current(const RatchetSystem& sys, const PropagatorConfig& cfg,
                                const InitialState& init, int n_t0);

// P(mT) = (1/mT) int_0^{mT} pbar dt for m = 1..n_periods, with
// pbar = hbar <n> - A(t). The state is propagated with U^m and the stored
// sub-period propagators; the integral uses the trapezoid rule on
// n_samples points per period.
struct RunningAverage {
  std::vector<double> p;
  // pbar at the strobes mT, m = 0..n_periods.
  std::vector<double> strobe_momentum;
};

RunningAverage evolve_running_average(const RatchetSystem& sys, const PropagatorConfig& cfg,
                                      const InitialState& init, int n_periods,
                                      int n_samples = kDefaultSamples);

struct HusimiSpec {
  int nx = 128;
  int np = 128;
  double p_max = 4.0;
};

// rho(i, j) at x[j] in [0, 2 pi) and physical momentum p[i] in
// [-p_max, p_max], normalized so that its integral over x and p is 1 for
// a state well inside the basis.
struct HusimiGrid {
  std::vector<double> x;
  std::vector<double> p;
  RealMatrix rho;
  double sigma = 0.0;
  double hbar = 0.0;
  double time = 0.0;
  double frame_a = 0.0;

  // Riemann sum of rho over the grid cells.
  double mass() const;
};

// Coherent-state overlaps with width sigma = sqrt(hbar / 2). The periodized
// kernel is evaluated through its plane-wave expansion, which is the sum
// over all spatial images.
HusimiGrid husimi(const WaveState& state, double hbar, const HusimiSpec& spec = {});

std::string current_csv(double theta, const CurrentProfile& profile);
std::string running_average_csv(const RunningAverage& ra);
std::string husimi_csv(const HusimiGrid& g);
std::string husimi_header_json(const HusimiGrid& g, const HusimiSpec& spec);

}  // namespace qratchet
