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

#include <optional>
#include <set>
#include <string>

#include "qratchet/common.hpp"

namespace qratchet {

// Two-harmonic zero-mean force
//   E(t) = e1 cos[omega (t - t0)] + e2 cos[2 omega (t - t0) + theta].
//
// Time runs from the preparation instant t = 0; t0 sets the phase of the
// drive relative to that instant.
struct DrivingField {
  double e1 = 0.0;
  double e2 = 0.0;
  double omega = 1.0;
  double theta = 0.0;
  double t0 = 0.0;

  double period() const noexcept { return kTwoPi / omega; }
};

// U(x) = k [cos x + s cos(2x + theta_p)].
struct FlashingPotential {
  double k = 1.0;
  double s = 0.0;
  double theta_p = 0.0;
};

enum class Variant { kTilting, kFlashing };

// Hamiltonian variant plus quantum parameters.
//   tilting:  H = p^2/2 + 1 + cos x - x E(t)
//   flashing: H = p^2/2 + U(x) E(t)
// The plane-wave basis is |n>, n = -n_cut..n_cut, quasimomentum fixed at 0.
struct RatchetSystem {
  Variant variant = Variant::kTilting;
  DrivingField driving;
  FlashingPotential potential;
  double hbar = 0.2;
  int n_cut = 64;
  double kappa = 0.0;

  int dim() const noexcept { return 2 * n_cut + 1; }
  // Throws InvalidArgument when n_cut < 1, hbar <= 0, omega <= 0 or
  // kappa != 0.
  void validate() const;
};

// Plane-wave coefficients c_n (index n + n_cut) in the gauge-transformed
// frame, the time they refer to and the vector potential at that time.
struct WaveState {
  ComplexVector coeffs;
  double time = 0.0;
  double frame_a = 0.0;

  int n_cut() const noexcept { return static_cast<int>(coeffs.size() - 1) / 2; }
  double norm() const { return coeffs.norm(); }

  static WaveState plane_wave(int n_cut, int n, double time = 0.0,
                              double frame_a = 0.0);
};

double field_value(const DrivingField& f, double t);
double field_derivative(const DrivingField& f, double t);

// Zero-mean antiderivative A(t) with dA/dt = -E(t):
//   A(t) = -[e1/omega sin(omega(t-t0)) + e2/(2 omega) sin(2 omega(t-t0)+theta)].
double vector_potential(const DrivingField& f, double t);

// Closed form of the integral of A over [t1, t2].
double vector_potential_integral(const DrivingField& f, double t1, double t2);

// Closed form of the integral of A^2 over [t1, t2].
double vector_potential_squared_integral(const DrivingField& f, double t1, double t2);

// Closed form of the integral of E over [t1, t2], i.e. A(t1) - A(t2).
double field_integral(const DrivingField& f, double t1, double t2);

double flashing_shape(const FlashingPotential& u, double x);
double flashing_shape_derivative(const FlashingPotential& u, double x);

// Tilting: 1 + cos x.  Flashing: U(x) E(t).
double potential_value(const RatchetSystem& sys, double x, double t);

// Classical force -dV/dx; for the tilting variant this includes the
// external field, sin x + E(t).
double classical_force(const RatchetSystem& sys, double x, double t);

// Grid resolution and tolerance used by the symmetry predicates.
inline constexpr int kSymmetryGrid = 4096;
inline constexpr double kSymmetryTolerance = 1e-10;

// E(t) = -E(t + T/2) on a dense grid.
bool check_shift_symmetry(const DrivingField& f);

// Returns t_s in [t0, t0 + T/2) with E(t_s + u) = E(t_s - u), if any.
std::optional<double> check_time_reversal(const DrivingField& f);

// Returns t_s in [t0, t0 + T/2) with E(t_s + u) = -E(t_s - u), if any.
std::optional<double> check_time_antisymmetry(const DrivingField& f);

enum class FlashingSymmetry { kS1, kS2, kS3, kS4 };

std::string to_string(FlashingSymmetry s);

// Evaluates the four classical symmetry conditions of the flashing ratchet.
// Throws InvalidArgument unless sys.variant == kFlashing.
std::set<FlashingSymmetry> check_flashing_symmetries(const RatchetSystem& sys);

}  // namespace qratchet
