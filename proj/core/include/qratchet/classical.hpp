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

#include <cstdint>
#include <string>
#include <vector>

#include "qratchet/model.hpp"

namespace qratchet {

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

// Advances pt from time t by n_steps steps of size dt (dt may be negative)
// with a fourth-order symplectic composition. Time advances with the drift.
void integrate_classical(const RatchetSystem& sys, PhasePoint& pt, double t, double dt, long n_steps);

inline constexpr int kClassicalSteps = 4096;

// Strobes (x mod 2 pi, p) at t_start + mT, m = 1..n_periods, for each
// initial point in turn.
std::vector<PhasePoint> poincare_section(const RatchetSystem& sys,
                                         const std::vector<PhasePoint>& initial, int n_periods,
                                         int steps_per_period = kClassicalSteps,
                                         double t_start = 0.0);

// Points (x(mT) mod 2 pi, E_kin(mT)) with E_kin(mT) the mean of p^2 over
// the period ending at mT.
std::vector<PhasePoint> kinetic_energy_map(const RatchetSystem& sys,
                                           const std::vector<PhasePoint>& initial, int n_periods,
                                           int steps_per_period = kClassicalSteps,
                                           double t_start = 0.0);

struct ChaoticCurrentConfig {
  int n_particles = 1024;
  int n_periods = 5000;
  // Ensemble statistics do not need the T/4096 section step; T/64 keeps
  // the default ensemble to well under a minute.
  int steps_per_period = 64;
  std::uint64_t seed = 1;
  // Membership test: strobes over membership_periods must span more than
  // min_p_range in p, stay inside |p| < p_bound and show a finite-time
  // Lyapunov exponent (per period) above min_lyapunov.
  int membership_periods = 50;
  double min_p_range = 1.5;
  double min_lyapunov = 0.1;
  // <= 0 selects the bound from a long orbit started on the separatrix.
  double p_bound = 0.0;
  int max_attempts_factor = 20;
  int bootstrap_samples = 1000;
  int threads = 1;
};

struct ChaoticCurrent {
  double j = 0.0;
  double stderr_j = 0.0;
  int n = 0;
  int periods = 0;
  int requested = 0;
  double p_bound = 0.0;
  std::vector<double> velocities;
};

// Largest |p| on the strobes of an orbit launched next to the unstable
// point x = 0, p = 0 (tilting) or the maximum of U (flashing).
double estimate_layer_bound(const RatchetSystem& sys, int n_periods = 2000,
                            int steps_per_period = 128);

// Finite-time Lyapunov exponent per period from the tangent map.
double finite_time_lyapunov(const RatchetSystem& sys, const PhasePoint& start, int n_periods,
                            int steps_per_period);

// Ensemble average of (x(nT) - x(0)) / nT over accepted layer points.
// Throws InsufficientChaoticSamples if fewer than 10% of the requested
// particles pass the membership test.
ChaoticCurrent chaotic_current(const RatchetSystem& sys, const ChaoticCurrentConfig& cfg = {});

// Weighted least-squares fit of y = c x^b over x > 0 (weights 1/sigma^2),
// scanning b on a fine grid with c solved in closed form.
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double chi2 = 0.0;
};

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& sigma, double b_min = 0.0,
                          double b_max = 4.0);

std::string point_cloud_csv(const std::vector<PhasePoint>& pts, const std::string& second = "p");
std::string chaotic_current_json(const ChaoticCurrent& c);

}  // namespace qratchet
