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

#include "qratchet/common.hpp"
#include "qratchet/model.hpp"

namespace qratchet {

enum class Scheme : std::uint8_t { kKickSplit = 0, kInteractionPicture = 1 };

// Operator ordering used by the kick-split scheme.
//   kFourth: symmetric fourth-order composition of exact kinetic and
//            potential sub-flows (default).
//   kFirst:  one kinetic and one potential factor per step, A frozen at
//            the start of the step.
enum class SplitOrder { kFourth, kFirst };

struct PropagatorConfig {
  int steps_per_period = 2048;
  Scheme scheme = Scheme::kKickSplit;
  double ode_tolerance = 1e-11;
  SplitOrder split_order = SplitOrder::kFourth;
  // Keeps the A(t)^2 phase in the tilting kinetic factor. It only adds a
  // global phase, so it is off by default.
  bool keep_a_squared = false;
  // Column blocks evolved concurrently.
  int threads = 1;

  // Throws InvalidArgument unless steps_per_period >= 64,
  // ode_tolerance in (0, 1e-4] and threads >= 1.
  void validate() const;
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// Spatial operator tables for the kick-split scheme. For the tilting
// variant m is the tridiagonal cos x / hbar matrix and q is real; for the
// flashing variant m is the pentadiagonal Hermitian U(x) / hbar matrix.
struct KickSplitTables {
  ComplexMatrix m;
  ComplexMatrix q;
  RealVector vtilde;

  static KickSplitTables build(const RatchetSystem& sys);
  // max |M - Q diag(vtilde) Q^dagger|.
  double reconstruction_error() const;
};

// Time evolution of plane-wave coefficients in the gauge frame. Times are
// absolute; the drive phase is carried by sys.driving.t0.
class Propagator {
 public:
  Propagator(const RatchetSystem& sys, const PropagatorConfig& cfg);

  const RatchetSystem& system() const noexcept { return sys_; }
  const PropagatorConfig& config() const noexcept { return cfg_; }
  const KickSplitTables& tables() const noexcept { return tables_; }
  double time_step() const noexcept;

  // Advances every column of `block` from t1 to t2 >= t1. For the kick-split
  // scheme t2 - t1 must be a whole number of steps.
  void evolve(ComplexMatrix& block, double t1, double t2) const;
  WaveState evolve(const WaveState& state, double t2) const;

  // One kick-split step [t, t + dt] applied to every column.
  void kick_split_step(ComplexMatrix& block, double t) const;
  // Interaction-picture integration over [t, t + dt].
  void interaction_picture_step(ComplexMatrix& block, double t, double dt) const;

 private:
  void evolve_serial(ComplexMatrix& block, double t1, double t2) const;
  void apply_kinetic(ComplexMatrix& block, double t1, double t2) const;
  void apply_potential(ComplexMatrix& block, double t1, double t2, int slot) const;
  void apply_first_order_step(ComplexMatrix& block, double t) const;

  RatchetSystem sys_;
  PropagatorConfig cfg_;
  KickSplitTables tables_;
  RealVector n_;
  // Tilting potential flows exp(-i c dt M) for the composition weights.
  std::vector<ComplexMatrix> tilting_flows_;
};

WaveState step_kick_split(const WaveState& state, const RatchetSystem& sys,
                          const PropagatorConfig& cfg, double t_k);
WaveState step_interaction_picture(const WaveState& state, const RatchetSystem& sys,
                                   const PropagatorConfig& cfg, double t, double dt);

// One-period propagator U(t_start + T, t_start).
struct FloquetMatrix {
  ComplexMatrix u;
  double t_start = 0.0;
  RatchetSystem system;
  PropagatorConfig config;
  // Optional U(t_start + j T / n, t_start) for j = 0..n-1.
  std::vector<ComplexMatrix> checkpoints;

  double period() const noexcept { return system.driving.period(); }
};

// max |U^dagger U - I|.
double unitarity_defect(const ComplexMatrix& u);

inline constexpr double kUnitarityLimit = 1e-6;

// Integrates the 2N+1 basis states over one period. With n_checkpoints > 0
// the intermediate propagators are stored; for the kick-split scheme
// n_checkpoints must divide steps_per_period.
// Throws UnitarityViolation when unitarity_defect >= 1e-6.
FloquetMatrix build_floquet_matrix(const RatchetSystem& sys, const PropagatorConfig& cfg,
                                   double t_start = 0.0, int n_checkpoints = 0);

// Propagator U(t2, t1) for an arbitrary interval.
ComplexMatrix evolution_matrix(const RatchetSystem& sys, const PropagatorConfig& cfg,
                               double t1, double t2);

// Binary cache format: eight 8-byte header fields (magic, version, dim,
// hbar, omega, theta, drive phase t0, scheme) followed by row-major (re, im)
// little-endian doubles.
void write_floquet_matrix(const std::string& path, const FloquetMatrix& fm);
FloquetMatrix read_floquet_matrix(const std::string& path);

}  // namespace qratchet
