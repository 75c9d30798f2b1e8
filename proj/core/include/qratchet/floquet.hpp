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
#include <string>
#include <vector>

#include "qratchet/common.hpp"
#include "qratchet/propagator.hpp"

namespace qratchet {

// Eigenstates of a one-period propagator. Column a of `states` is b_a in the
// plane-wave basis; momenta are physical (hbar n - A) and in the units of
// the Hamiltonian.
struct FloquetDecomposition {
  RealVector quasienergies;
  ComplexMatrix states;
  // Period averages over the sampling sub-times.
  RealVector mean_momentum;
  RealVector kinetic;
  // hbar <n> - A(t_start) at the strobe.
  RealVector strobe_momentum;
  // Permutation that sorts states by kinetic ascending.
  std::vector<int> order;
  // Groups of states whose eigenphases lie within kDegeneracyGap, and for
  // each group the period-averaged momentum matrix
  //   M_ab = mean_j <psi_a(t_j)| hbar n - A(t_j) |psi_b(t_j)>.
  // Off-diagonal elements inside a group do not dephase, so currents use
  // these blocks rather than the diagonal alone.
  std::vector<std::vector<int>> clusters;
  std::vector<ComplexMatrix> cluster_momentum;
  double t_start = 0.0;
  double hbar = 0.2;
  int n_cut = 0;
  bool symmetric_strobe = false;
  double eigen_residual = 0.0;
  double orthonormality_defect = 0.0;
  std::vector<std::string> warnings;

  int size() const noexcept { return static_cast<int>(quasienergies.size()); }
};

inline constexpr int kDefaultSamples = 64;
inline constexpr double kDegeneracyGap = 1e-9;
inline constexpr double kSymmetricStrobeTolerance = 1e-7;
// Doublet gap below which partners are re-separated at symmetric strobes.
inline constexpr double kSymmetricPairGap = 1e-6;

// Diagonalizes fm.u. Momenta are sampled on fm.checkpoints when present,
// otherwise kDefaultSamples checkpoints are rebuilt from fm.system and
// fm.config. Throws Error when the eigen residual exceeds 1e-7 or an
// eigenvalue modulus deviates from 1 by 1e-8 or more.
FloquetDecomposition decompose(const FloquetMatrix& fm);

// max |u_{n,m} - u_{-m,-n}|; zero when U equals its codiagonal transpose.
double check_timereversal_property(const ComplexMatrix& u);

// max |U - (P U_h P) U_h| where P is the parity n -> -n and U_h the
// half-period propagator.
double check_shift_property(const ComplexMatrix& u_full, const ComplexMatrix& u_half);

// Pairwise recursion over the kinetic ordering:
//   P_0 = <p>_0, P_{a+2} = P_a + <p>_{a+1} + <p>_{a+2}.
// Returns P_0, P_2, P_4, ...; the last value is the full sum when the
// number of states is odd.
std::vector<double> cumulative_momentum(const FloquetDecomposition& dec);

// Bands followed across a parameter grid. state_index[k][b] is the column
// of band b at grid point k; band ids follow the kinetic ordering at the
// first point.
struct BandTrack {
  std::vector<double> params;
  std::vector<std::vector<int>> state_index;
  std::vector<std::vector<double>> quasienergy;
  std::vector<std::vector<double>> mean_momentum;
  std::vector<std::vector<double>> kinetic;
  // |<phi_b(k-1)|phi_b(k)>|; 1 at k = 0.
  std::vector<std::vector<double>> overlap;

  int bands() const noexcept {
    return state_index.empty() ? 0 : static_cast<int>(state_index.front().size());
  }
};

inline constexpr double kMinTrackingOverlap = 0.5;

// Greedy matching by descending overlap, ties broken by quasienergy
// proximity. With `bands` set only those band ids (kinetic ranks at the
// first point) are followed. Throws TrackingAmbiguity when a matched
// overlap is <= 0.5.
BandTrack track_bands(const std::vector<FloquetDecomposition>& scan,
                      const std::vector<double>& params,
                      const std::optional<std::vector<int>>& bands = std::nullopt);

struct AvoidedCrossing {
  double param = 0.0;
  int band_a = 0;
  int band_b = 0;
  double gap = 0.0;
  double refined_param = 0.0;
};

// Interior local minima of the circular gap between every band pair that
// fall below gap_threshold. `gap` is the grid minimum, `refined_param` the
// vertex of a parabola through the three surrounding points.
std::vector<AvoidedCrossing> find_avoided_crossings(const BandTrack& bt, double gap_threshold);

// Spectrum CSV: scan_param, band_id, quasienergy, mean_p, mean_p2,
// overlap_with_prev.
std::string spectrum_csv(const BandTrack& bt);
std::string crossings_json(const std::vector<AvoidedCrossing>& crossings);

}  // namespace qratchet
