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

#include "qratchet/classical.hpp"
#include "qratchet/floquet.hpp"
#include "qratchet/model.hpp"
#include "qratchet/observables.hpp"
#include "qratchet/propagator.hpp"

namespace qratchet {

enum class SweepParam { kTheta, kOmega, kE2, kT0, kHbar };

std::string to_string(SweepParam p);
SweepParam sweep_from_string(const std::string& s);

struct ScanOutputs {
  bool spectrum = false;
  bool current = true;
  bool husimi = false;
  bool classical = false;
};

// Resolution floor applied unless allow_low_resolution is set.
int minimum_n_cut(double hbar);
inline constexpr int kMinStepsPerPeriod = 2048;

struct ScanSpec {
  RatchetSystem base;
  PropagatorConfig propagator;
  SweepParam param = SweepParam::kTheta;
  double lo = 0.0;
  double hi = 0.0;
  int points = 2;
  ScanOutputs outputs;
  std::string out_dir = "scan_out";
  int workers = 1;
  // t0 grid for the averaged current (ignored for t0 sweeps).
  int n_t0 = 16;
  double gap_threshold = 0.05;
  bool allow_low_resolution = false;
  HusimiSpec husimi;
  ChaoticCurrentConfig classical;
  // Stop after this many newly computed points (< 0: no limit). Lets
  // callers interrupt a scan deterministically.
  int max_new_points = -1;

  // Throws InvalidArgument on an empty range, fewer than two points, a
  // sweep that does not apply to the variant or a resolution below the
  // floor without allow_low_resolution.
  void validate() const;
  std::vector<double> values() const;
  RatchetSystem system_at(double value) const;
  // Canonical JSON of everything that determines the results; out_dir,
  // workers and max_new_points are excluded.
  std::string to_json() const;
};

struct PointRecord {
  int index = 0;
  double value = 0.0;
  bool ok = false;
  std::string error;
  // Averaged current (or J at the swept t0) and its t0 profile.
  double j = 0.0;
  std::vector<double> t0;
  std::vector<double> j_t0;
  std::optional<FloquetDecomposition> spectrum;
  std::optional<ChaoticCurrent> classical;
};

struct ScanResult {
  std::vector<PointRecord> points;
  std::string config_hash;
  int computed = 0;
  int resumed = 0;
  int errors = 0;
  bool complete = false;
  double wall_time_s = 0.0;
};

// Computes every point not already stored under out_dir/points, then
// assembles the CSV/JSON outputs and manifest.json once all points exist.
// Per-point failures are recorded; IoError is fatal.
ScanResult run_scan(const ScanSpec& spec);

// First line of every CSV output.
std::string provenance_line(const std::string& hash, int n_cut, int steps_per_period);

std::string code_version();

}  // namespace qratchet
