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

#include "qratchet/figures.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "qratchet/classical.hpp"
#include "qratchet/descriptor.hpp"
#include "qratchet/floquet.hpp"
#include "qratchet/observables.hpp"
#include "qratchet/scan.hpp"

namespace qratchet {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

RatchetSystem tilting(double e1, double e2, double omega, double theta, double hbar = 0.2) {
  RatchetSystem s;
  s.variant = Variant::kTilting;
  s.driving = {e1, e2, omega, theta, 0.0};
  s.hbar = hbar;
  s.n_cut = minimum_n_cut(hbar);
  return s;
}

RatchetSystem fig10_system() {
  RatchetSystem s;
  s.variant = Variant::kFlashing;
  s.driving = {2.0, 1.5, 1.0, -kPi / 2, 0.0};
  s.potential = {1.5, 0.25, kPi / 2};
  s.hbar = 1.0;
  s.n_cut = 32;
  return s;
}

PropagatorConfig config_of(const FigureOptions& o) {
  PropagatorConfig c;
  c.scheme = o.scheme;
  c.steps_per_period = o.steps_per_period;
  return c;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& s, FigureResult& res) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + p.string());
  os << s;
  if (!os) throw IoError("write failed for " + p.string());
  res.files.push_back(p.string());
}

json scan_entry(const ScanSpec& spec, const ScanResult& r) {
  return {{"system", json::parse(system_to_json(spec.base))},
          {"sweep", to_string(spec.param)},
          {"lo", spec.lo},
          {"hi", spec.hi},
          {"points", spec.points},
          {"config_hash", r.config_hash},
          {"dir", spec.out_dir}};
}

ScanSpec make_scan(const RatchetSystem& base, SweepParam p, double lo, double hi, int points,
                   const fs::path& dir, const FigureOptions& o) {
  ScanSpec s;
  s.base = base;
  s.propagator = config_of(o);
  s.param = p;
  s.lo = lo;
  s.hi = hi;
  s.points = points;
  s.out_dir = dir.string();
  s.workers = o.workers;
  s.allow_low_resolution = o.allow_low_resolution;
  return s;
}

void collect(const ScanSpec& spec, ScanResult r, FigureResult& res, json& panels,
             const std::string& name) {
  for (const char* f : {"current.csv", "current_avg.csv", "spectrum.csv", "crossings.json",
                        "manifest.json"}) {
    const fs::path p = fs::path(spec.out_dir) / f;
    if (fs::exists(p)) res.files.push_back(p.string());
  }
  res.point_errors += r.errors;
  panels[name] = scan_entry(spec, r);
}

}  // namespace

std::string to_string(FigureTag tag) {
  switch (tag) {
    case FigureTag::kFig2: return "fig2";
    case FigureTag::kFig4: return "fig4";
    case FigureTag::kFig5: return "fig5";
    case FigureTag::kFig8: return "fig8";
    case FigureTag::kFig9: return "fig9";
    case FigureTag::kFig10: return "fig10";
  }
  return "?";
}

FigureTag figure_from_string(const std::string& s) {
  for (FigureTag t : {FigureTag::kFig2, FigureTag::kFig4, FigureTag::kFig5, FigureTag::kFig8,
                      FigureTag::kFig9, FigureTag::kFig10})
    if (to_string(t) == s) return t;
  throw InvalidArgument("unknown figure tag: " + s);
}

FigureResult reproduce_figure(FigureTag tag, const std::string& out_dir,
                              const FigureOptions& o) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  FigureResult res;
  json panels = json::object();
  const auto pts = [&](int def) { return o.points > 0 ? o.points : def; };

  switch (tag) {
    case FigureTag::kFig2: {
      // theta in (-pi, pi]: the left end is excluded.
      const int n = pts(64);
      ScanSpec s = make_scan(tilting(2, 2, 2, 0), SweepParam::kTheta, -kPi + kTwoPi / n, kPi, n,
                             dir / "spectrum", o);
      s.outputs.spectrum = true;
      s.outputs.current = false;
      collect(s, run_scan(s), res, panels, "spectrum");
      break;
    }
    case FigureTag::kFig4: {
      const RatchetSystem sys = tilting(2, 2, 2, -kPi / 2);
      const FloquetDecomposition dec = decompose(build_floquet_matrix(sys, config_of(o), 0.0, 64));
      const std::vector<double> cum = cumulative_momentum(dec);
      std::string s = "alpha,kinetic,P\n";
      for (std::size_t k = 0; k < cum.size(); ++k) {
        const int a = dec.order[std::min<std::size_t>(2 * k, dec.order.size() - 1)];
        s += std::to_string(2 * k) + "," + num(dec.kinetic(a)) + "," + num(cum[k]) + "\n";
      }
      write_file(dir / "cumulative_momentum.csv", s, res);
      std::vector<PhasePoint> seeds;
      const int n = pts(41);
      for (int k = 0; k < n; ++k) seeds.push_back({0.0, -4.0 + 8.0 * k / (n - 1)});
      const auto emap = kinetic_energy_map(sys, seeds, 500);
      write_file(dir / "kinetic_energy.csv", point_cloud_csv(emap, "ekin"), res);
      panels["quantum"] = {{"system", json::parse(system_to_json(sys))}};
      panels["classical"] = {{"seeds", n}, {"periods", 500}};
      break;
    }
    case FigureTag::kFig5: {
      ScanSpec s = make_scan(tilting(2, 2, 2, 0), SweepParam::kTheta, -kPi, kPi, pts(65),
                             dir / "current", o);
      collect(s, run_scan(s), res, panels, "current");
      break;
    }
    case FigureTag::kFig8: {
      ScanSpec w = make_scan(tilting(3, 1.5, 1, -kPi / 2), SweepParam::kOmega, 0.5, 4.0, pts(36),
                             dir / "omega", o);
      collect(w, run_scan(w), res, panels, "omega");
      ScanSpec t = make_scan(tilting(3, 1.5, 1, 0), SweepParam::kTheta, -kPi / 2, 0.0, pts(17),
                             dir / "theta", o);
      collect(t, run_scan(t), res, panels, "theta");
      break;
    }
    case FigureTag::kFig9: {
      struct Run {
        const char* name;
        RatchetSystem sys;
      };
      std::vector<Run> runs;
      for (double frac : {0.0, 0.25, 0.5}) {
        RatchetSystem s = tilting(3.26, 1, 3, -kPi / 2);
        s.driving.t0 = frac * s.driving.period();
        runs.push_back({frac == 0.0 ? "on_t0_0" : frac == 0.25 ? "on_t0_quarter" : "on_t0_half", s});
      }
      runs.push_back({"off", tilting(3.26, 1, 3, -2.2)});
      runs.push_back({"omega1", tilting(3, 1.5, 1, -kPi / 2)});
      for (const auto& r : runs) {
        const RunningAverage ra =
            evolve_running_average(r.sys, config_of(o), InitialState::plane_wave_zero(), o.periods);
        write_file(dir / (std::string("running_") + r.name + ".csv"), running_average_csv(ra), res);
        panels[r.name] = {{"system", json::parse(system_to_json(r.sys))}, {"periods", o.periods}};
      }
      break;
    }
    case FigureTag::kFig10: {
      ScanSpec s = make_scan(fig10_system(), SweepParam::kTheta, -kPi, 0.0, pts(33),
                             dir / "current", o);
      s.n_t0 = 32;
      collect(s, run_scan(s), res, panels, "current");
      const CurrentProfile prof =
          averaged_current(fig10_system(), config_of(o), InitialState::plane_wave_zero(), 32);
      write_file(dir / "current_t0.csv", current_csv(-kPi / 2, prof), res);
      panels["t0_profile"] = {{"system", json::parse(system_to_json(fig10_system()))},
                              {"n_t0", 32}};
      break;
    }
  }

  json manifest = {{"figure", to_string(tag)},
                   {"code_version", code_version()},
                   {"scheme", to_string(o.scheme)},
                   {"steps_per_period", o.steps_per_period},
                   {"panels", panels}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n", res);
  return res;
}

}  // namespace qratchet
