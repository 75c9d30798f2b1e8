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

// qratchet: sweeps, single-point runs and figure data for the driven
// pendulum ratchet.
//
//   qratchet current  --config sys.json --theta -3.14159:3.14159 --points 33 --out run
//   qratchet spectrum --config sys.json --theta -3.14159:3.14159 --points 65 --out run
//   qratchet evolve   --config sys.json --periods 2000 --out run
//   qratchet husimi   --config sys.json --out run
//   qratchet classical --config sys.json --out run
//   qratchet figure   fig5 --out fig5
//
// Exit status: 0 on success, 2 when some scan points failed, 1 on a fatal
// error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qratchet/classical.hpp"
#include "qratchet/descriptor.hpp"
#include "qratchet/figures.hpp"
#include "qratchet/floquet.hpp"
#include "qratchet/observables.hpp"
#include "qratchet/scan.hpp"

namespace fs = std::filesystem;
using namespace qratchet;

namespace {

struct Options {
  std::string config;
  std::string theta, omega, e2, t0, hbar;
  int points = 0;
  std::string out = "qratchet_out";
  int workers = 1;
  std::string scheme;
  int steps = 0;
  int n_cut = 0;
  bool allow_low_resolution = false;
  int periods = 2000;
  int n_t0 = 16;
  int state = -1;
  int particles = 1024;
  int section_periods = 0;
  std::uint64_t seed = 1;
  std::string tag;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "JSON system descriptor");
  app->add_option("--theta", o.theta, "value or lo:hi sweep");
  app->add_option("--omega", o.omega, "value or lo:hi sweep");
  app->add_option("--e2", o.e2, "value or lo:hi sweep");
  app->add_option("--t0", o.t0, "value or lo:hi sweep");
  app->add_option("--hbar", o.hbar, "value or lo:hi sweep");
  app->add_option("--points", o.points, "number of sweep points");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--workers", o.workers, "parallel scan workers")->check(CLI::PositiveNumber);
  app->add_option("--scheme", o.scheme, "kick_split or interaction_picture");
  app->add_option("--steps", o.steps, "time steps per period");
  app->add_option("--n-cut", o.n_cut, "plane-wave cutoff N");
  app->add_flag("--allow-low-resolution", o.allow_low_resolution,
                "accept N or N_t below the convergence floors");
}

struct Sweep {
  SweepParam param;
  double lo, hi;
};

// Applies fixed overrides and returns the single swept parameter, if any.
std::optional<Sweep> apply_overrides(const Options& o, RatchetSystem& sys) {
  std::optional<Sweep> sweep;
  const auto handle = [&](const std::string& text, SweepParam p, double& field) {
    if (text.empty()) return;
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      field = std::stod(text);
      return;
    }
    if (sweep) throw InvalidArgument("only one parameter can be swept");
    sweep = Sweep{p, std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  };
  handle(o.theta, SweepParam::kTheta, sys.driving.theta);
  handle(o.omega, SweepParam::kOmega, sys.driving.omega);
  handle(o.e2, SweepParam::kE2, sys.driving.e2);
  handle(o.t0, SweepParam::kT0, sys.driving.t0);
  handle(o.hbar, SweepParam::kHbar, sys.hbar);
  return sweep;
}

struct Setup {
  RatchetSystem sys;
  PropagatorConfig cfg;
  std::optional<Sweep> sweep;
};

Setup load(const Options& o) {
  Setup s;
  std::string text = "{}";
  if (!o.config.empty()) text = read_text_file(o.config);
  s.sys = system_from_json(text);
  s.cfg = propagator_from_json(text);
  if (!o.scheme.empty()) s.cfg.scheme = scheme_from_string(o.scheme);
  if (o.steps > 0) s.cfg.steps_per_period = o.steps;
  s.sweep = apply_overrides(o, s.sys);
  if (o.n_cut > 0) s.sys.n_cut = o.n_cut;
  s.sys.validate();
  s.cfg.validate();
  if (!o.allow_low_resolution && !s.sweep) {
    if (s.sys.n_cut < minimum_n_cut(s.sys.hbar))
      throw InvalidArgument("n_cut below the floor " + std::to_string(minimum_n_cut(s.sys.hbar)) +
                            "; pass --allow-low-resolution");
    if (s.cfg.scheme == Scheme::kKickSplit && s.cfg.steps_per_period < kMinStepsPerPeriod)
      throw InvalidArgument("steps per period below 2048; pass --allow-low-resolution");
  }
  return s;
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + p.string());
  os << content;
  if (!os) throw IoError("write failed for " + p.string());
  std::cout << p.string() << "\n";
}

std::string header(const Setup& s) {
  const std::string cfg = system_to_json(s.sys);
  return provenance_line(hash_hex(config_hash(cfg)), s.sys.n_cut, s.cfg.steps_per_period);
}

void write_manifest(const Setup& s, const Options& o, const std::string& command, double wall) {
  nlohmann::json m = {{"command", command},
                      {"config", nlohmann::json::parse(system_to_json(s.sys))},
                      {"config_hash", hash_hex(config_hash(system_to_json(s.sys)))},
                      {"code_version", code_version()},
                      {"n_cut", s.sys.n_cut},
                      {"steps_per_period", s.cfg.steps_per_period},
                      {"scheme", to_string(s.cfg.scheme)},
                      {"wall_time_s", wall},
                      {"per_point_errors", nlohmann::json::array()}};
  write_file(fs::path(o.out) / "manifest.json", m.dump(2) + "\n");
}

int run_sweep(const Setup& s, const Options& o, ScanOutputs outputs) {
  ScanSpec spec;
  spec.base = s.sys;
  spec.propagator = s.cfg;
  spec.param = s.sweep->param;
  spec.lo = s.sweep->lo;
  spec.hi = s.sweep->hi;
  spec.points = o.points > 0 ? o.points : 17;
  spec.outputs = outputs;
  spec.out_dir = o.out;
  spec.workers = o.workers;
  spec.n_t0 = o.n_t0;
  spec.allow_low_resolution = o.allow_low_resolution;
  spec.classical.n_particles = o.particles;
  spec.classical.n_periods = o.periods;
  spec.classical.seed = o.seed;
  const ScanResult r = run_scan(spec);
  std::cout << "config_hash " << r.config_hash << ": " << r.computed << " computed, " << r.resumed
            << " resumed, " << r.errors << " failed\n";
  return r.errors > 0 ? 2 : 0;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

int cmd_current(const Options& o) {
  const Setup s = load(o);
  if (s.sweep) return run_sweep(s, o, {false, true, false, false});
  const auto start = std::chrono::steady_clock::now();
  const CurrentProfile prof =
      averaged_current(s.sys, s.cfg, InitialState::plane_wave_zero(), o.n_t0);
  write_file(fs::path(o.out) / "current.csv", header(s) + current_csv(s.sys.driving.theta, prof));
  std::printf("J = %.10g\n", prof.mean);
  write_manifest(s, o, "current", seconds_since(start));
  return 0;
}

int cmd_spectrum(const Options& o) {
  const Setup s = load(o);
  if (s.sweep) return run_sweep(s, o, {true, false, false, false});
  const auto start = std::chrono::steady_clock::now();
  const FloquetDecomposition dec = decompose(build_floquet_matrix(s.sys, s.cfg, 0.0, kDefaultSamples));
  const BandTrack bt = track_bands({dec}, {s.sys.driving.theta});
  write_file(fs::path(o.out) / "spectrum.csv", header(s) + spectrum_csv(bt));
  for (const auto& w : dec.warnings) std::cerr << w << "\n";
  write_manifest(s, o, "spectrum", seconds_since(start));
  return 0;
}

int cmd_evolve(const Options& o) {
  const Setup s = load(o);
  if (s.sweep) throw InvalidArgument("evolve does not take a sweep");
  const auto start = std::chrono::steady_clock::now();
  const RunningAverage ra =
      evolve_running_average(s.sys, s.cfg, InitialState::plane_wave_zero(), o.periods);
  write_file(fs::path(o.out) / "running_average.csv", header(s) + running_average_csv(ra));
  std::printf("P(%d T) = %.10g\n", o.periods, ra.p.back());
  write_manifest(s, o, "evolve", seconds_since(start));
  return 0;
}

int cmd_husimi(const Options& o) {
  const Setup s = load(o);
  if (s.sweep) return run_sweep(s, o, {false, false, true, false});
  const auto start = std::chrono::steady_clock::now();
  const FloquetDecomposition dec = decompose(build_floquet_matrix(s.sys, s.cfg, 0.0, kDefaultSamples));
  int a = o.state;
  if (a < 0) {
    const ComplexVector c = floquet_weights(dec, InitialState::plane_wave_zero());
    Eigen::Index best = 0;
    c.cwiseAbs2().maxCoeff(&best);
    a = static_cast<int>(best);
  } else {
    if (a >= dec.size()) throw InvalidArgument("--state exceeds the basis size");
    a = dec.order[static_cast<std::size_t>(a)];
  }
  WaveState ws;
  ws.coeffs = dec.states.col(a);
  ws.frame_a = s.sys.variant == Variant::kTilting ? vector_potential(s.sys.driving, 0.0) : 0.0;
  const HusimiSpec hs;
  const HusimiGrid g = husimi(ws, s.sys.hbar, hs);
  write_file(fs::path(o.out) / "husimi.csv", header(s) + husimi_csv(g));
  write_file(fs::path(o.out) / "husimi.json", husimi_header_json(g, hs));
  std::printf("state %d: quasienergy %.10g, <p> %.10g\n", a, dec.quasienergies(a),
              dec.mean_momentum(a));
  write_manifest(s, o, "husimi", seconds_since(start));
  return 0;
}

int cmd_classical(const Options& o) {
  const Setup s = load(o);
  if (s.sweep) return run_sweep(s, o, {false, false, false, true});
  const auto start = std::chrono::steady_clock::now();
  ChaoticCurrentConfig cc;
  cc.n_particles = o.particles;
  cc.n_periods = o.periods;
  cc.seed = o.seed;
  const ChaoticCurrent c = chaotic_current(s.sys, cc);
  write_file(fs::path(o.out) / "classical.json", chaotic_current_json(c));
  if (o.section_periods > 0) {
    std::vector<PhasePoint> seeds;
    for (int k = 0; k < 41; ++k) seeds.push_back({0.0, -4.0 + 0.2 * k});
    write_file(fs::path(o.out) / "poincare.csv",
               point_cloud_csv(poincare_section(s.sys, seeds, o.section_periods)));
  }
  std::printf("J_ch = %.6g +- %.6g (%d particles)\n", c.j, c.stderr_j, c.n);
  write_manifest(s, o, "classical", seconds_since(start));
  return 0;
}

int cmd_figure(const Options& o) {
  FigureOptions fo;
  fo.points = o.points;
  fo.workers = o.workers;
  if (!o.scheme.empty()) fo.scheme = scheme_from_string(o.scheme);
  if (o.steps > 0) fo.steps_per_period = o.steps;
  fo.periods = o.periods;
  fo.allow_low_resolution = o.allow_low_resolution;
  const FigureResult r = reproduce_figure(figure_from_string(o.tag), o.out, fo);
  for (const auto& f : r.files) std::cout << f << "\n";
  return r.point_errors > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet simulator for the two-harmonic driven pendulum ratchet"};
  app.require_subcommand(1);
  Options o;

  auto* current = app.add_subcommand("current", "asymptotic current, averaged over t0");
  add_common(current, o);
  current->add_option("--n-t0", o.n_t0, "t0 grid size for the average")->check(CLI::Range(8, 4096));

  auto* spectrum = app.add_subcommand("spectrum", "quasienergy bands, mean momenta, crossings");
  add_common(spectrum, o);

  auto* evolve = app.add_subcommand("evolve", "running average P(t) from direct evolution");
  add_common(evolve, o);
  evolve->add_option("--periods", o.periods, "number of periods")->check(CLI::PositiveNumber);

  auto* hus = app.add_subcommand("husimi", "Husimi density of a Floquet state");
  add_common(hus, o);
  hus->add_option("--state", o.state, "kinetic rank of the state (default: largest |0> weight)");

  auto* classical = app.add_subcommand("classical", "chaotic-layer current of the classical limit");
  add_common(classical, o);
  classical->add_option("--periods", o.periods, "periods per trajectory")->check(CLI::PositiveNumber);
  classical->add_option("--particles", o.particles, "ensemble size")->check(CLI::PositiveNumber);
  classical->add_option("--seed", o.seed, "random seed");
  classical->add_option("--section", o.section_periods, "also write a Poincare section over this many periods");

  auto* figure = app.add_subcommand("figure", "canned figure data");
  add_common(figure, o);
  figure->add_option("tag", o.tag, "fig2 | fig4 | fig5 | fig8 | fig9 | fig10")->required();
  figure->add_option("--periods", o.periods, "running-average length for fig9");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*current) return cmd_current(o);
    if (*spectrum) return cmd_spectrum(o);
    if (*evolve) return cmd_evolve(o);
    if (*hus) return cmd_husimi(o);
    if (*classical) return cmd_classical(o);
    if (*figure) return cmd_figure(o);
  } catch (const std::exception& e) {
    std::cerr << "qratchet: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
