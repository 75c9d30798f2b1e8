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

#include "qratchet/scan.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "json.hpp"
#include "qratchet/descriptor.hpp"

#ifndef QRATCHET_VERSION
#define QRATCHET_VERSION "unknown"
#endif

namespace qratchet {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + tmp.string());
    os << content;
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string point_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%05d", index);
  return buf;
}

std::vector<double> to_vector(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

RealVector from_vector(const std::vector<double>& v) {
  RealVector r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Eigen::Index>(i)) = v[i];
  return r;
}

void set_kinetic_order(FloquetDecomposition& d) {
  d.order.resize(d.size());
  std::iota(d.order.begin(), d.order.end(), 0);
  std::stable_sort(d.order.begin(), d.order.end(),
                   [&](int a, int b) { return d.kinetic(a) < d.kinetic(b); });
}

// State with the largest weight on the initial plane wave.
int dominant_state(const FloquetDecomposition& dec) {
  const ComplexVector c = floquet_weights(dec, InitialState::plane_wave_zero());
  Eigen::Index best = 0;
  c.cwiseAbs2().maxCoeff(&best);
  return static_cast<int>(best);
}

PointRecord compute_point(const ScanSpec& spec, int index, double value, const fs::path& dir) {
  PointRecord rec;
  rec.index = index;
  rec.value = value;
  const RatchetSystem sys = spec.system_at(value);
  PropagatorConfig cfg = spec.propagator;
  cfg.threads = 1;
  const InitialState init = InitialState::plane_wave_zero();
  const bool quantum = spec.outputs.current || spec.outputs.spectrum || spec.outputs.husimi;
  if (quantum) {
    std::optional<FloquetDecomposition> at_base;
    if (spec.param == SweepParam::kT0) {
      const FloquetMatrix fm = build_floquet_matrix(sys, cfg, 0.0, kDefaultSamples);
      FloquetDecomposition dec = decompose(fm);
      rec.j = asymptotic_current_floquet(dec, init);
      rec.t0 = {sys.driving.t0};
      rec.j_t0 = {rec.j};
      at_base = std::move(dec);
    } else {
      RatchetSystem ref = sys;
      ref.driving.t0 = 0.0;
      int ns = spec.n_t0;
      while (ns < kDefaultSamples) ns += spec.n_t0;
      const FloquetMatrix fm = build_floquet_matrix(ref, cfg, 0.0, ns);
      FloquetDecomposition dec = decompose(fm);
      if (spec.outputs.current) {
        const CurrentProfile prof = current_profile(fm, dec, init, spec.n_t0);
        rec.j = prof.mean;
        rec.t0 = prof.t0;
        rec.j_t0 = prof.j;
      }
      if (spec.outputs.spectrum || spec.outputs.husimi) {
        if (sys.driving.t0 == 0.0)
          at_base = std::move(dec);
        else
          at_base = decompose(build_floquet_matrix(sys, cfg, 0.0, kDefaultSamples));
      }
    }
    if (spec.outputs.husimi && at_base) {
      const int a = dominant_state(*at_base);
      WaveState ws;
      ws.coeffs = at_base->states.col(a);
      ws.time = 0.0;
      ws.frame_a = sys.variant == Variant::kTilting ? vector_potential(sys.driving, 0.0) : 0.0;
      const HusimiGrid g = husimi(ws, sys.hbar, spec.husimi);
      fs::create_directories(dir / "husimi");
      write_atomic(dir / "husimi" / (point_stem(index) + ".csv"), husimi_csv(g));
      write_atomic(dir / "husimi" / (point_stem(index) + ".json"), husimi_header_json(g, spec.husimi));
    }
    if (spec.outputs.spectrum) rec.spectrum = std::move(at_base);
  }
  if (spec.outputs.classical) rec.classical = chaotic_current(sys, spec.classical);
  rec.ok = true;
  return rec;
}

json record_to_json(const PointRecord& r, const std::string& hash) {
  json j = {{"index", r.index}, {"value", r.value}, {"config_hash", hash},
            {"ok", r.ok},       {"error", r.error}, {"J", r.j},
            {"t0", r.t0},       {"J_t0", r.j_t0}};
  if (r.spectrum) {
    j["spectrum"] = {{"quasienergies", to_vector(r.spectrum->quasienergies)},
                     {"mean_p", to_vector(r.spectrum->mean_momentum)},
                     {"kinetic", to_vector(r.spectrum->kinetic)},
                     {"n_cut", r.spectrum->n_cut},
                     {"hbar", r.spectrum->hbar}};
  }
  if (r.classical)
    j["classical"] = {{"J_ch", r.classical->j}, {"stderr", r.classical->stderr_j},
                      {"n", r.classical->n},    {"periods", r.classical->periods}};
  return j;
}

PointRecord record_from_json(const json& j, const fs::path& states_path) {
  PointRecord r;
  r.index = j.at("index").get<int>();
  r.value = j.at("value").get<double>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.j = j.at("J").get<double>();
  r.t0 = j.at("t0").get<std::vector<double>>();
  r.j_t0 = j.at("J_t0").get<std::vector<double>>();
  if (j.contains("spectrum")) {
    const json& s = j.at("spectrum");
    FloquetDecomposition d;
    d.quasienergies = from_vector(s.at("quasienergies").get<std::vector<double>>());
    d.mean_momentum = from_vector(s.at("mean_p").get<std::vector<double>>());
    d.kinetic = from_vector(s.at("kinetic").get<std::vector<double>>());
    d.n_cut = s.at("n_cut").get<int>();
    d.hbar = s.at("hbar").get<double>();
    d.states = read_floquet_matrix(states_path.string()).u;
    set_kinetic_order(d);
    r.spectrum = std::move(d);
  }
  if (j.contains("classical")) {
    const json& c = j.at("classical");
    ChaoticCurrent cc;
    cc.j = c.at("J_ch").get<double>();
    cc.stderr_j = c.at("stderr").get<double>();
    cc.n = c.at("n").get<int>();
    cc.periods = c.at("periods").get<int>();
    r.classical = cc;
  }
  return r;
}

std::optional<PointRecord> load_point(const fs::path& dir, int index, const std::string& hash) {
  const fs::path p = dir / "points" / (point_stem(index) + ".json");
  if (!fs::exists(p)) return std::nullopt;
  try {
    const json j = json::parse(read_text_file(p.string()));
    if (j.at("config_hash").get<std::string>() != hash) return std::nullopt;
    return record_from_json(j, dir / "points" / (point_stem(index) + ".states.bin"));
  } catch (const json::exception&) {
    return std::nullopt;
  } catch (const IoError&) {
    return std::nullopt;
  }
}

void store_point(const fs::path& dir, const PointRecord& r, const std::string& hash) {
  if (r.spectrum) {
    FloquetMatrix fm;
    fm.u = r.spectrum->states;
    fm.system.hbar = r.spectrum->hbar;
    fm.system.n_cut = r.spectrum->n_cut;
    const fs::path bin = dir / "points" / (point_stem(r.index) + ".states.bin");
    write_floquet_matrix(bin.string() + ".tmp", fm);
    std::error_code ec;
    fs::rename(bin.string() + ".tmp", bin, ec);
    if (ec) throw IoError("cannot rename " + bin.string());
  }
  write_atomic(dir / "points" / (point_stem(r.index) + ".json"), record_to_json(r, hash).dump(1) + "\n");
}

void assemble(const ScanSpec& spec, const ScanResult& res, const fs::path& dir) {
  const std::string prov =
      provenance_line(res.config_hash, spec.base.n_cut, spec.propagator.steps_per_period);
  const std::string pname = to_string(spec.param);
  const bool theta_like = spec.param == SweepParam::kTheta || spec.param == SweepParam::kT0;
  if (spec.outputs.current) {
    std::string full = prov + (theta_like ? "theta,t0,J\n" : "scan_param,theta,t0,J\n");
    std::string avg = prov + "scan_param,J\n";
    for (const auto& r : res.points) {
      if (!r.ok) continue;
      const double theta = spec.param == SweepParam::kTheta ? r.value : spec.base.driving.theta;
      for (std::size_t k = 0; k < r.t0.size(); ++k)
        full += (theta_like ? "" : num(r.value) + ",") + num(theta) + "," + num(r.t0[k]) + "," +
                num(r.j_t0[k]) + "\n";
      avg += num(r.value) + "," + num(r.j) + "\n";
    }
    write_atomic(dir / "current.csv", full);
    write_atomic(dir / "current_avg.csv", avg);
  }
  if (spec.outputs.spectrum) {
    std::vector<FloquetDecomposition> decs;
    std::vector<double> params;
    for (const auto& r : res.points) {
      if (!r.ok || !r.spectrum) continue;
      decs.push_back(*r.spectrum);
      params.push_back(r.value);
    }
    std::string tracking = "ok";
    BandTrack bt;
    bool tracked = false;
    if (!decs.empty()) {
      try {
        bt = track_bands(decs, params);
        tracked = true;
      } catch (const TrackingAmbiguity& e) {
        tracking = e.what();
      }
      if (!tracked) {
        // Fall back to kinetic ranks; overlaps are marked -1.
        bt = BandTrack{};
        bt.params = params;
        for (const auto& d : decs) {
          std::vector<int> idx(d.order.begin(), d.order.end());
          std::vector<double> e, p, p2;
          for (int a : idx) {
            e.push_back(d.quasienergies(a));
            p.push_back(d.mean_momentum(a));
            p2.push_back(d.kinetic(a));
          }
          bt.state_index.push_back(idx);
          bt.quasienergy.push_back(e);
          bt.mean_momentum.push_back(p);
          bt.kinetic.push_back(p2);
          bt.overlap.push_back(std::vector<double>(idx.size(), -1.0));
        }
      }
    }
    write_atomic(dir / "spectrum.csv", prov + spectrum_csv(bt));
    json cj = json::parse(crossings_json(tracked ? find_avoided_crossings(bt, spec.gap_threshold)
                                                 : std::vector<AvoidedCrossing>{}));
    json wrapped = {{"config_hash", res.config_hash}, {"tracking", tracking}, {"crossings", cj}};
    write_atomic(dir / "crossings.json", wrapped.dump(2) + "\n");
  }
  if (spec.outputs.classical) {
    std::string s = prov + "scan_param,J_ch,stderr,n,periods\n";
    for (const auto& r : res.points) {
      if (!r.ok || !r.classical) continue;
      s += num(r.value) + "," + num(r.classical->j) + "," + num(r.classical->stderr_j) + "," +
           std::to_string(r.classical->n) + "," + std::to_string(r.classical->periods) + "\n";
    }
    write_atomic(dir / "classical.csv", s);
  }
}

}  // namespace

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kTheta: return "theta";
    case SweepParam::kOmega: return "omega";
    case SweepParam::kE2: return "e2";
    case SweepParam::kT0: return "t0";
    case SweepParam::kHbar: return "hbar";
  }
  return "?";
}

SweepParam sweep_from_string(const std::string& s) {
  for (SweepParam p : {SweepParam::kTheta, SweepParam::kOmega, SweepParam::kE2, SweepParam::kT0,
                       SweepParam::kHbar})
    if (to_string(p) == s) return p;
  throw InvalidArgument("unknown sweep parameter: " + s);
}

int minimum_n_cut(double hbar) { return static_cast<int>(std::ceil(12.8 / hbar - 1e-9)); }

void ScanSpec::validate() const {
  base.validate();
  propagator.validate();
  if (points < 2) throw InvalidArgument("a scan needs at least two points");
  if (!(hi != lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument("scan range is empty");
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  if (n_t0 < 8 && param != SweepParam::kT0) throw InvalidArgument("n_t0 must be >= 8");
  if (param == SweepParam::kOmega && (lo <= 0.0 || hi <= 0.0))
    throw InvalidArgument("omega range must be positive");
  if (param == SweepParam::kHbar && (lo <= 0.0 || hi <= 0.0))
    throw InvalidArgument("hbar range must be positive");
  if (!outputs.spectrum && !outputs.current && !outputs.husimi && !outputs.classical)
    throw InvalidArgument("no outputs requested");
  if (!allow_low_resolution) {
    const double hmin = param == SweepParam::kHbar ? std::min(lo, hi) : base.hbar;
    if (base.n_cut < minimum_n_cut(hmin))
      throw InvalidArgument("n_cut " + std::to_string(base.n_cut) + " is below the floor " +
                            std::to_string(minimum_n_cut(hmin)) + "; pass the low-resolution override");
    if (propagator.scheme == Scheme::kKickSplit && propagator.steps_per_period < kMinStepsPerPeriod)
      throw InvalidArgument("steps_per_period below 2048; pass the low-resolution override");
  }
}

std::vector<double> ScanSpec::values() const {
  std::vector<double> v(points);
  for (int k = 0; k < points; ++k) v[k] = lo + (hi - lo) * k / (points - 1);
  return v;
}

RatchetSystem ScanSpec::system_at(double value) const {
  RatchetSystem s = base;
  switch (param) {
    case SweepParam::kTheta: s.driving.theta = value; break;
    case SweepParam::kOmega: s.driving.omega = value; break;
    case SweepParam::kE2: s.driving.e2 = value; break;
    case SweepParam::kT0: s.driving.t0 = value; break;
    case SweepParam::kHbar: s.hbar = value; break;
  }
  return s;
}

std::string ScanSpec::to_json() const {
  json j = {{"system", json::parse(system_to_json(base))},
            {"propagator",
             {{"steps_per_period", propagator.steps_per_period},
              {"scheme", to_string(propagator.scheme)},
              {"ode_tolerance", propagator.ode_tolerance}}},
            {"sweep", {{"param", to_string(param)}, {"lo", lo}, {"hi", hi}, {"points", points}}},
            {"outputs",
             {{"spectrum", outputs.spectrum},
              {"current", outputs.current},
              {"husimi", outputs.husimi},
              {"classical", outputs.classical}}},
            {"n_t0", n_t0},
            {"gap_threshold", gap_threshold}};
  if (outputs.husimi) j["husimi"] = {{"nx", husimi.nx}, {"np", husimi.np}, {"p_max", husimi.p_max}};
  if (outputs.classical)
    j["classical"] = {{"n_particles", classical.n_particles},
                      {"n_periods", classical.n_periods},
                      {"steps_per_period", classical.steps_per_period},
                      {"seed", classical.seed}};
  return j.dump();
}

std::string provenance_line(const std::string& hash, int n_cut, int steps_per_period) {
  return "# qratchet " + code_version() + " config_hash=" + hash + " n_cut=" + std::to_string(n_cut) +
         " steps_per_period=" + std::to_string(steps_per_period) + "\n";
}

std::string code_version() { return QRATCHET_VERSION; }

ScanResult run_scan(const ScanSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(spec.out_dir);
  std::error_code ec;
  fs::create_directories(dir / "points", ec);
  if (ec) throw IoError("cannot create " + (dir / "points").string() + ": " + ec.message());

  ScanResult res;
  const std::string config = spec.to_json();
  res.config_hash = hash_hex(config_hash(config));
  const std::vector<double> values = spec.values();
  res.points.resize(values.size());
  std::vector<char> have(values.size(), 0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (auto r = load_point(dir, static_cast<int>(k), res.config_hash)) {
      res.points[k] = std::move(*r);
      have[k] = 1;
      ++res.resumed;
    }
  }

  std::vector<int> todo;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!have[k]) todo.push_back(static_cast<int>(k));
  if (spec.max_new_points >= 0 && static_cast<int>(todo.size()) > spec.max_new_points)
    todo.resize(spec.max_new_points);

  std::atomic<std::size_t> next{0};
  std::mutex sink;
  std::exception_ptr fatal;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const int k = todo[i];
      PointRecord rec;
      try {
        rec = compute_point(spec, k, values[k], dir);
      } catch (const IoError&) {
        std::lock_guard<std::mutex> lock(sink);
        if (!fatal) fatal = std::current_exception();
        return;
      } catch (const std::exception& e) {
        rec = PointRecord{};
        rec.index = k;
        rec.value = values[k];
        rec.ok = false;
        rec.error = e.what();
      }
      std::lock_guard<std::mutex> lock(sink);
      try {
        store_point(dir, rec, res.config_hash);
      } catch (...) {
        if (!fatal) fatal = std::current_exception();
        return;
      }
      res.points[k] = std::move(rec);
      have[k] = 1;
      ++res.computed;
    }
  };
  const int nw = std::max(1, std::min<int>(spec.workers, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  res.complete = std::all_of(have.begin(), have.end(), [](char c) { return c != 0; });
  for (const auto& r : res.points)
    if (res.complete && !r.ok) ++res.errors;
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!res.complete) return res;

  // Assemble from the stored records so that resumed and uninterrupted
  // runs produce identical files.
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto r = load_point(dir, static_cast<int>(k), res.config_hash);
    if (!r) throw IoError("point file vanished during assembly");
    res.points[k] = std::move(*r);
  }
  assemble(spec, res, dir);

  json errors = json::array();
  for (const auto& r : res.points)
    if (!r.ok) errors.push_back({{"index", r.index}, {"value", r.value}, {"error", r.error}});
  json manifest = {{"config", json::parse(config)},
                   {"config_hash", res.config_hash},
                   {"code_version", code_version()},
                   {"n_cut", spec.base.n_cut},
                   {"steps_per_period", spec.propagator.steps_per_period},
                   {"wall_time_s", res.wall_time_s},
                   {"points", static_cast<int>(values.size())},
                   {"computed", res.computed},
                   {"resumed", res.resumed},
                   {"per_point_errors", errors}};
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  return res;
}

}  // namespace qratchet
