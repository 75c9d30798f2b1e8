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

#include "qratchet/descriptor.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qratchet {
namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw InvalidArgument("descriptor must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad JSON descriptor: ") + e.what());
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("descriptor key has the wrong type: ") + key);
  }
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::kTilting ? "tilting" : "flashing"; }

Variant variant_from_string(const std::string& s) {
  if (s == "tilting") return Variant::kTilting;
  if (s == "flashing") return Variant::kFlashing;
  throw InvalidArgument("unknown variant: " + s);
}

RatchetSystem system_from_json(const std::string& text) {
  const json j = parse(text);
  RatchetSystem sys;
  std::string variant = "tilting";
  read(j, "variant", variant);
  sys.variant = variant_from_string(variant);
  read(j, "e1", sys.driving.e1);
  read(j, "e2", sys.driving.e2);
  read(j, "omega", sys.driving.omega);
  read(j, "theta", sys.driving.theta);
  read(j, "t0", sys.driving.t0);
  read(j, "hbar", sys.hbar);
  read(j, "n_cut", sys.n_cut);
  read(j, "kappa", sys.kappa);
  read(j, "k", sys.potential.k);
  read(j, "s", sys.potential.s);
  read(j, "theta_p", sys.potential.theta_p);
  sys.validate();
  return sys;
}

PropagatorConfig propagator_from_json(const std::string& text, const PropagatorConfig& defaults) {
  const json j = parse(text);
  PropagatorConfig cfg = defaults;
  read(j, "steps_per_period", cfg.steps_per_period);
  read(j, "ode_tolerance", cfg.ode_tolerance);
  if (j.contains("scheme")) {
    std::string s;
    read(j, "scheme", s);
    cfg.scheme = scheme_from_string(s);
  }
  cfg.validate();
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RatchetSystem load_system(const std::string& path) { return system_from_json(read_text_file(path)); }

std::string system_to_json(const RatchetSystem& sys) {
  json j = {{"variant", to_string(sys.variant)},
            {"e1", sys.driving.e1},
            {"e2", sys.driving.e2},
            {"omega", sys.driving.omega},
            {"theta", sys.driving.theta},
            {"t0", sys.driving.t0},
            {"hbar", sys.hbar},
            {"n_cut", sys.n_cut}};
  if (sys.variant == Variant::kFlashing) {
    j["k"] = sys.potential.k;
    j["s"] = sys.potential.s;
    j["theta_p"] = sys.potential.theta_p;
  }
  return j.dump();
}

std::string canonical_json(const std::string& text) { return json::parse(text).dump(); }

std::uint64_t config_hash(const std::string& text) {
  const std::string c = canonical_json(text);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : c) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qratchet
