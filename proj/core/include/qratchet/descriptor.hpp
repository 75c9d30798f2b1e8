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

#include "qratchet/model.hpp"
#include "qratchet/propagator.hpp"

namespace qratchet {

// JSON system descriptor with keys variant ("tilting" | "flashing"), e1,
// e2, omega, theta, t0, hbar, n_cut and, for flashing, k, s, theta_p.
// Missing keys keep their defaults. The optional keys steps_per_period,
// scheme and ode_tolerance configure the propagator.
RatchetSystem system_from_json(const std::string& text);
PropagatorConfig propagator_from_json(const std::string& text,
                                      const PropagatorConfig& defaults = {});
RatchetSystem load_system(const std::string& path);
std::string read_text_file(const std::string& path);

// Canonical form: sorted keys, fixed number formatting.
std::string system_to_json(const RatchetSystem& sys);
std::string canonical_json(const std::string& text);

// 64-bit FNV-1a of canonical_json(text); stable under key reordering.
std::uint64_t config_hash(const std::string& text);
std::string hash_hex(std::uint64_t h);

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

}  // namespace qratchet
