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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qratchet/propagator.hpp"

namespace qratchet {
namespace {

constexpr std::uint64_t kMagic = 0x31514c4654415251ULL;  // "QRATFLQ1" little-endian
constexpr std::uint64_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "the cache format assumes a little-endian host");

void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void write_floquet_matrix(const std::string& path, const FloquetMatrix& fm) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  const auto dim = static_cast<std::uint64_t>(fm.u.rows());
  put_u64(os, kMagic);
  put_u64(os, kVersion);
  put_u64(os, dim);
  put_f64(os, fm.system.hbar);
  put_f64(os, fm.system.driving.omega);
  put_f64(os, fm.system.driving.theta);
  put_f64(os, fm.system.driving.t0);
  put_u64(os, static_cast<std::uint64_t>(fm.config.scheme));
  for (Eigen::Index r = 0; r < fm.u.rows(); ++r) {
    for (Eigen::Index c = 0; c < fm.u.cols(); ++c) {
      put_f64(os, fm.u(r, c).real());
      put_f64(os, fm.u(r, c).imag());
    }
  }
  if (!os) throw IoError("write failed for " + path);
}

FloquetMatrix read_floquet_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  if (get_u64(is) != kMagic) throw IoError(path + " is not a Floquet matrix file");
  if (get_u64(is) != kVersion) throw IoError(path + " has an unsupported version");
  const std::uint64_t dim = get_u64(is);
  if (dim == 0 || dim % 2 == 0 || dim > 100001) throw IoError(path + " has a bad dimension");
  FloquetMatrix fm;
  fm.system.hbar = get_f64(is);
  fm.system.driving.omega = get_f64(is);
  fm.system.driving.theta = get_f64(is);
  fm.system.driving.t0 = get_f64(is);
  const std::uint64_t scheme = get_u64(is);
  if (scheme > 1) throw IoError(path + " has an unknown scheme id");
  fm.config.scheme = static_cast<Scheme>(scheme);
  fm.system.n_cut = static_cast<int>((dim - 1) / 2);
  const auto d = static_cast<Eigen::Index>(dim);
  fm.u.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      fm.u(r, c) = Complex(re, im);
    }
  }
  if (!is) throw IoError(path + " is truncated");
  return fm;
}

}  // namespace qratchet
