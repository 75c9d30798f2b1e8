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

#include "qratchet/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace qratchet {

void RatchetSystem::validate() const {
  if (n_cut < 1) throw InvalidArgument("n_cut must be >= 1");
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be > 0");
  if (!(driving.omega > 0.0)) throw InvalidArgument("omega must be > 0");
  if (kappa != 0.0) throw InvalidArgument("only the kappa = 0 sector is supported");
}

WaveState WaveState::plane_wave(int n_cut, int n, double time, double frame_a) {
  if (n < -n_cut || n > n_cut) throw InvalidArgument("plane wave index outside basis");
  WaveState s;
  s.coeffs = ComplexVector::Zero(2 * n_cut + 1);
  s.coeffs(n + n_cut) = 1.0;
  s.time = time;
  s.frame_a = frame_a;
  return s;
}

double field_value(const DrivingField& f, double t) {
  const double s = f.omega * (t - f.t0);
  return f.e1 * std::cos(s) + f.e2 * std::cos(2.0 * s + f.theta);
}

double field_derivative(const DrivingField& f, double t) {
  const double s = f.omega * (t - f.t0);
  return -f.omega * (f.e1 * std::sin(s) + 2.0 * f.e2 * std::sin(2.0 * s + f.theta));
}

double vector_potential(const DrivingField& f, double t) {
  const double s = f.omega * (t - f.t0);
  return -(f.e1 / f.omega * std::sin(s) +
           f.e2 / (2.0 * f.omega) * std::sin(2.0 * s + f.theta));
}

namespace {

double vector_potential_antiderivative(const DrivingField& f, double t) {
  const double s = f.omega * (t - f.t0);
  const double w2 = f.omega * f.omega;
  return f.e1 / w2 * std::cos(s) + f.e2 / (4.0 * w2) * std::cos(2.0 * s + f.theta);
}

}  // namespace

double vector_potential_integral(const DrivingField& f, double t1, double t2) {
  return vector_potential_antiderivative(f, t2) - vector_potential_antiderivative(f, t1);
}

double vector_potential_squared_integral(const DrivingField& f, double t1, double t2) {
  const double a = f.e1 / f.omega;
  const double b = f.e2 / (2.0 * f.omega);
  const double th = f.theta;
  const auto prim = [&](double t) {
    const double s = f.omega * (t - f.t0);
    return a * a * (0.5 * s - 0.25 * std::sin(2.0 * s)) +
           a * b * (std::sin(s + th) - std::sin(3.0 * s + th) / 3.0) +
           b * b * (0.5 * s - 0.125 * std::sin(4.0 * s + 2.0 * th));
  };
  return (prim(t2) - prim(t1)) / f.omega;
}

double field_integral(const DrivingField& f, double t1, double t2) {
  return vector_potential(f, t1) - vector_potential(f, t2);
}

double flashing_shape(const FlashingPotential& u, double x) {
  return u.k * (std::cos(x) + u.s * std::cos(2.0 * x + u.theta_p));
}

double flashing_shape_derivative(const FlashingPotential& u, double x) {
  return -u.k * (std::sin(x) + 2.0 * u.s * std::sin(2.0 * x + u.theta_p));
}

double potential_value(const RatchetSystem& sys, double x, double t) {
  if (sys.variant == Variant::kTilting) return 1.0 + std::cos(x);
  return flashing_shape(sys.potential, x) * field_value(sys.driving, t);
}

double classical_force(const RatchetSystem& sys, double x, double t) {
  if (sys.variant == Variant::kTilting) return std::sin(x) + field_value(sys.driving, t);
  return -flashing_shape_derivative(sys.potential, x) * field_value(sys.driving, t);
}

namespace {

using Fn = std::function<double(double)>;

// Max over a uniform grid of |f(c+u) - sign f(c-u)|.
double reflection_residual(const Fn& f, double c, double period, double sign) {
  double worst = 0.0;
  for (int j = 0; j < kSymmetryGrid; ++j) {
    const double u = period * j / kSymmetryGrid;
    worst = std::max(worst, std::abs(f(c + u) - sign * f(c - u)));
  }
  return worst;
}

double scale_of(const Fn& f, double period) {
  double m = 0.0;
  for (int j = 0; j < 256; ++j) m = std::max(m, std::abs(f(period * j / 256.0)));
  return std::max(1.0, m);
}

double bisect(const Fn& g, double a, double b) {
  double ga = g(a);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Searches [start, start + period/2) for a point c about which f is even
// (sign = +1) or odd (sign = -1). Candidates are zeros of `marker`: the
// derivative of f for even symmetry, f itself for odd symmetry.
std::optional<double> find_reflection_point(const Fn& f, const Fn& marker, double start,
                                            double period, double sign) {
  const double half = 0.5 * period;
  const double h = half / kSymmetryGrid;
  const double tol = kSymmetryTolerance * scale_of(f, period);
  std::vector<double> candidates;
  double g_prev = marker(start);
  for (int i = 0; i < kSymmetryGrid; ++i) {
    const double a = start + i * h;
    const double b = a + h;
    const double g_next = marker(b);
    if (g_prev == 0.0) {
      candidates.push_back(a);
    } else if ((g_prev < 0.0) != (g_next < 0.0) && g_next != 0.0) {
      candidates.push_back(bisect(marker, a, b));
    }
    g_prev = g_next;
  }
  // Markers that vanish identically leave no sign changes; fall back to the
  // grid points themselves.
  if (candidates.empty() && std::abs(marker(start)) < tol) candidates.push_back(start);
  for (double c : candidates) {
    if (reflection_residual(f, c, period, sign) < tol) return c;
  }
  return std::nullopt;
}

}  // namespace

bool check_shift_symmetry(const DrivingField& f) {
  const double period = f.period();
  const Fn e = [&](double t) { return field_value(f, t); };
  const double tol = kSymmetryTolerance * scale_of(e, period);
  for (int j = 0; j < kSymmetryGrid; ++j) {
    const double t = f.t0 + period * j / kSymmetryGrid;
    if (std::abs(e(t) + e(t + 0.5 * period)) >= tol) return false;
  }
  return true;
}

std::optional<double> check_time_reversal(const DrivingField& f) {
  const Fn e = [&](double t) { return field_value(f, t); };
  const Fn de = [&](double t) { return field_derivative(f, t); };
  return find_reflection_point(e, de, f.t0, f.period(), +1.0);
}

std::optional<double> check_time_antisymmetry(const DrivingField& f) {
  const Fn e = [&](double t) { return field_value(f, t); };
  return find_reflection_point(e, e, f.t0, f.period(), -1.0);
}

std::string to_string(FlashingSymmetry s) {
  switch (s) {
    case FlashingSymmetry::kS1: return "S1";
    case FlashingSymmetry::kS2: return "S2";
    case FlashingSymmetry::kS3: return "S3";
    case FlashingSymmetry::kS4: return "S4";
  }
  return "?";
}

std::set<FlashingSymmetry> check_flashing_symmetries(const RatchetSystem& sys) {
  if (sys.variant != Variant::kFlashing)
    throw InvalidArgument("flashing symmetries require the flashing variant");
  const FlashingPotential& pot = sys.potential;
  const Fn u = [&](double x) { return flashing_shape(pot, x); };
  const Fn du = [&](double x) { return flashing_shape_derivative(pot, x); };

  const bool u_even = find_reflection_point(u, du, 0.0, kTwoPi, +1.0).has_value();
  const bool u_odd = find_reflection_point(u, u, 0.0, kTwoPi, -1.0).has_value();
  bool u_half_antiperiodic = true;
  {
    const double tol = kSymmetryTolerance * scale_of(u, kTwoPi);
    for (int j = 0; j < kSymmetryGrid && u_half_antiperiodic; ++j) {
      const double x = kTwoPi * j / kSymmetryGrid;
      u_half_antiperiodic = std::abs(u(x) + u(x + kPi)) < tol;
    }
  }
  const bool e_even = check_time_reversal(sys.driving).has_value();
  const bool e_odd = check_time_antisymmetry(sys.driving).has_value();
  const bool e_shift = check_shift_symmetry(sys.driving);

  std::set<FlashingSymmetry> out;
  if (u_even) out.insert(FlashingSymmetry::kS1);
  if (e_even) out.insert(FlashingSymmetry::kS2);
  if (e_shift && u_odd) out.insert(FlashingSymmetry::kS3);
  if (e_odd && u_half_antiperiodic) out.insert(FlashingSymmetry::kS4);
  return out;
}

}  // namespace qratchet
