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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qratchet/model.hpp"

namespace qratchet {
namespace {

DrivingField drive(double e1, double e2, double omega, double theta, double t0 = 0.0) {
  return {e1, e2, omega, theta, t0};
}

// Composite Simpson rule.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// Smallest reflection residual over a grid of candidate centers.
template <class F>
double best_reflection(F f, double period, double sign, int n_centers = 4096, int n_u = 257) {
  double best = 1e300;
  for (int c = 0; c < n_centers; ++c) {
    const double ts = period * c / n_centers;
    double worst = 0.0;
    for (int k = 0; k < n_u; ++k) {
      const double u = period * k / n_u;
      worst = std::max(worst, std::abs(f(ts + u) - sign * f(ts - u)));
    }
    best = std::min(best, worst);
  }
  return best;
}

TEST(DrivingField, ValueAtOrigin) {
  EXPECT_DOUBLE_EQ(field_value(drive(2, 2, 2, -kPi / 2), 0.0), 2.0 + 2.0 * std::cos(-kPi / 2));
}

TEST(DrivingField, ValueAgainstLongDouble) {
  const long double ref = 3.0L * std::cos(0.25L * std::numbers::pi_v<long double>) +
                          1.5L * std::cos(0.5L * std::numbers::pi_v<long double> -
                                          0.5L * std::numbers::pi_v<long double>);
  EXPECT_NEAR(field_value(drive(3, 1.5, 1, -kPi / 2), kPi / 4), static_cast<double>(ref), 1e-14);
}

TEST(DrivingField, PeriodicAndZeroMean) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(-3, 3), w(0.3, 4), ph(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const DrivingField f = drive(amp(rng), amp(rng), w(rng), ph(rng), ph(rng));
    const double T = f.period();
    const int n = 4096;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += field_value(f, f.t0 + T * k / n);
    EXPECT_NEAR(sum * T / n, 0.0, 1e-12);
    for (double t : {0.0, 0.3, 1.7}) EXPECT_NEAR(field_value(f, t + T), field_value(f, t), 1e-12);
  }
}

TEST(VectorPotential, DerivativeIsMinusField) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> amp(-3, 3), w(0.3, 4), ph(-kPi, kPi), tt(0, 50);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const DrivingField f = drive(amp(rng), amp(rng), w(rng), ph(rng), ph(rng));
    const double t = tt(rng);
    const double d = (vector_potential(f, t + h) - vector_potential(f, t - h)) / (2 * h);
    worst = std::max(worst, std::abs(d + field_value(f, t)));
  }
  EXPECT_LT(worst, 1e-7);
}

TEST(VectorPotential, ZeroMeanOverPeriod) {
  const DrivingField f = drive(2, 2, 2, 0.7, 0.3);
  EXPECT_NEAR(simpson([&](double t) { return vector_potential(f, t); }, 0.0, f.period()), 0.0, 1e-12);
}

TEST(VectorPotential, ReturnsAfterOnePeriod) {
  const DrivingField f = drive(2, 2, 2, 0.0);
  EXPECT_NEAR(vector_potential(f, f.period()) - vector_potential(f, 0.0), 0.0, 1e-14);
}

TEST(VectorPotential, AnchoredFormDiffersByConstant) {
  // -int_0^t E equals A(t) - A(0).
  const DrivingField f = drive(3, 1.5, 1, -kPi / 2);
  for (double t : {0.1, 1.0, 2.5, 7.0}) {
    const double anchored = -(f.e1 / f.omega * std::sin(f.omega * t) +
                              f.e2 / (2 * f.omega) * (std::sin(2 * f.omega * t + f.theta) - std::sin(f.theta)));
    EXPECT_NEAR(vector_potential(f, t) - vector_potential(f, 0.0), anchored, 1e-13);
  }
}

TEST(VectorPotential, IntegralsMatchQuadrature) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(-3, 3), w(0.3, 4), ph(-kPi, kPi), tt(0, 10);
  for (int trial = 0; trial < 20; ++trial) {
    const DrivingField f = drive(amp(rng), amp(rng), w(rng), ph(rng), ph(rng));
    double a = tt(rng), b = tt(rng);
    if (a > b) std::swap(a, b);
    const double ia = simpson([&](double t) { return vector_potential(f, t); }, a, b);
    const double ia2 = simpson([&](double t) { return std::pow(vector_potential(f, t), 2); }, a, b);
    const double ie = simpson([&](double t) { return field_value(f, t); }, a, b);
    EXPECT_NEAR(vector_potential_integral(f, a, b), ia, 1e-9);
    EXPECT_NEAR(vector_potential_squared_integral(f, a, b), ia2, 1e-9);
    EXPECT_NEAR(field_integral(f, a, b), ie, 1e-9);
  }
}

TEST(Potential, TiltingAndFlashingValues) {
  RatchetSystem tilt;
  EXPECT_DOUBLE_EQ(potential_value(tilt, 0.0, 0.3), 2.0);
  RatchetSystem fl;
  fl.variant = Variant::kFlashing;
  fl.potential = {1.5, 0.25, kPi / 2};
  fl.driving = drive(1.0, 0.0, 1.0, 0.0);
  EXPECT_NEAR(potential_value(fl, 0.0, 0.0), 1.5, 1e-15);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(-20, 20);
  for (int k = 0; k < 100; ++k) {
    const double x = xs(rng);
    EXPECT_NEAR(flashing_shape(fl.potential, x + kTwoPi), flashing_shape(fl.potential, x), 1e-12);
  }
}

TEST(Potential, ForceIsMinusGradient) {
  RatchetSystem sys;
  sys.driving = drive(2, 2, 2, 0.4);
  RatchetSystem fl = sys;
  fl.variant = Variant::kFlashing;
  fl.potential = {1.5, 0.25, 0.9};
  const double h = 1e-5;
  for (double x : {-2.0, 0.3, 1.9}) {
    for (double t : {0.0, 0.7}) {
      const double dv = (potential_value(sys, x + h, t) - potential_value(sys, x - h, t)) / (2 * h);
      EXPECT_NEAR(classical_force(sys, x, t), -dv + field_value(sys.driving, t), 1e-8);
      const double dvf = (potential_value(fl, x + h, t) - potential_value(fl, x - h, t)) / (2 * h);
      EXPECT_NEAR(classical_force(fl, x, t), -dvf, 1e-8);
    }
  }
}

TEST(Symmetry, ShiftSymmetryCases) {
  EXPECT_TRUE(check_shift_symmetry(drive(2, 0, 2, 0)));
  EXPECT_FALSE(check_shift_symmetry(drive(2, 2, 2, 0.3)));
  EXPECT_FALSE(check_shift_symmetry(drive(2, 2, 2, 0.0)));
  EXPECT_FALSE(check_shift_symmetry(drive(0, 2, 2, 0)));
}

TEST(Symmetry, TimeReversalCases) {
  const auto a = check_time_reversal(drive(2, 2, 2, 0.0, 0.4));
  ASSERT_TRUE(a.has_value());
  EXPECT_NEAR(*a, 0.4, 1e-9);
  EXPECT_FALSE(check_time_reversal(drive(2, 2, 2, -kPi / 2)).has_value());
  const auto b = check_time_reversal(drive(2, 2, 2, kPi));
  ASSERT_TRUE(b.has_value());
  EXPECT_NEAR(*b, 0.0, 1e-9);
}

TEST(Symmetry, PredicatesAgreeWithGridSearch) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> amp(0.5, 3), w(0.5, 3), ph(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    double theta = ph(rng);
    if (trial % 5 == 0) theta = 0.0;
    if (trial % 5 == 1) theta = kPi;
    const double e2 = trial % 7 == 3 ? 0.0 : amp(rng);
    const DrivingField f = drive(amp(rng), e2, w(rng), theta, 0.0);
    const auto E = [&](double t) { return field_value(f, t); };
    const double T = f.period();
    const bool rev = best_reflection(E, T, 1.0) < 1e-6;
    const bool anti = best_reflection(E, T, -1.0) < 1e-6;
    double shift = 0.0;
    for (int k = 0; k < 4096; ++k) shift = std::max(shift, std::abs(E(T * k / 4096) + E(T * k / 4096 + T / 2)));
    EXPECT_EQ(check_time_reversal(f).has_value(), rev) << "theta=" << theta;
    EXPECT_EQ(check_time_antisymmetry(f).has_value(), anti) << "theta=" << theta;
    EXPECT_EQ(check_shift_symmetry(f), shift < 1e-10);
  }
}

TEST(Symmetry, ExistenceInvariantUnderPhaseShift) {
  for (double t0 : {0.0, 0.37, 1.9}) {
    const auto ts = check_time_reversal(drive(2, 1, 2, 0.0, t0));
    ASSERT_TRUE(ts.has_value());
    const double T = kPi;
    EXPECT_NEAR(std::remainder(*ts - t0, T / 2), 0.0, 1e-9);
    EXPECT_FALSE(check_time_reversal(drive(2, 1, 2, 1.0, t0)).has_value());
  }
}

RatchetSystem flashing(double theta_p, double theta) {
  RatchetSystem s;
  s.variant = Variant::kFlashing;
  s.driving = drive(2, 1.5, 1, theta);
  s.potential = {1.5, 0.25, theta_p};
  s.hbar = 1.0;
  return s;
}

TEST(Symmetry, FlashingCases) {
  using S = FlashingSymmetry;
  EXPECT_EQ(check_flashing_symmetries(flashing(0.0, 0.0)), (std::set<S>{S::kS1, S::kS2}));
  EXPECT_TRUE(check_flashing_symmetries(flashing(-kPi / 2, -kPi / 2)).empty());
  EXPECT_EQ(check_flashing_symmetries(flashing(-kPi / 2, 0.0)), (std::set<S>{S::kS2}));
  RatchetSystem tilt;
  EXPECT_THROW(check_flashing_symmetries(tilt), InvalidArgument);
}

TEST(Symmetry, FlashingShiftConditions) {
  // A single harmonic in time with an odd-harmonic potential satisfies S3
  // and S4.
  RatchetSystem s = flashing(0.0, 0.0);
  s.driving.e2 = 0.0;
  s.potential.s = 0.0;
  const auto got = check_flashing_symmetries(s);
  EXPECT_TRUE(got.count(FlashingSymmetry::kS3));
  EXPECT_TRUE(got.count(FlashingSymmetry::kS4));
}

TEST(RatchetSystem, Validation) {
  RatchetSystem s;
  EXPECT_NO_THROW(s.validate());
  s.n_cut = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.n_cut = 4;
  s.hbar = 0.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.hbar = 0.2;
  s.kappa = 0.1;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(WaveState, PlaneWave) {
  const WaveState w = WaveState::plane_wave(5, -2, 0.5, 0.1);
  EXPECT_EQ(w.n_cut(), 5);
  EXPECT_EQ(w.coeffs.size(), 11);
  EXPECT_DOUBLE_EQ(std::abs(w.coeffs(3)), 1.0);
  EXPECT_DOUBLE_EQ(w.norm(), 1.0);
  EXPECT_DOUBLE_EQ(w.time, 0.5);
}

}  // namespace
}  // namespace qratchet
