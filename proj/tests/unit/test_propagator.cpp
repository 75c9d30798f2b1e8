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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>

#include "qratchet/propagator.hpp"

namespace qratchet {
namespace {

RatchetSystem tilting(double e1, double e2, double omega, double theta, double hbar, int n_cut) {
  RatchetSystem s;
  s.driving = {e1, e2, omega, theta, 0.0};
  s.hbar = hbar;
  s.n_cut = n_cut;
  return s;
}

PropagatorConfig config(Scheme scheme, int steps = 2048) {
  PropagatorConfig c;
  c.scheme = scheme;
  c.steps_per_period = steps;
  return c;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Static pendulum H0 = (hbar n)^2 / 2 + cos x in the plane-wave basis.
Eigen::MatrixXd static_hamiltonian(double hbar, int n_cut) {
  const int d = 2 * n_cut + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double n = i - n_cut;
    h(i, i) = 0.5 * hbar * hbar * n * n;
    if (i + 1 < d) h(i, i + 1) = h(i + 1, i) = 0.5;
  }
  return h;
}

ComplexMatrix static_propagator(double hbar, int n_cut, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(static_hamiltonian(hbar, n_cut));
  const ComplexVector ph = (es.eigenvalues() * (-t / hbar)).unaryExpr([](double a) { return std::polar(1.0, a); });
  const ComplexMatrix v = es.eigenvectors().cast<Complex>();
  return v * ph.asDiagonal() * v.adjoint();
}

TEST(PropagatorConfig, Validation) {
  PropagatorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.steps_per_period = 32;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.steps_per_period = 64;
  c.ode_tolerance = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.ode_tolerance = 1e-3;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_EQ(scheme_from_string(to_string(Scheme::kInteractionPicture)), Scheme::kInteractionPicture);
  EXPECT_THROW(scheme_from_string("leapfrog"), InvalidArgument);
}

TEST(KickSplitTables, TridiagonalStructureAndReconstruction) {
  const RatchetSystem sys = tilting(2, 2, 2, 0, 0.2, 16);
  const KickSplitTables t = KickSplitTables::build(sys);
  const int d = sys.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double want = std::abs(i - j) == 1 ? 1.0 / (2 * sys.hbar) : 0.0;
      EXPECT_EQ(t.m(i, j), Complex(want, 0.0));
    }
  EXPECT_LT(t.reconstruction_error(), 1e-10);
}

TEST(KickSplitTables, FlashingMatrixIsHermitianPentadiagonal) {
  RatchetSystem sys = tilting(2, 1.5, 1, 0, 1.0, 12);
  sys.variant = Variant::kFlashing;
  sys.potential = {1.5, 0.25, kPi / 2};
  const KickSplitTables t = KickSplitTables::build(sys);
  EXPECT_LT(max_abs(t.m - t.m.adjoint()), 1e-15);
  // <n|U|m> for U = K[cos x + s cos(2x + theta_p)].
  const double k = 1.5, s = 0.25;
  EXPECT_NEAR(std::abs(t.m(5, 6) - Complex(k / 2, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(t.m(7, 5) - k * s / 2 * std::polar(1.0, kPi / 2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(t.m(5, 7) - k * s / 2 * std::polar(1.0, -kPi / 2)), 0.0, 1e-14);
  EXPECT_EQ(t.m(5, 8), Complex(0, 0));
  EXPECT_LT(t.reconstruction_error(), 1e-10);
}

TEST(KickSplit, FreeParticlePhases) {
  RatchetSystem sys = tilting(0, 0, 2, 0, 0.3, 10);
  sys.variant = Variant::kFlashing;
  sys.potential = {0.0, 0.0, 0.0};
  const PropagatorConfig cfg = config(Scheme::kKickSplit, 256);
  const double dt = sys.driving.period() / 256;
  WaveState w;
  w.coeffs = ComplexVector::Constant(sys.dim(), Complex(1.0 / std::sqrt(sys.dim()), 0));
  const WaveState out = step_kick_split(w, sys, cfg, 0.0);
  for (int i = 0; i < sys.dim(); ++i) {
    const double n = i - sys.n_cut;
    const Complex want = w.coeffs(i) * std::polar(1.0, -sys.hbar * dt * n * n / 2);
    EXPECT_NEAR(std::abs(out.coeffs(i) - want), 0.0, 1e-14);
  }
  EXPECT_NEAR(out.time, dt, 1e-15);
}

TEST(KickSplit, NormPreservedOverManySteps) {
  const RatchetSystem sys = tilting(2, 2, 2, -kPi / 2, 0.4, 16);
  const PropagatorConfig cfg = config(Scheme::kKickSplit, 1024);
  const Propagator prop(sys, cfg);
  ComplexMatrix c = ComplexMatrix::Zero(sys.dim(), 1);
  c(sys.n_cut, 0) = 1.0;
  const double dt = prop.time_step();
  for (int k = 0; k < 100000; ++k) prop.kick_split_step(c, k * dt);
  EXPECT_LT(std::abs(c.norm() - 1.0), 1e-9);
}

TEST(KickSplit, SingleStepMatchesInteractionPicture) {
  const RatchetSystem sys = tilting(2, 2, 2, -kPi / 2, 0.2, 32);
  const PropagatorConfig a = config(Scheme::kKickSplit, 1024);
  PropagatorConfig b = config(Scheme::kInteractionPicture, 1024);
  const WaveState w = WaveState::plane_wave(sys.n_cut, 0);
  const double dt = sys.driving.period() / 1024;
  for (double t : {0.0, 0.37 * sys.driving.period()}) {
    const double tk = std::round(t / dt) * dt;
    const WaveState x = step_kick_split(w, sys, a, tk);
    const WaveState y = step_interaction_picture(w, sys, b, tk, dt);
    EXPECT_LT((x.coeffs - y.coeffs).norm(), 1e-6);
  }
}

TEST(InteractionPicture, UncoupledAmplitudesOnlyRotate) {
  RatchetSystem sys = tilting(2, 2, 2, 0.3, 0.5, 8);
  sys.variant = Variant::kFlashing;
  sys.potential = {0.0, 0.0, 0.0};
  const PropagatorConfig cfg = config(Scheme::kInteractionPicture);
  ComplexVector c(sys.dim());
  for (int i = 0; i < sys.dim(); ++i) c(i) = std::polar(1.0 / std::sqrt(sys.dim()), 0.3 * i);
  WaveState w;
  w.coeffs = c;
  const double t = 1.3;
  const WaveState out = step_interaction_picture(w, sys, cfg, 0.0, t);
  for (int i = 0; i < sys.dim(); ++i) {
    const double n = i - sys.n_cut;
    EXPECT_NEAR(std::abs(out.coeffs(i) - c(i) * std::polar(1.0, -sys.hbar * n * n * t / 2)), 0.0, 1e-12);
  }
}

TEST(FloquetMatrix, StaticCaseMatchesMatrixExponential) {
  const RatchetSystem sys = tilting(0, 0, 2, 0, 0.2, 32);
  const ComplexMatrix want = static_propagator(sys.hbar, sys.n_cut, sys.driving.period());
  for (Scheme s : {Scheme::kKickSplit, Scheme::kInteractionPicture}) {
    const FloquetMatrix fm = build_floquet_matrix(sys, config(s));
    EXPECT_LT(max_abs(fm.u - want), 1e-8) << to_string(s);
  }
}

TEST(FloquetMatrix, FourthOrderAndFirstOrderConvergenceRates) {
  const RatchetSystem sys = tilting(0, 0, 2, 0, 0.4, 12);
  const ComplexMatrix want = static_propagator(sys.hbar, sys.n_cut, sys.driving.period());
  const auto err = [&](SplitOrder o, int steps) {
    PropagatorConfig c = config(Scheme::kKickSplit, steps);
    c.split_order = o;
    return max_abs(build_floquet_matrix(sys, c).u - want);
  };
  const double r4 = err(SplitOrder::kFourth, 128) / err(SplitOrder::kFourth, 256);
  const double r1 = err(SplitOrder::kFirst, 1024) / err(SplitOrder::kFirst, 2048);
  EXPECT_NEAR(std::log2(r4), 4.0, 0.3);
  EXPECT_NEAR(std::log2(r1), 1.0, 0.2);
}

TEST(FloquetMatrix, UnitarySelfConvergentAndSchemesAgree) {
  const RatchetSystem sys = tilting(2, 2, 2, -kPi / 2, 0.4, 32);
  const FloquetMatrix a = build_floquet_matrix(sys, config(Scheme::kKickSplit, 1024));
  const FloquetMatrix b = build_floquet_matrix(sys, config(Scheme::kKickSplit, 2048));
  const FloquetMatrix c = build_floquet_matrix(sys, config(Scheme::kInteractionPicture));
  EXPECT_LT(unitarity_defect(b.u), 1e-9);
  EXPECT_LT(unitarity_defect(c.u), 1e-9);
  EXPECT_LT(max_abs(a.u - b.u), 1e-7);
  EXPECT_LT(max_abs(b.u - c.u), 1e-6);
}

TEST(FloquetMatrix, HalfPeriodComposition) {
  RatchetSystem sys = tilting(2, 1, 2, 0.8, 0.4, 24);
  sys.driving.t0 = 0.3;
  for (Scheme s : {Scheme::kKickSplit, Scheme::kInteractionPicture}) {
    const PropagatorConfig cfg = config(s);
    const double T = sys.driving.period();
    const ComplexMatrix full = build_floquet_matrix(sys, cfg).u;
    const ComplexMatrix h1 = evolution_matrix(sys, cfg, 0.0, T / 2);
    const ComplexMatrix h2 = evolution_matrix(sys, cfg, T / 2, T);
    EXPECT_LT(max_abs(full - h2 * h1), 1e-8) << to_string(s);
  }
}

// Column blocks change the adaptive step sequence of scheme B, so thread
// counts agree to the integration tolerance; a fixed count is bitwise
// reproducible.
TEST(FloquetMatrix, ThreadedBuildIsReproducible) {
  const RatchetSystem sys = tilting(2, 2, 2, 0.4, 0.4, 20);
  for (Scheme s : {Scheme::kKickSplit, Scheme::kInteractionPicture}) {
    PropagatorConfig cfg = config(s, 512);
    const ComplexMatrix one = build_floquet_matrix(sys, cfg).u;
    cfg.threads = 3;
    const ComplexMatrix three = build_floquet_matrix(sys, cfg).u;
    const ComplexMatrix again = build_floquet_matrix(sys, cfg).u;
    EXPECT_LT(max_abs(one - three), 1e-9);
    EXPECT_EQ(max_abs(three - again), 0.0);
  }
}

TEST(FloquetMatrix, KeptVectorPotentialSquareIsAGlobalPhase) {
  const RatchetSystem sys = tilting(2, 2, 2, -kPi / 2, 0.4, 24);
  PropagatorConfig cfg = config(Scheme::kKickSplit);
  const ComplexMatrix u = build_floquet_matrix(sys, cfg).u;
  cfg.keep_a_squared = true;
  const ComplexMatrix v = build_floquet_matrix(sys, cfg).u;
  const double phase =
      -vector_potential_squared_integral(sys.driving, 0.0, sys.driving.period()) / (2 * sys.hbar);
  EXPECT_LT(max_abs(v - std::polar(1.0, phase) * u), 1e-8);
}

TEST(FloquetMatrix, CheckpointsArePartialPropagators) {
  const RatchetSystem sys = tilting(2, 2, 2, 0.4, 0.4, 16);
  const PropagatorConfig cfg = config(Scheme::kInteractionPicture);
  const FloquetMatrix fm = build_floquet_matrix(sys, cfg, 0.0, 8);
  ASSERT_EQ(fm.checkpoints.size(), 8u);
  EXPECT_LT(max_abs(fm.checkpoints[0] - ComplexMatrix::Identity(sys.dim(), sys.dim())), 1e-15);
  const double T = sys.driving.period();
  EXPECT_LT(max_abs(fm.checkpoints[3] - evolution_matrix(sys, cfg, 0.0, 3 * T / 8)), 1e-9);
}

TEST(Unitarity, DefectOfNonUnitaryMatrix) {
  ComplexMatrix m = ComplexMatrix::Identity(3, 3);
  EXPECT_EQ(unitarity_defect(m), 0.0);
  m(0, 0) = 1.1;
  EXPECT_NEAR(unitarity_defect(m), 0.21, 1e-12);
}

TEST(FloquetIo, RoundTrip) {
  RatchetSystem sys = tilting(2, 2, 2, -0.7, 0.4, 6);
  sys.driving.t0 = 0.25;
  const PropagatorConfig cfg = config(Scheme::kInteractionPicture);
  const FloquetMatrix fm = build_floquet_matrix(sys, cfg);
  const auto path = std::filesystem::temp_directory_path() / "qratchet_io_roundtrip.bin";
  write_floquet_matrix(path.string(), fm);
  EXPECT_EQ(std::filesystem::file_size(path), 64u + 16u * sys.dim() * sys.dim());
  const FloquetMatrix back = read_floquet_matrix(path.string());
  EXPECT_EQ(max_abs(back.u - fm.u), 0.0);
  EXPECT_EQ(back.system.hbar, sys.hbar);
  EXPECT_EQ(back.system.n_cut, sys.n_cut);
  EXPECT_EQ(back.system.driving.omega, sys.driving.omega);
  EXPECT_EQ(back.system.driving.theta, sys.driving.theta);
  EXPECT_EQ(back.system.driving.t0, sys.driving.t0);
  EXPECT_EQ(back.config.scheme, Scheme::kInteractionPicture);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  EXPECT_THROW(read_floquet_matrix(path.string()), IoError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_floquet_matrix(path.string()), IoError);
}

}  // namespace
}  // namespace qratchet
