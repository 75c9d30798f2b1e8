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

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "qratchet/floquet.hpp"
#include "qratchet/twolevel.hpp"

namespace qratchet {
namespace {

RatchetSystem tilting(double e1, double e2, double omega, double theta, double hbar = 0.4,
                      int n_cut = 32) {
  RatchetSystem s;
  s.driving = {e1, e2, omega, theta, 0.0};
  s.hbar = hbar;
  s.n_cut = n_cut;
  return s;
}

PropagatorConfig scheme_b() {
  PropagatorConfig c;
  c.scheme = Scheme::kInteractionPicture;
  return c;
}

FloquetDecomposition decomposition(const RatchetSystem& sys, double t_start = 0.0) {
  return decompose(build_floquet_matrix(sys, scheme_b(), t_start, kDefaultSamples));
}

double circ(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

// Largest distance from an element of xs to its nearest circular
// neighbour in ys.
double set_distance(const RealVector& xs, const RealVector& ys) {
  double worst = 0.0;
  for (double x : xs) {
    double best = 1e300;
    for (double y : ys) best = std::min(best, circ(x, y));
    worst = std::max(worst, best);
  }
  return worst;
}

TEST(Decompose, StaticQuasienergiesMatchHermitianEigensolve) {
  const RatchetSystem sys = tilting(0, 0, 2, 0, 0.2, 40);
  const int d = sys.dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double n = i - sys.n_cut;
    h(i, i) = 0.5 * sys.hbar * sys.hbar * n * n;
    if (i + 1 < d) h(i, i + 1) = h(i + 1, i) = 0.5;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  RealVector want(d);
  for (int k = 0; k < d; ++k) want(k) = wrap_phase(sys.driving.period() * es.eigenvalues()(k) / sys.hbar);
  const FloquetDecomposition dec = decomposition(sys);
  EXPECT_LT(set_distance(dec.quasienergies, want), 1e-8);
  EXPECT_LT(set_distance(want, dec.quasienergies), 1e-8);
  for (int a = 0; a < d; ++a) {
    EXPECT_GT(dec.quasienergies(a), -kPi);
    EXPECT_LE(dec.quasienergies(a), kPi);
  }
}

TEST(Decompose, Invariants) {
  const FloquetDecomposition dec = decomposition(tilting(2, 2, 2, -kPi / 2));
  EXPECT_LT(dec.eigen_residual, 1e-7);
  EXPECT_LT(dec.orthonormality_defect, 1e-7);
  std::vector<int> perm = dec.order;
  std::sort(perm.begin(), perm.end());
  for (int a = 0; a < dec.size(); ++a) EXPECT_EQ(perm[a], a);
  for (int k = 1; k < dec.size(); ++k)
    EXPECT_LE(dec.kinetic(dec.order[k - 1]), dec.kinetic(dec.order[k]));
  // The sum over a complete basis of period-averaged momenta vanishes up
  // to truncation.
  EXPECT_LT(std::abs(dec.mean_momentum.sum()), 1e-3 * std::sqrt(double(dec.size())));
}

TEST(Decompose, SymmetricPointsHaveZeroMomenta) {
  for (double theta : {0.0, kPi}) {
    const FloquetMatrix fm = build_floquet_matrix(tilting(2, 2, 2, theta), scheme_b(), 0.0, kDefaultSamples);
    EXPECT_LT(check_timereversal_property(fm.u), 1e-7);
    const FloquetDecomposition dec = decompose(fm);
    EXPECT_TRUE(dec.symmetric_strobe);
    EXPECT_LT(dec.mean_momentum.cwiseAbs().maxCoeff(), 1e-6) << "theta=" << theta;
    for (double p : cumulative_momentum(dec)) EXPECT_LT(std::abs(p), 1e-6);
  }
  const FloquetMatrix fm = build_floquet_matrix(tilting(2, 2, 2, -kPi / 2), scheme_b());
  EXPECT_GT(check_timereversal_property(fm.u), 1e-2);
}

TEST(Decompose, SymmetricPointDoubletsAreNarrow) {
  // Beyond the layer edge (|p| about 2.1 here, so |n| >= 15) the doublet
  // partners sit far closer together than the mean level spacing and the
  // splitting shrinks with |n| until it reaches roundoff.
  const FloquetDecomposition dec = decomposition(tilting(2, 2, 2, 0.0, 0.2, 64));
  const double spacing = kTwoPi / dec.size();
  double previous = 1e300;
  int resolved = 0;
  for (const auto& [n, gap] : doublet_gaps(dec)) {
    if (n < 15) continue;
    EXPECT_LT(gap, 0.05 * spacing) << "n=" << n;
    if (gap < 1e-9) continue;
    EXPECT_LT(gap, previous) << "n=" << n;
    previous = gap;
    ++resolved;
  }
  EXPECT_GE(resolved, 3);
}

TEST(Decompose, PeriodAverageIsIndependentOfTheStrobe) {
  const RatchetSystem sys = tilting(2, 2, 2, -kPi / 2);
  const FloquetDecomposition a = decomposition(sys, 0.0);
  const FloquetDecomposition b = decomposition(sys, 0.3 * sys.driving.period());
  EXPECT_LT(set_distance(a.quasienergies, b.quasienergies), 1e-8);
  for (int i = 0; i < a.size(); ++i) {
    int best = 0;
    for (int j = 1; j < b.size(); ++j)
      if (circ(a.quasienergies(i), b.quasienergies(j)) < circ(a.quasienergies(i), b.quasienergies(best))) best = j;
    EXPECT_NEAR(a.mean_momentum(i), b.mean_momentum(best), 1e-6);
    EXPECT_NEAR(a.kinetic(i), b.kinetic(best), 1e-6);
  }
}

TEST(Decompose, BasisCutoffStability) {
  const FloquetDecomposition small = decomposition(tilting(2, 2, 2, -kPi / 2, 0.2, 48));
  const FloquetDecomposition large = decomposition(tilting(2, 2, 2, -kPi / 2, 0.2, 64));
  const double limit = std::pow(0.2 * 48 / 2, 2);
  double worst = 0.0;
  for (int a = 0; a < small.size(); ++a) {
    if (small.kinetic(a) >= limit) continue;
    double best = 1e300;
    for (int b = 0; b < large.size(); ++b) best = std::min(best, circ(small.quasienergies(a), large.quasienergies(b)));
    worst = std::max(worst, best);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(ShiftProperty, HoldsOnlyForShiftSymmetricDrives) {
  const auto residual = [](const RatchetSystem& sys) {
    const PropagatorConfig cfg = scheme_b();
    const ComplexMatrix full = build_floquet_matrix(sys, cfg).u;
    const ComplexMatrix half = evolution_matrix(sys, cfg, 0.0, sys.driving.period() / 2);
    return check_shift_property(full, half);
  };
  EXPECT_LT(residual(tilting(2, 0, 2, 0)), 1e-6);
  EXPECT_LT(residual(tilting(0, 0, 2, 0)), 1e-8);
  EXPECT_GT(residual(tilting(2, 2, 2, 0)), 1e-1);
}

TEST(CumulativeMomentum, RecursionAndExtremum) {
  const FloquetDecomposition dec = decomposition(tilting(2, 2, 2, -kPi / 2, 0.2, 64));
  const std::vector<double> p = cumulative_momentum(dec);
  ASSERT_EQ(p.size(), static_cast<std::size_t>(dec.size() / 2 + 1));
  double acc = dec.mean_momentum(dec.order[0]);
  EXPECT_DOUBLE_EQ(p[0], acc);
  for (std::size_t k = 1; k < p.size(); ++k) {
    acc += dec.mean_momentum(dec.order[2 * k - 1]) + dec.mean_momentum(dec.order[2 * k]);
    EXPECT_NEAR(p[k], acc, 1e-12);
  }
  EXPECT_LT(std::abs(p.back()), 1e-3);
  const double extremum = *std::max_element(p.begin(), p.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  EXPECT_GT(std::abs(extremum), 1e-2);
  RecordProperty("cumulative_extremum", std::to_string(extremum));
}

TEST(TrackBands, IdenticalPointsGiveIdentity) {
  const FloquetDecomposition dec = decomposition(tilting(2, 2, 2, 0.4, 0.4, 16));
  const BandTrack bt = track_bands({dec, dec}, {0.0, 1.0});
  ASSERT_EQ(bt.bands(), dec.size());
  for (int b = 0; b < bt.bands(); ++b) {
    EXPECT_EQ(bt.state_index[0][b], dec.order[b]);
    EXPECT_EQ(bt.state_index[1][b], bt.state_index[0][b]);
    EXPECT_NEAR(bt.overlap[1][b], 1.0, 1e-12);
  }
}

TEST(TrackBands, MatchingIsABijection) {
  std::vector<FloquetDecomposition> scan;
  std::vector<double> thetas;
  for (int k = 0; k < 6; ++k) {
    thetas.push_back(-1.0 + 0.02 * k);
    scan.push_back(decomposition(tilting(2, 2, 2, thetas.back(), 0.4, 16)));
  }
  const BandTrack bt = track_bands(scan, thetas);
  for (std::size_t k = 0; k < scan.size(); ++k) {
    std::vector<int> idx = bt.state_index[k];
    std::sort(idx.begin(), idx.end());
    for (int b = 0; b < bt.bands(); ++b) EXPECT_EQ(idx[b], b);
    for (int b = 0; b < bt.bands(); ++b) EXPECT_GT(bt.overlap[k][b], kMinTrackingOverlap);
  }
  const BandTrack some = track_bands(scan, thetas, std::vector<int>{0, 1, 2});
  EXPECT_EQ(some.bands(), 3);
}

TEST(TrackBands, RefusesUnrelatedStates) {
  FloquetDecomposition a;
  const int d = 8;
  a.quasienergies = RealVector::LinSpaced(d, -1, 1);
  a.mean_momentum = RealVector::Zero(d);
  a.kinetic = RealVector::LinSpaced(d, 0, 1);
  a.states = ComplexMatrix::Identity(d, d);
  a.order.resize(d);
  for (int i = 0; i < d; ++i) a.order[i] = i;
  FloquetDecomposition b = a;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) b.states(r, c) = std::polar(1.0 / std::sqrt(d), kTwoPi * r * c / d);
  EXPECT_THROW(track_bands({a, b}, {0.0, 1.0}), TrackingAmbiguity);
  EXPECT_THROW(track_bands({a, b}, {0.0}), InvalidArgument);
}

TEST(Spectrum, ReflectionAndHalfTurnRelations) {
  for (double theta : {0.3, -1.1, 2.0}) {
    const RealVector e = decomposition(tilting(2, 2, 2, theta, 0.4, 16)).quasienergies;
    const RealVector m = decomposition(tilting(2, 2, 2, -theta, 0.4, 16)).quasienergies;
    const RealVector s = decomposition(tilting(2, 2, 2, theta + kPi, 0.4, 16)).quasienergies;
    EXPECT_LT(set_distance(e, m), 1e-7);
    EXPECT_LT(set_distance(e, s), 1e-7);
  }
}

TEST(AvoidedCrossings, FlatSpectrumHasNone) {
  const FloquetDecomposition dec = decomposition(tilting(0, 0, 2, 0, 0.4, 16));
  const std::vector<FloquetDecomposition> scan(5, dec);
  const BandTrack bt = track_bands(scan, {0, 1, 2, 3, 4});
  EXPECT_TRUE(find_avoided_crossings(bt, 0.5).empty());
}

TEST(AvoidedCrossings, ParabolaRefinement) {
  // Two bands at +-sqrt((x - 0.13)^2 + 0.01).
  BandTrack bt;
  for (int k = 0; k < 11; ++k) {
    const double x = -0.5 + 0.1 * k;
    const double e = std::sqrt((x - 0.13) * (x - 0.13) + 0.01);
    bt.params.push_back(x);
    bt.state_index.push_back({0, 1});
    bt.quasienergy.push_back({-e, e});
    bt.mean_momentum.push_back({0, 0});
    bt.kinetic.push_back({0, 0});
    bt.overlap.push_back({1, 1});
  }
  const auto found = find_avoided_crossings(bt, 0.5);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_NEAR(found[0].param, 0.1, 1e-12);
  EXPECT_NEAR(found[0].gap, 2 * std::sqrt(0.03 * 0.03 + 0.01), 1e-12);
  EXPECT_NEAR(found[0].refined_param, 0.13, 0.02);
  EXPECT_TRUE(find_avoided_crossings(bt, 0.1).empty());
}

TEST(Export, CsvAndJsonShapes) {
  const FloquetDecomposition dec = decomposition(tilting(2, 2, 2, 0.4, 0.4, 4));
  const std::string csv = spectrum_csv(track_bands({dec}, {0.4}));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scan_param,band_id,quasienergy,mean_p,mean_p2,overlap_with_prev");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), dec.size() + 1);
  const auto j = nlohmann::json::parse(crossings_json({{0.1, 2, 3, 0.01, 0.12}}));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["band_a"], 2);
  EXPECT_DOUBLE_EQ(j[0]["refined_param"].get<double>(), 0.12);
}

}  // namespace
}  // namespace qratchet
