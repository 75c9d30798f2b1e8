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

#include "qratchet/twolevel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qratchet {

void TwoLevelModel::validate() const {
  if (n < 1) throw InvalidArgument("two-level index n must be >= 1");
}

Eigen::Matrix2d two_level_propagator(const TwoLevelModel& m) {
  Eigen::Matrix2d u;
  u << 1.0 - m.epsilon, m.delta, m.delta, 1.0 + m.epsilon;
  return u;
}

TwoLevelStates eigenstates(const TwoLevelModel& m) {
  m.validate();
  TwoLevelStates s;
  if (m.delta == 0.0) {
    s.zero_coupling = true;
    if (m.epsilon > 0.0) {
      s.phi_s << 0.0, 1.0;
      s.phi_a << 1.0, 0.0;
    } else if (m.epsilon < 0.0) {
      s.phi_s << 1.0, 0.0;
      s.phi_a << 0.0, -1.0;
    } else {
      s.phi_s << M_SQRT1_2, M_SQRT1_2;
      s.phi_a << M_SQRT1_2, -M_SQRT1_2;
    }
    return s;
  }
  const double gm = m.gamma();
  // gamma + sqrt(1 + gamma^2), written to avoid cancellation for gamma < 0.
  const double g = gm >= 0.0 ? gm + std::hypot(1.0, gm) : 1.0 / (std::hypot(1.0, gm) - gm);
  const double l = std::hypot(1.0, g);
  s.phi_s << 1.0 / l, g / l;
  s.phi_a << g / l, -1.0 / l;
  return s;
}

std::pair<double, double> momenta(const TwoLevelModel& m) {
  const TwoLevelStates s = eigenstates(m);
  const auto p = [&](const Eigen::Vector2d& v) { return m.n * (v(0) * v(0) - v(1) * v(1)); };
  return {p(s.phi_s), p(s.phi_a)};
}

std::pair<double, double> momenta_small_gamma(const TwoLevelModel& m) {
  const double g = m.gamma();
  return {-g * m.n, g * m.n};
}

std::pair<double, double> momenta_large_gamma(const TwoLevelModel& m) {
  const double g = m.gamma();
  const double mag = m.n * (1.0 + 1.0 / (4.0 * g * g));
  return {-mag, mag};
}

std::vector<FloquetDecomposition> synthetic_scan(int n, double delta,
                                                 const std::vector<double>& epsilons) {
  std::vector<FloquetDecomposition> out;
  for (double eps : epsilons) {
    const TwoLevelModel m{n, delta, eps};
    const TwoLevelStates s = eigenstates(m);
    const auto [ps, pa] = momenta(m);
    const double w = std::hypot(eps, delta);
    FloquetDecomposition d;
    d.quasienergies.resize(2);
    // H Phi_s = +w Phi_s, H Phi_a = -w Phi_a.
    d.quasienergies << w, -w;
    d.states.resize(2, 2);
    d.states.col(0) = s.phi_s.cast<Complex>();
    d.states.col(1) = s.phi_a.cast<Complex>();
    d.mean_momentum.resize(2);
    d.mean_momentum << ps, pa;
    d.strobe_momentum = d.mean_momentum;
    d.kinetic = RealVector::Constant(2, double(n) * n);
    d.order = {0, 1};
    d.clusters = {{0}, {1}};
    d.cluster_momentum = {ComplexMatrix::Constant(1, 1, ps), ComplexMatrix::Constant(1, 1, pa)};
    d.n_cut = n;
    d.hbar = 1.0;
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

// Least squares y = a + b x; returns (a, b, rms, residuals).
void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double* a, double* b,
                double* rms, std::vector<double>* res) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InvalidArgument("degenerate fit abscissae");
  *b = (n * sxy - sx * sy) / den;
  *a = (sy - *b * sx) / n;
  double ss = 0.0;
  if (res) res->clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (*a + *b * x[i]);
    ss += r * r;
    if (res) res->push_back(r);
  }
  *rms = std::sqrt(ss / n);
}

}  // namespace

SplittingFit splitting_scaling(const std::vector<std::pair<int, double>>& series) {
  std::vector<double> xs, xn, y;
  for (const auto& [n, d] : series) {
    if (n < 2 || !(d > 0.0)) continue;
    xs.push_back(n * std::log(static_cast<double>(n)));
    xn.push_back(n);
    y.push_back(std::log(d));
  }
  if (y.size() < 3) throw InvalidArgument("splitting fit needs three points with n >= 2, delta > 0");
  SplittingFit f;
  linear_fit(xs, y, &f.intercept, &f.slope, &f.rms_residual, &f.residuals);
  double a = 0.0;
  linear_fit(xn, y, &a, &f.exp_slope, &f.exp_rms_residual, nullptr);
  return f;
}

std::vector<std::pair<int, double>> doublet_gaps(const FloquetDecomposition& dec) {
  std::map<int, std::vector<int>> by_label;
  const int d = dec.size();
  for (int a = 0; a < d; ++a) {
    const auto col = dec.states.col(a);
    int best = 0;
    double wbest = -1.0;
    for (int k = 0; k <= dec.n_cut; ++k) {
      double w = std::norm(col(dec.n_cut + k));
      if (k > 0) w += std::norm(col(dec.n_cut - k));
      if (w > wbest) {
        wbest = w;
        best = k;
      }
    }
    by_label[best].push_back(a);
  }
  std::vector<std::pair<int, double>> out;
  for (const auto& [n, idx] : by_label) {
    if (n < 1 || idx.size() != 2) continue;
    out.emplace_back(n, std::abs(wrap_phase(dec.quasienergies(idx[0]) - dec.quasienergies(idx[1]))));
  }
  return out;
}

}  // namespace qratchet
