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

#include "qratchet/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace qratchet {

InitialState InitialState::custom(ComplexVector c) {
  if (c.size() % 2 == 0) throw InvalidArgument("custom coefficients need odd length");
  const double nrm = c.norm();
  if (!(nrm > 0.0)) throw InvalidArgument("custom coefficients are zero");
  InitialState s;
  s.kind = InitialKind::kCustomCoefficients;
  s.coeffs = c / nrm;
  return s;
}

ComplexVector InitialState::coefficients(int n_cut) const {
  ComplexVector out = ComplexVector::Zero(2 * n_cut + 1);
  if (kind == InitialKind::kPlaneWaveZero) {
    out(n_cut) = 1.0;
    return out;
  }
  const int m = static_cast<int>(coeffs.size() - 1) / 2;
  for (int n = -std::min(m, n_cut); n <= std::min(m, n_cut); ++n) out(n + n_cut) = coeffs(n + m);
  return out;
}

namespace {

double cluster_current(const FloquetDecomposition& dec, const ComplexVector& c) {
  double j = 0.0;
  for (std::size_t k = 0; k < dec.clusters.size(); ++k) {
    const auto& idx = dec.clusters[k];
    if (idx.size() == 1) {
      j += dec.mean_momentum(idx[0]) * std::norm(c(idx[0]));
      continue;
    }
    ComplexVector sub(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t q = 0; q < idx.size(); ++q) sub(static_cast<Eigen::Index>(q)) = c(idx[q]);
    j += sub.dot(dec.cluster_momentum[k] * sub).real();
  }
  return j;
}

void check_weight(const ComplexVector& c) {
  const double w = c.squaredNorm();
  if (w < kMinInitialWeight) throw NormDeficit("initial state leaks outside the basis", w);
}

}  // namespace

ComplexVector floquet_weights(const FloquetDecomposition& dec, const InitialState& init) {
  const ComplexVector c = dec.states.adjoint() * init.coefficients(dec.n_cut);
  check_weight(c);
  return c;
}

double asymptotic_current_floquet(const FloquetDecomposition& dec, const InitialState& init) {
  return cluster_current(dec, floquet_weights(dec, init));
}

CurrentProfile current_profile(const FloquetMatrix& ref, const FloquetDecomposition& dec,
                               const InitialState& init, int n_t0) {
  if (n_t0 < 1) throw InvalidArgument("n_t0 must be >= 1");
  const int ns = static_cast<int>(ref.checkpoints.size());
  if (ref.t_start != 0.0) throw InvalidArgument("reference build must start at t = 0");
  if (ns == 0 || ns % n_t0 != 0)
    throw InvalidArgument("checkpoint count must be a multiple of n_t0");
  const double period = ref.period();
  const ComplexVector psi = init.coefficients(dec.n_cut);
  CurrentProfile out;
  for (int k = 0; k < n_t0; ++k) {
    const int j = (ns - k * (ns / n_t0)) % ns;
    const ComplexVector c = dec.states.adjoint() * (ref.checkpoints[j].adjoint() * psi);
    check_weight(c);
    out.t0.push_back(std::fmod(ref.system.driving.t0 + k * period / n_t0, period));
    out.j.push_back(cluster_current(dec, c));
  }
  double s = 0.0;
  for (double v : out.j) s += v;
  out.mean = s / n_t0;
  return out;
}

CurrentProfile averaged_current(const RatchetSystem& sys, const PropagatorConfig& cfg,
                                const InitialState& init, int n_t0) {
  if (n_t0 < 8) throw InvalidArgument("n_t0 must be >= 8");
  RatchetSystem ref_sys = sys;
  ref_sys.driving.t0 = 0.0;
  int ns = n_t0;
  while (ns < kDefaultSamples) ns += n_t0;
  const FloquetMatrix fm = build_floquet_matrix(ref_sys, cfg, 0.0, ns);
  const FloquetDecomposition dec = decompose(fm);
  return current_profile(fm, dec, init, n_t0);
}

RunningAverage evolve_running_average(const RatchetSystem& sys, const PropagatorConfig& cfg,
                                      const InitialState& init, int n_periods, int n_samples) {
  if (n_periods < 1) throw InvalidArgument("n_periods must be >= 1");
  if (n_samples < 2) throw InvalidArgument("n_samples must be >= 2");
  const FloquetMatrix fm = build_floquet_matrix(sys, cfg, 0.0, n_samples);
  const int d = sys.dim();
  const double h = sys.hbar;
  const double period = sys.driving.period();
  const bool tilting = sys.variant == Variant::kTilting;
  RealVector n(d);
  for (int i = 0; i < d; ++i) n(i) = i - sys.n_cut;
  std::vector<double> a(n_samples);
  for (int j = 0; j < n_samples; ++j)
    a[j] = tilting ? vector_potential(sys.driving, j * period / n_samples) : 0.0;

  RunningAverage out;
  ComplexVector psi = init.coefficients(sys.n_cut);
  if (psi.squaredNorm() < kMinInitialWeight)
    throw NormDeficit("initial state leaks outside the basis", psi.squaredNorm());
  const auto strobe = [&](const ComplexVector& v) { return h * v.cwiseAbs2().dot(n) - a[0]; };
  out.strobe_momentum.push_back(strobe(psi));

  const double dtau = period / n_samples;
  double integral = 0.0;
  constexpr int kChunk = 256;
  for (int m0 = 0; m0 < n_periods; m0 += kChunk) {
    const int cols = std::min(kChunk, n_periods - m0);
    ComplexMatrix block(d, cols + 1);
    block.col(0) = psi;
    for (int c = 1; c <= cols; ++c) block.col(c) = fm.u * block.col(c - 1);
    // s(j, c): pbar at t_j within period m0 + c.
    RealMatrix s(n_samples, cols + 1);
    for (int j = 0; j < n_samples; ++j) {
      const ComplexMatrix y = fm.checkpoints[j] * block;
      s.row(j) = (h * (y.cwiseAbs2().transpose() * n)).transpose().array() - a[j];
    }
    for (int c = 0; c < cols; ++c) {
      double acc = 0.5 * (s(0, c) + s(0, c + 1));
      for (int j = 1; j < n_samples; ++j) acc += s(j, c);
      integral += acc * dtau;
      const int m = m0 + c + 1;
      out.p.push_back(integral / (m * period));
      out.strobe_momentum.push_back(strobe(block.col(c + 1)));
    }
    psi = block.col(cols);
  }
  return out;
}

double HusimiGrid::mass() const {
  if (x.size() < 2 || p.size() < 2) return 0.0;
  const double dx = kTwoPi / static_cast<double>(x.size());
  const double dp = p[1] - p[0];
  return rho.sum() * dx * dp;
}

HusimiGrid husimi(const WaveState& state, double hbar, const HusimiSpec& spec) {
  if (spec.nx < 1 || spec.np < 2 || !(spec.p_max > 0.0))
    throw InvalidArgument("bad Husimi grid");
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be > 0");
  HusimiGrid g;
  g.hbar = hbar;
  g.sigma = std::sqrt(0.5 * hbar);
  g.time = state.time;
  g.frame_a = state.frame_a;
  for (int j = 0; j < spec.nx; ++j) g.x.push_back(kTwoPi * j / spec.nx);
  for (int i = 0; i < spec.np; ++i) g.p.push_back(-spec.p_max + 2.0 * spec.p_max * i / (spec.np - 1));
  g.rho = RealMatrix::Zero(spec.np, spec.nx);

  const int nc = state.n_cut();
  const double s2 = g.sigma * g.sigma;
  // <n|Phi> = (2 pi s^2)^(-1/4) sqrt(2 s^2) exp(-s^2 (n-k)^2) exp(-i (n-k) x).
  const double amp = std::pow(kTwoPi * s2, -0.25) * std::sqrt(2.0 * s2);
  const double norm = 1.0 / (kTwoPi * hbar);
  ComplexVector w(2 * nc + 1);
  for (int i = 0; i < spec.np; ++i) {
    const double k = (g.p[i] + state.frame_a) / hbar;
    for (int q = 0; q < 2 * nc + 1; ++q) {
      const double dn = (q - nc) - k;
      w(q) = std::conj(state.coeffs(q)) * (amp * std::exp(-s2 * dn * dn));
    }
    for (int j = 0; j < spec.nx; ++j) {
      Complex acc = 0.0;
      const Complex step = std::polar(1.0, -g.x[j]);
      Complex ph = std::polar(1.0, -(-nc - k) * g.x[j]);
      for (int q = 0; q < 2 * nc + 1; ++q) {
        acc += w(q) * ph;
        ph *= step;
      }
      g.rho(i, j) = std::norm(acc) * norm;
    }
  }
  return g;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

std::string current_csv(double theta, const CurrentProfile& profile) {
  std::string s = "theta,t0,J\n";
  for (std::size_t k = 0; k < profile.t0.size(); ++k)
    s += num(theta) + "," + num(profile.t0[k]) + "," + num(profile.j[k]) + "\n";
  return s;
}

std::string running_average_csv(const RunningAverage& ra) {
  std::string s = "period_index,P\n";
  for (std::size_t m = 0; m < ra.p.size(); ++m) s += std::to_string(m + 1) + "," + num(ra.p[m]) + "\n";
  return s;
}

std::string husimi_csv(const HusimiGrid& g) {
  std::string s = "x,p,rho\n";
  for (std::size_t i = 0; i < g.p.size(); ++i)
    for (std::size_t j = 0; j < g.x.size(); ++j)
      s += num(g.x[j]) + "," + num(g.p[i]) + "," +
           num(g.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) + "\n";
  return s;
}

std::string husimi_header_json(const HusimiGrid& g, const HusimiSpec& spec) {
  nlohmann::json j = {{"nx", spec.nx},         {"np", spec.np},    {"p_max", spec.p_max},
                      {"sigma", g.sigma},      {"hbar", g.hbar},   {"t", g.time},
                      {"A_t", g.frame_a},      {"mass", g.mass()}};
  return j.dump(2) + "\n";
}

}  // namespace qratchet
