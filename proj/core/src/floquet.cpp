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

#include "qratchet/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <tuple>

#include <Eigen/Eigenvalues>
#include "json.hpp"

namespace qratchet {
namespace {

// (K v)_n = conj(v_{-n}); maps eigenspaces of a codiagonally symmetric
// unitary onto themselves.
ComplexVector k_map(const ComplexVector& v) { return v.reverse().conjugate(); }

// Replaces the columns `idx` of b by an orthonormal K-invariant basis of
// their span, picking at each step the candidate v + Kv or i(v - Kv) with
// the largest remainder. Returns false if the span could not be filled.
bool k_invariant_basis(ComplexMatrix& b, const std::vector<int>& idx) {
  std::vector<ComplexVector> cand;
  for (int c : idx) {
    const ComplexVector v = b.col(c);
    const ComplexVector kv = k_map(v);
    cand.emplace_back(v + kv);
    cand.emplace_back(Complex(0, 1) * (v - kv));
  }
  std::vector<ComplexVector> basis;
  while (basis.size() < idx.size()) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const double nu = cand[i].norm();
      if (nu > best_norm) {
        best_norm = nu;
        best = i;
      }
    }
    if (best_norm < 1e-6) return false;
    const ComplexVector e = cand[best] / best_norm;
    basis.push_back(e);
    // Inner products of K-invariant vectors are real.
    for (auto& c : cand) c -= e.dot(c).real() * e;
  }
  for (std::size_t i = 0; i < idx.size(); ++i) b.col(idx[i]) = basis[i];
  return true;
}

double circular_gap(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace

double check_timereversal_property(const ComplexMatrix& u) {
  const Eigen::Index d = u.rows();
  double worst = 0.0;
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      worst = std::max(worst, std::abs(u(r, c) - u(d - 1 - c, d - 1 - r)));
  return worst;
}

double check_shift_property(const ComplexMatrix& u_full, const ComplexMatrix& u_half) {
  const ComplexMatrix puhp = u_half.reverse();
  return (u_full - puhp * u_half).cwiseAbs().maxCoeff();
}

FloquetDecomposition decompose(const FloquetMatrix& fm) {
  const ComplexMatrix& u = fm.u;
  const int d = static_cast<int>(u.rows());
  std::vector<ComplexMatrix> rebuilt;
  const std::vector<ComplexMatrix>* checkpoints = &fm.checkpoints;
  if (fm.checkpoints.empty()) {
    rebuilt = build_floquet_matrix(fm.system, fm.config, fm.t_start, kDefaultSamples).checkpoints;
    checkpoints = &rebuilt;
  }

  Eigen::ComplexSchur<ComplexMatrix> schur(u);
  if (schur.info() != Eigen::Success) throw Error("Schur decomposition failed");
  ComplexMatrix b = schur.matrixU();
  const ComplexVector lambda = schur.matrixT().diagonal();

  FloquetDecomposition dec;
  dec.t_start = fm.t_start;
  dec.hbar = fm.system.hbar;
  dec.n_cut = fm.system.n_cut;
  dec.quasienergies.resize(d);
  for (int a = 0; a < d; ++a) {
    if (std::abs(std::abs(lambda(a)) - 1.0) >= 1e-8)
      throw Error("Floquet eigenvalue off the unit circle");
    dec.quasienergies(a) = wrap_phase(-std::arg(lambda(a)));
  }

  // Groups of eigenphases closer than `gap`, walking the circle.
  const auto make_clusters = [&](double gap) {
    std::vector<int> by_phase(d);
    std::iota(by_phase.begin(), by_phase.end(), 0);
    std::sort(by_phase.begin(), by_phase.end(),
              [&](int x, int y) { return dec.quasienergies(x) < dec.quasienergies(y); });
    std::vector<std::vector<int>> out;
    for (int k = 0; k < d; ++k) {
      const int a = by_phase[k];
      if (!out.empty() && circular_gap(dec.quasienergies(out.back().back()), dec.quasienergies(a)) < gap)
        out.back().push_back(a);
      else
        out.push_back({a});
    }
    if (out.size() > 1 &&
        circular_gap(dec.quasienergies(out.back().back()), dec.quasienergies(out.front().front())) < gap) {
      out.front().insert(out.front().begin(), out.back().begin(), out.back().end());
      out.pop_back();
    }
    return out;
  };

  ComplexVector eig = lambda;
  dec.symmetric_strobe = check_timereversal_property(u) < kSymmetricStrobeTolerance;
  if (dec.symmetric_strobe) {
    // Near-degenerate doublets come out of the Schur form mixed. In a
    // K-invariant basis of their span the projected propagator is complex
    // symmetric, so a real rotation separates the partners and keeps them
    // K-invariant.
    for (const auto& c : make_clusters(kSymmetricPairGap)) {
      if (c.size() < 2) continue;
      if (!k_invariant_basis(b, c)) {
        dec.warnings.push_back("DegenerateSubspaceAmbiguity: K-invariant basis not found for a cluster of " +
                               std::to_string(c.size()) + " states");
        continue;
      }
      const int k = static_cast<int>(c.size());
      ComplexMatrix w(d, k);
      for (int q = 0; q < k; ++q) w.col(q) = b.col(c[q]);
      ComplexMatrix s = w.adjoint() * u * w;
      s *= std::polar(1.0, -std::arg(s.trace()));
      const RealMatrix gen = 0.5 * (s.imag() + s.imag().transpose());
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(gen);
      const ComplexMatrix rotated = w * es.eigenvectors().cast<Complex>();
      for (int q = 0; q < k; ++q) {
        b.col(c[q]) = rotated.col(q);
        eig(c[q]) = rotated.col(q).dot(u * rotated.col(q));
        dec.quasienergies(c[q]) = wrap_phase(-std::arg(eig(c[q])));
      }
    }
  }
  std::vector<std::vector<int>> clusters = make_clusters(kDegeneracyGap);

  double residual = 0.0;
  for (int a = 0; a < d; ++a)
    residual = std::max(residual, (u * b.col(a) - eig(a) * b.col(a)).norm());
  dec.eigen_residual = residual;
  dec.orthonormality_defect = (b.adjoint() * b - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (residual >= 1e-7) throw Error("Floquet eigenvector residual too large");

  // Period averages over the checkpoints.
  const DrivingField& f = fm.system.driving;
  const bool tilting = fm.system.variant == Variant::kTilting;
  const double h = fm.system.hbar;
  const double period = f.period();
  const int ns = static_cast<int>(checkpoints->size());
  RealVector n(d);
  for (int i = 0; i < d; ++i) n(i) = i - fm.system.n_cut;
  dec.mean_momentum = RealVector::Zero(d);
  dec.kinetic = RealVector::Zero(d);
  dec.cluster_momentum.assign(clusters.size(), ComplexMatrix());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const int k = static_cast<int>(clusters[c].size());
    dec.cluster_momentum[c] = ComplexMatrix::Zero(k, k);
  }
  for (int j = 0; j < ns; ++j) {
    const double t = fm.t_start + j * period / ns;
    const double a_t = tilting ? vector_potential(f, t) : 0.0;
    const ComplexMatrix psi = (*checkpoints)[j] * b;
    const RealVector p = h * n.array() - a_t;
    const RealMatrix prob = psi.cwiseAbs2();
    dec.mean_momentum += prob.transpose() * p / ns;
    dec.kinetic += prob.transpose() * p.cwiseAbs2() / ns;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const auto& idx = clusters[c];
      const int k = static_cast<int>(idx.size());
      if (k == 1) continue;
      ComplexMatrix sub(d, k);
      for (int q = 0; q < k; ++q) sub.col(q) = psi.col(idx[q]);
      dec.cluster_momentum[c] += sub.adjoint() * (p.cast<Complex>().asDiagonal() * sub) / double(ns);
    }
  }
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].size() == 1)
      dec.cluster_momentum[c](0, 0) = dec.mean_momentum(clusters[c][0]);
  }
  const double a0 = tilting ? vector_potential(f, fm.t_start) : 0.0;
  dec.strobe_momentum = (b.cwiseAbs2().transpose() * (h * n.array() - a0).matrix());
  dec.clusters = std::move(clusters);
  dec.states = std::move(b);

  dec.order.resize(d);
  std::iota(dec.order.begin(), dec.order.end(), 0);
  std::stable_sort(dec.order.begin(), dec.order.end(),
                   [&](int x, int y) { return dec.kinetic(x) < dec.kinetic(y); });
  return dec;
}

std::vector<double> cumulative_momentum(const FloquetDecomposition& dec) {
  std::vector<double> out;
  const int d = static_cast<int>(dec.order.size());
  if (d == 0) return out;
  double acc = dec.mean_momentum(dec.order[0]);
  out.push_back(acc);
  for (int a = 0; a + 2 < d; a += 2) {
    acc += dec.mean_momentum(dec.order[a + 1]) + dec.mean_momentum(dec.order[a + 2]);
    out.push_back(acc);
  }
  return out;
}

BandTrack track_bands(const std::vector<FloquetDecomposition>& scan,
                      const std::vector<double>& params,
                      const std::optional<std::vector<int>>& bands) {
  if (scan.size() != params.size()) throw InvalidArgument("scan and params differ in length");
  if (scan.empty()) throw InvalidArgument("empty scan");
  const int d = scan.front().size();
  for (const auto& s : scan)
    if (s.size() != d) throw InvalidArgument("scan points differ in dimension");

  std::vector<int> ids;
  if (bands) {
    ids = *bands;
    for (int id : ids)
      if (id < 0 || id >= d) throw InvalidArgument("band id out of range");
  } else {
    ids.resize(d);
    std::iota(ids.begin(), ids.end(), 0);
  }
  const int nb = static_cast<int>(ids.size());

  BandTrack bt;
  bt.params = params;
  std::vector<int> current(nb);
  for (int q = 0; q < nb; ++q) current[q] = scan.front().order[ids[q]];

  const auto record = [&](std::size_t k, const std::vector<int>& idx, const std::vector<double>& ov) {
    const FloquetDecomposition& s = scan[k];
    bt.state_index.push_back(idx);
    std::vector<double> e(nb), p(nb), p2(nb);
    for (int q = 0; q < nb; ++q) {
      e[q] = s.quasienergies(idx[q]);
      p[q] = s.mean_momentum(idx[q]);
      p2[q] = s.kinetic(idx[q]);
    }
    bt.quasienergy.push_back(std::move(e));
    bt.mean_momentum.push_back(std::move(p));
    bt.kinetic.push_back(std::move(p2));
    bt.overlap.push_back(ov);
  };
  record(0, current, std::vector<double>(nb, 1.0));

  for (std::size_t k = 1; k < scan.size(); ++k) {
    const FloquetDecomposition& prev = scan[k - 1];
    const FloquetDecomposition& next = scan[k];
    ComplexMatrix sub(d, nb);
    for (int q = 0; q < nb; ++q) sub.col(q) = prev.states.col(current[q]);
    const RealMatrix ov = (sub.adjoint() * next.states).cwiseAbs();
    std::vector<std::tuple<double, double, int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(nb) * d);
    for (int q = 0; q < nb; ++q)
      for (int c = 0; c < d; ++c)
        pairs.emplace_back(-ov(q, c),
                           circular_gap(prev.quasienergies(current[q]), next.quasienergies(c)), q, c);
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> match(nb, -1);
    std::vector<char> taken(d, 0);
    std::vector<double> best(nb, 0.0);
    int assigned = 0;
    for (const auto& [neg, gap, q, c] : pairs) {
      if (match[q] >= 0 || taken[c]) continue;
      match[q] = c;
      taken[c] = 1;
      best[q] = -neg;
      if (++assigned == nb) break;
    }
    for (int q = 0; q < nb; ++q) {
      if (best[q] <= kMinTrackingOverlap)
        throw TrackingAmbiguity("band overlap too small; refine the parameter grid",
                                static_cast<int>(k), best[q]);
    }
    current = match;
    record(k, current, best);
  }
  return bt;
}

std::vector<AvoidedCrossing> find_avoided_crossings(const BandTrack& bt, double gap_threshold) {
  std::vector<AvoidedCrossing> out;
  const int np = static_cast<int>(bt.params.size());
  const int nb = bt.bands();
  if (np < 3) return out;
  std::vector<double> g(np);
  for (int a = 0; a < nb; ++a) {
    for (int b = a + 1; b < nb; ++b) {
      for (int k = 0; k < np; ++k) g[k] = circular_gap(bt.quasienergy[k][a], bt.quasienergy[k][b]);
      for (int k = 1; k + 1 < np; ++k) {
        if (!(g[k] < gap_threshold)) continue;
        if (g[k] > g[k - 1] || g[k] > g[k + 1]) continue;
        if (g[k] == g[k - 1] && g[k] == g[k + 1]) continue;
        if (g[k] == g[k - 1]) continue;  // report each flat minimum once
        const double x0 = bt.params[k - 1], x1 = bt.params[k], x2 = bt.params[k + 1];
        const double y0 = g[k - 1], y1 = g[k], y2 = g[k + 1];
        const double den = (x0 - x1) * (x0 - x2) * (x1 - x2);
        double vertex = x1;
        if (std::abs(den) > 0.0) {
          const double ca = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
          const double cb = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
          if (ca > 0.0) vertex = std::clamp(-cb / (2.0 * ca), std::min(x0, x2), std::max(x0, x2));
        }
        out.push_back({x1, a, b, g[k], vertex});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const AvoidedCrossing& x, const AvoidedCrossing& y) {
    return std::tie(x.param, x.band_a, x.band_b) < std::tie(y.param, y.band_a, y.band_b);
  });
  return out;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

std::string spectrum_csv(const BandTrack& bt) {
  std::string s = "scan_param,band_id,quasienergy,mean_p,mean_p2,overlap_with_prev\n";
  for (std::size_t k = 0; k < bt.params.size(); ++k) {
    for (int b = 0; b < bt.bands(); ++b) {
      s += num(bt.params[k]) + "," + std::to_string(b) + "," + num(bt.quasienergy[k][b]) + "," +
           num(bt.mean_momentum[k][b]) + "," + num(bt.kinetic[k][b]) + "," + num(bt.overlap[k][b]) + "\n";
    }
  }
  return s;
}

std::string crossings_json(const std::vector<AvoidedCrossing>& crossings) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : crossings) {
    out.push_back({{"param", c.param},
                   {"band_a", c.band_a},
                   {"band_b", c.band_b},
                   {"gap", c.gap},
                   {"refined_param", c.refined_param}});
  }
  return out.dump(2) + "\n";
}

}  // namespace qratchet
