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

#include "qratchet/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <thread>

#include "composition.hpp"
#include "json.hpp"

namespace qratchet {
namespace {

const detail::Composition kComp = detail::fourth_order_composition();

double wrap_x(double x) {
  const double r = std::fmod(x, kTwoPi);
  return r < 0.0 ? r + kTwoPi : r;
}

double force(const RatchetSystem& sys, double x, double e) {
  if (sys.variant == Variant::kTilting) return std::sin(x) + e;
  return -flashing_shape_derivative(sys.potential, x) * e;
}

double force_gradient(const RatchetSystem& sys, double x, double e) {
  if (sys.variant == Variant::kTilting) return std::cos(x);
  const FlashingPotential& u = sys.potential;
  return u.k * (std::cos(x) + 4.0 * u.s * std::cos(2.0 * x + u.theta_p)) * e;
}

// Fixed-step integrator with the drive tabulated at the kick times of one
// period.
class Stepper {
 public:
  Stepper(const RatchetSystem& sys, int steps_per_period, double t_start)
      : sys_(sys), steps_(steps_per_period), dt_(sys.driving.period() / steps_per_period) {
    e_.resize(3 * static_cast<std::size_t>(steps_));
    for (int k = 0; k < steps_; ++k) {
      double tau = t_start + k * dt_;
      for (int i = 0; i < 3; ++i) {
        tau += kComp.a[i] * dt_;
        e_[3 * k + i] = field_value(sys.driving, tau);
      }
    }
  }

  int steps() const { return steps_; }
  double dt() const { return dt_; }

  void step(PhasePoint& pt, int k) const {
    const double* e = &e_[3 * static_cast<std::size_t>(k)];
    for (int i = 0; i < 3; ++i) {
      pt.x += kComp.a[i] * dt_ * pt.p;
      pt.p += kComp.b[i] * dt_ * force(sys_, pt.x, e[i]);
    }
    pt.x += kComp.a[3] * dt_ * pt.p;
  }

  // Step with the tangent vector (dx, dp) carried along.
  void step_tangent(PhasePoint& pt, PhasePoint& v, int k) const {
    const double* e = &e_[3 * static_cast<std::size_t>(k)];
    for (int i = 0; i < 3; ++i) {
      pt.x += kComp.a[i] * dt_ * pt.p;
      v.x += kComp.a[i] * dt_ * v.p;
      pt.p += kComp.b[i] * dt_ * force(sys_, pt.x, e[i]);
      v.p += kComp.b[i] * dt_ * force_gradient(sys_, pt.x, e[i]) * v.x;
    }
    pt.x += kComp.a[3] * dt_ * pt.p;
    v.x += kComp.a[3] * dt_ * v.p;
  }

  void period(PhasePoint& pt) const {
    for (int k = 0; k < steps_; ++k) step(pt, k);
  }

 private:
  const RatchetSystem& sys_;
  int steps_;
  double dt_;
  std::vector<double> e_;
};

void check_steps(int steps) {
  if (steps < 1) throw InvalidArgument("steps_per_period must be >= 1");
}

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += threads) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void integrate_classical(const RatchetSystem& sys, PhasePoint& pt, double t, double dt,
                         long n_steps) {
  for (long k = 0; k < n_steps; ++k) {
    double tau = t + k * dt;
    for (int i = 0; i < 3; ++i) {
      pt.x += kComp.a[i] * dt * pt.p;
      tau += kComp.a[i] * dt;
      pt.p += kComp.b[i] * dt * force(sys, pt.x, field_value(sys.driving, tau));
    }
    pt.x += kComp.a[3] * dt * pt.p;
  }
}

std::vector<PhasePoint> poincare_section(const RatchetSystem& sys,
                                         const std::vector<PhasePoint>& initial, int n_periods,
                                         int steps_per_period, double t_start) {
  check_steps(steps_per_period);
  const Stepper st(sys, steps_per_period, t_start);
  std::vector<PhasePoint> out;
  out.reserve(initial.size() * static_cast<std::size_t>(std::max(n_periods, 0)));
  for (PhasePoint pt : initial) {
    for (int m = 0; m < n_periods; ++m) {
      st.period(pt);
      out.push_back({wrap_x(pt.x), pt.p});
    }
  }
  return out;
}

std::vector<PhasePoint> kinetic_energy_map(const RatchetSystem& sys,
                                           const std::vector<PhasePoint>& initial, int n_periods,
                                           int steps_per_period, double t_start) {
  check_steps(steps_per_period);
  const Stepper st(sys, steps_per_period, t_start);
  std::vector<PhasePoint> out;
  for (PhasePoint pt : initial) {
    for (int m = 0; m < n_periods; ++m) {
      double acc = 0.5 * pt.p * pt.p;
      for (int k = 0; k < st.steps(); ++k) {
        st.step(pt, k);
        acc += (k + 1 == st.steps() ? 0.5 : 1.0) * pt.p * pt.p;
      }
      out.push_back({wrap_x(pt.x), acc / st.steps()});
    }
  }
  return out;
}

double finite_time_lyapunov(const RatchetSystem& sys, const PhasePoint& start, int n_periods,
                            int steps_per_period) {
  check_steps(steps_per_period);
  if (n_periods < 1) throw InvalidArgument("n_periods must be >= 1");
  const Stepper st(sys, steps_per_period, 0.0);
  PhasePoint pt = start;
  PhasePoint v{1.0, 0.0};
  double acc = 0.0;
  for (int m = 0; m < n_periods; ++m) {
    for (int k = 0; k < st.steps(); ++k) st.step_tangent(pt, v, k);
    const double nv = std::hypot(v.x, v.p);
    acc += std::log(nv);
    v.x /= nv;
    v.p /= nv;
  }
  return acc / n_periods;
}

double estimate_layer_bound(const RatchetSystem& sys, int n_periods, int steps_per_period) {
  check_steps(steps_per_period);
  double x0 = 0.0;
  if (sys.variant == Variant::kFlashing) {
    double best = -1e300;
    for (int j = 0; j < 4096; ++j) {
      const double x = kTwoPi * j / 4096;
      const double u = flashing_shape(sys.potential, x);
      if (u > best) {
        best = u;
        x0 = x;
      }
    }
  }
  const Stepper st(sys, steps_per_period, 0.0);
  PhasePoint pt{x0 + 1e-6, 0.0};
  double pmax = 0.0;
  for (int m = 0; m < n_periods; ++m) {
    st.period(pt);
    pmax = std::max(pmax, std::abs(pt.p));
  }
  return pmax;
}

ChaoticCurrent chaotic_current(const RatchetSystem& sys, const ChaoticCurrentConfig& cfg) {
  if (cfg.n_particles < 1 || cfg.n_periods < 1 || cfg.membership_periods < 1)
    throw InvalidArgument("chaotic_current needs positive particle and period counts");
  check_steps(cfg.steps_per_period);
  const Stepper st(sys, cfg.steps_per_period, 0.0);

  ChaoticCurrent out;
  out.requested = cfg.n_particles;
  out.periods = cfg.n_periods;
  out.p_bound = cfg.p_bound > 0.0 ? cfg.p_bound : estimate_layer_bound(sys, 2000, cfg.steps_per_period);

  // Candidates are drawn in a fixed order so the result depends only on
  // the seed; membership tests run in parallel.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(0.0, kTwoPi);
  std::uniform_real_distribution<double> up(-out.p_bound, out.p_bound);
  const long max_attempts = static_cast<long>(cfg.max_attempts_factor) * cfg.n_particles;
  std::vector<PhasePoint> accepted;
  long attempts = 0;
  constexpr int kBatch = 256;
  while (static_cast<int>(accepted.size()) < cfg.n_particles && attempts < max_attempts) {
    std::vector<PhasePoint> cand(kBatch);
    for (auto& c : cand) {
      c.x = ux(rng);
      c.p = up(rng);
    }
    attempts += kBatch;
    std::vector<char> ok(kBatch, 0);
    parallel_for(kBatch, cfg.threads, [&](int i) {
      PhasePoint pt = cand[i];
      PhasePoint v{1.0, 0.0};
      double lo = pt.p, hi = pt.p, acc = 0.0;
      for (int m = 0; m < cfg.membership_periods; ++m) {
        for (int k = 0; k < st.steps(); ++k) st.step_tangent(pt, v, k);
        lo = std::min(lo, pt.p);
        hi = std::max(hi, pt.p);
        const double nv = std::hypot(v.x, v.p);
        acc += std::log(nv);
        v.x /= nv;
        v.p /= nv;
        if (std::abs(pt.p) >= out.p_bound) return;
      }
      ok[i] = hi - lo > cfg.min_p_range && acc / cfg.membership_periods > cfg.min_lyapunov;
    });
    for (int i = 0; i < kBatch && static_cast<int>(accepted.size()) < cfg.n_particles; ++i)
      if (ok[i]) accepted.push_back(cand[i]);
  }
  const int n = static_cast<int>(accepted.size());
  if (10 * n < cfg.n_particles)
    throw InsufficientChaoticSamples("too few initial points inside the chaotic layer", n,
                                     cfg.n_particles);

  out.n = n;
  out.velocities.assign(n, 0.0);
  const double span = cfg.n_periods * sys.driving.period();
  parallel_for(n, cfg.threads, [&](int i) {
    PhasePoint pt = accepted[i];
    const double x0 = pt.x;
    for (int m = 0; m < cfg.n_periods; ++m) st.period(pt);
    out.velocities[i] = (pt.x - x0) / span;
  });
  double s = 0.0;
  for (double v : out.velocities) s += v;
  out.j = s / n;

  std::mt19937_64 boot(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int nb = std::max(2, cfg.bootstrap_samples);
  double m1 = 0.0, m2 = 0.0;
  for (int b = 0; b < nb; ++b) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += out.velocities[pick(boot)];
    const double mean = acc / n;
    m1 += mean;
    m2 += mean * mean;
  }
  m1 /= nb;
  out.stderr_j = std::sqrt(std::max(0.0, m2 / nb - m1 * m1) * nb / (nb - 1));
  return out;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& sigma, double b_min, double b_max) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2)
    throw InvalidArgument("power-law fit needs matching inputs with at least two points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] > 0.0) || !(sigma[i] > 0.0)) throw InvalidArgument("power-law fit needs x, sigma > 0");
  PowerLawFit best;
  best.chi2 = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 40000;
  for (int g = 0; g <= kGrid; ++g) {
    const double b = b_min + (b_max - b_min) * g / kGrid;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = 1.0 / (sigma[i] * sigma[i]);
      const double xb = std::pow(x[i], b);
      num += w * y[i] * xb;
      den += w * xb * xb;
    }
    const double c = num / den;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = (y[i] - c * std::pow(x[i], b)) / sigma[i];
      chi2 += r * r;
    }
    if (chi2 < best.chi2) best = {b, c, chi2};
  }
  return best;
}

std::string point_cloud_csv(const std::vector<PhasePoint>& pts, const std::string& second) {
  std::string s = "x," + second + "\n";
  char buf[64];
  for (const auto& q : pts) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", q.x, q.p);
    s += buf;
  }
  return s;
}

std::string chaotic_current_json(const ChaoticCurrent& c) {
  nlohmann::json j = {{"J_ch", c.j}, {"stderr", c.stderr_j}, {"n", c.n}, {"periods", c.periods},
                      {"requested", c.requested}, {"p_bound", c.p_bound}};
  return j.dump(2) + "\n";
}

}  // namespace qratchet
