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

#include "qratchet/propagator.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <thread>

#include <Eigen/Eigenvalues>

#include "composition.hpp"

namespace qratchet {
namespace {

using detail::Composition;
const Composition kComposition = detail::fourth_order_composition();

bool whole_steps(double span, double dt, long* steps) {
  const double r = span / dt;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-7 * std::max(1.0, k)) return false;
  *steps = static_cast<long>(k);
  return true;
}

}  // namespace

void PropagatorConfig::validate() const {
  if (steps_per_period < 64) throw InvalidArgument("steps_per_period must be >= 64");
  if (!(ode_tolerance > 0.0) || ode_tolerance > 1e-4)
    throw InvalidArgument("ode_tolerance must lie in (0, 1e-4]");
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

std::string to_string(Scheme s) {
  return s == Scheme::kKickSplit ? "kick_split" : "interaction_picture";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "kick_split") return Scheme::kKickSplit;
  if (s == "interaction_picture") return Scheme::kInteractionPicture;
  throw InvalidArgument("unknown scheme: " + s);
}

KickSplitTables KickSplitTables::build(const RatchetSystem& sys) {
  const int d = sys.dim();
  KickSplitTables t;
  t.m = ComplexMatrix::Zero(d, d);
  if (sys.variant == Variant::kTilting) {
    RealMatrix m = RealMatrix::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) m(i, i + 1) = m(i + 1, i) = 0.5 / sys.hbar;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
    t.m = m.cast<Complex>();
    t.q = es.eigenvectors().cast<Complex>();
    t.vtilde = es.eigenvalues();
  } else {
    const FlashingPotential& u = sys.potential;
    const double c1 = 0.5 * u.k / sys.hbar;
    const Complex c2 = 0.5 * u.k * u.s / sys.hbar * std::polar(1.0, u.theta_p);
    for (int i = 0; i + 1 < d; ++i) t.m(i, i + 1) = t.m(i + 1, i) = c1;
    for (int i = 0; i + 2 < d; ++i) {
      t.m(i + 2, i) = c2;
      t.m(i, i + 2) = std::conj(c2);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(t.m);
    t.q = es.eigenvectors();
    t.vtilde = es.eigenvalues();
  }
  return t;
}

double KickSplitTables::reconstruction_error() const {
  const ComplexMatrix r = q * vtilde.cast<Complex>().asDiagonal() * q.adjoint();
  return (r - m).cwiseAbs().maxCoeff();
}

Propagator::Propagator(const RatchetSystem& sys, const PropagatorConfig& cfg)
    : sys_(sys), cfg_(cfg) {
  sys_.validate();
  cfg_.validate();
  const int d = sys_.dim();
  n_.resize(d);
  for (int i = 0; i < d; ++i) n_(i) = i - sys_.n_cut;
  if (cfg_.scheme == Scheme::kKickSplit) {
    tables_ = KickSplitTables::build(sys_);
    if (sys_.variant == Variant::kTilting) {
      const double dt = time_step();
      const auto flow = [&](double w) {
        const ComplexVector ph =
            (tables_.vtilde * (-w * dt)).unaryExpr([](double a) { return std::polar(1.0, a); });
        return ComplexMatrix(tables_.q * ph.asDiagonal() * tables_.q.adjoint());
      };
      tilting_flows_.push_back(flow(kComposition.b[0]));
      tilting_flows_.push_back(flow(kComposition.b[1]));
      tilting_flows_.push_back(flow(1.0));
    }
  }
}

double Propagator::time_step() const noexcept {
  return sys_.driving.period() / cfg_.steps_per_period;
}

void Propagator::apply_kinetic(ComplexMatrix& block, double t1, double t2) const {
  const double h = sys_.hbar;
  double di = 0.0;
  double global = 0.0;
  if (sys_.variant == Variant::kTilting) {
    di = vector_potential_integral(sys_.driving, t1, t2);
    if (cfg_.keep_a_squared)
      global = vector_potential_squared_integral(sys_.driving, t1, t2) / (2.0 * h);
  }
  const double span = t2 - t1;
  ComplexVector ph(n_.size());
  for (int i = 0; i < n_.size(); ++i) {
    const double n = n_(i);
    ph(i) = std::polar(1.0, -(0.5 * h * n * n * span - n * di + global));
  }
  block.array().colwise() *= ph.array();
}

void Propagator::apply_potential(ComplexMatrix& block, double t1, double t2, int slot) const {
  if (sys_.variant == Variant::kTilting) {
    const ComplexMatrix tmp = tilting_flows_[slot] * block;
    block = tmp;
    return;
  }
  const double w = field_integral(sys_.driving, t1, t2);
  const ComplexVector ph =
      (tables_.vtilde * (-w)).unaryExpr([](double a) { return std::polar(1.0, a); });
  const ComplexMatrix rotated = tables_.q.adjoint() * block;
  block.noalias() = tables_.q * (ph.asDiagonal() * rotated);
}

void Propagator::apply_first_order_step(ComplexMatrix& block, double t) const {
  const double dt = time_step();
  const double h = sys_.hbar;
  if (sys_.variant == Variant::kTilting) {
    const ComplexMatrix tmp = tilting_flows_[2] * block;
    block = tmp;
  } else {
    const double w = field_value(sys_.driving, t) * dt;
    const ComplexVector ph =
        (tables_.vtilde * (-w)).unaryExpr([](double a) { return std::polar(1.0, a); });
    const ComplexMatrix rotated = tables_.q.adjoint() * block;
    block.noalias() = tables_.q * (ph.asDiagonal() * rotated);
  }
  const double a = sys_.variant == Variant::kTilting ? vector_potential(sys_.driving, t) : 0.0;
  const double a2 = cfg_.keep_a_squared ? a * a / (h * h) : 0.0;
  ComplexVector ph(n_.size());
  for (int i = 0; i < n_.size(); ++i) {
    const double n = n_(i);
    ph(i) = std::polar(1.0, -0.5 * h * dt * (n * n - 2.0 * n * a / h + a2));
  }
  block.array().colwise() *= ph.array();
}

void Propagator::kick_split_step(ComplexMatrix& block, double t) const {
  if (cfg_.split_order == SplitOrder::kFirst) {
    apply_first_order_step(block, t);
    return;
  }
  const double dt = time_step();
  const Composition& c = kComposition;
  const int slots[3] = {0, 1, 0};
  double tau = t;
  if (sys_.variant == Variant::kTilting) {
    // Time advances with the kinetic sub-flows, which carry A(t).
    for (int i = 0; i < 3; ++i) {
      const double next = tau + c.a[i] * dt;
      apply_kinetic(block, tau, next);
      tau = next;
      apply_potential(block, tau, tau, slots[i]);
    }
    apply_kinetic(block, tau, t + dt);
  } else {
    // Time advances with the potential sub-flows, which carry E(t).
    for (int i = 0; i < 3; ++i) {
      apply_kinetic(block, 0.0, c.a[i] * dt);
      const double next = i == 2 ? t + dt : tau + c.b[i] * dt;
      apply_potential(block, tau, next, slots[i]);
      tau = next;
    }
    apply_kinetic(block, 0.0, c.a[3] * dt);
  }
}

namespace {

// Amplitude equations da/dt for a block of columns stored as interleaved
// (re, im) doubles, column after column.
class AmplitudeRhs {
 public:
  AmplitudeRhs(const RatchetSystem& sys, double t_ref, int cols)
      : sys_(sys), t_ref_(t_ref), cols_(cols), d_(sys.dim()) {
    r1_.resize(d_);
    r2_.resize(d_);
  }

  void operator()(const std::vector<double>& x, std::vector<double>& dxdt, double t) {
    const auto* a = reinterpret_cast<const Complex*>(x.data());
    auto* da = reinterpret_cast<Complex*>(dxdt.data());
    const int nc = sys_.n_cut;
    const double h = sys_.hbar;
    const double tau = t - t_ref_;
    if (sys_.variant == Variant::kTilting) {
      const double di = vector_potential_integral(sys_.driving, t_ref_, t);
      // r1_[i] = phi_{n+1} / phi_n.
      for (int i = 0; i + 1 < d_; ++i) {
        const double n = i - nc;
        r1_[i] = std::polar(1.0, -(0.5 * h * (2.0 * n + 1.0) * tau - di));
      }
      const Complex g(0.0, -0.5 / h);
      for (int c = 0; c < cols_; ++c) {
        const Complex* ac = a + static_cast<long>(c) * d_;
        Complex* dc = da + static_cast<long>(c) * d_;
        for (int i = 0; i < d_; ++i) {
          Complex z = 0.0;
          if (i + 1 < d_) z += r1_[i] * ac[i + 1];
          if (i > 0) z += std::conj(r1_[i - 1]) * ac[i - 1];
          dc[i] = g * z;
        }
      }
      return;
    }
    const FlashingPotential& u = sys_.potential;
    const double e = field_value(sys_.driving, t);
    for (int i = 0; i < d_; ++i) {
      const double n = i - nc;
      r1_[i] = std::polar(1.0, -0.5 * h * (2.0 * n + 1.0) * tau);
      r2_[i] = std::polar(1.0, -0.5 * h * (4.0 * n + 4.0) * tau);
    }
    const Complex g(0.0, -e / h);
    const double c1 = 0.5 * u.k;
    const Complex up = 0.5 * u.k * u.s * std::polar(1.0, -u.theta_p);  // (n, n+2)
    const Complex dn = std::conj(up);                                     // (n, n-2)
    for (int c = 0; c < cols_; ++c) {
      const Complex* ac = a + static_cast<long>(c) * d_;
      Complex* dc = da + static_cast<long>(c) * d_;
      for (int i = 0; i < d_; ++i) {
        Complex z = 0.0;
        if (i + 1 < d_) z += c1 * r1_[i] * ac[i + 1];
        if (i > 0) z += c1 * std::conj(r1_[i - 1]) * ac[i - 1];
        if (i + 2 < d_) z += up * r2_[i] * ac[i + 2];
        if (i > 1) z += dn * std::conj(r2_[i - 2]) * ac[i - 2];
        dc[i] = g * z;
      }
    }
  }

 private:
  const RatchetSystem& sys_;
  double t_ref_;
  int cols_;
  int d_;
  std::vector<Complex> r1_, r2_;
};

}  // namespace

void Propagator::interaction_picture_step(ComplexMatrix& block, double t, double dt) const {
  namespace odeint = boost::numeric::odeint;
  if (dt <= 0.0) return;
  const int d = sys_.dim();
  const int cols = static_cast<int>(block.cols());
  std::vector<double> x(2 * static_cast<std::size_t>(d) * cols);
  auto* xv = reinterpret_cast<Complex*>(x.data());
  for (int c = 0; c < cols; ++c)
    for (int i = 0; i < d; ++i) xv[static_cast<long>(c) * d + i] = block(i, c);

  AmplitudeRhs rhs(sys_, t, cols);
  using State = std::vector<double>;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(
      cfg_.ode_tolerance, cfg_.ode_tolerance);
  const double t_end = t + dt;
  const double dt_min = 1e-12 * sys_.driving.period();
  double now = t;
  double h = std::min(dt, sys_.driving.period() / 256.0);
  while (t_end - now > 1e-14 * std::max(1.0, std::abs(t_end))) {
    if (now + h > t_end) h = t_end - now;
    const auto res = stepper.try_step(std::ref(rhs), x, now, h);
    if (res == odeint::fail && h < dt_min)
      throw StepSizeUnderflow("interaction-picture step size fell below the minimum");
  }

  // Back to the physical coefficients c_n = a_n phi_n(t_end) / phi_n(t).
  const double span = t_end - t;
  double di = 0.0;
  double global = 0.0;
  if (sys_.variant == Variant::kTilting) {
    di = vector_potential_integral(sys_.driving, t, t_end);
    if (cfg_.keep_a_squared)
      global = vector_potential_squared_integral(sys_.driving, t, t_end) / (2.0 * sys_.hbar);
  }
  for (int i = 0; i < d; ++i) {
    const double n = i - sys_.n_cut;
    const Complex phi = std::polar(1.0, -(0.5 * sys_.hbar * n * n * span - n * di + global));
    for (int c = 0; c < cols; ++c) block(i, c) = xv[static_cast<long>(c) * d + i] * phi;
  }
}

void Propagator::evolve_serial(ComplexMatrix& block, double t1, double t2) const {
  if (cfg_.scheme == Scheme::kInteractionPicture) {
    interaction_picture_step(block, t1, t2 - t1);
    return;
  }
  const double dt = time_step();
  long steps = 0;
  if (!whole_steps(t2 - t1, dt, &steps))
    throw InvalidArgument("kick-split interval is not a whole number of steps");
  for (long k = 0; k < steps; ++k) kick_split_step(block, t1 + k * dt);
}

void Propagator::evolve(ComplexMatrix& block, double t1, double t2) const {
  if (t2 < t1) throw InvalidArgument("evolve requires t2 >= t1");
  if (block.rows() != sys_.dim()) throw InvalidArgument("block has the wrong dimension");
  const int cols = static_cast<int>(block.cols());
  const int workers = std::min(cfg_.threads, cols);
  if (workers <= 1) {
    evolve_serial(block, t1, t2);
    return;
  }
  std::vector<ComplexMatrix> parts(workers);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const int base = cols / workers;
  const int extra = cols % workers;
  int start = 0;
  std::vector<int> offsets;
  for (int w = 0; w < workers; ++w) {
    const int width = base + (w < extra ? 1 : 0);
    offsets.push_back(start);
    parts[w] = block.middleCols(start, width);
    start += width;
  }
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        evolve_serial(parts[w], t1, t2);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (int w = 0; w < workers; ++w) block.middleCols(offsets[w], parts[w].cols()) = parts[w];
}

WaveState Propagator::evolve(const WaveState& state, double t2) const {
  ComplexMatrix block = state.coeffs;
  evolve(block, state.time, t2);
  WaveState out;
  out.coeffs = block.col(0);
  out.time = t2;
  out.frame_a = sys_.variant == Variant::kTilting ? vector_potential(sys_.driving, t2) : 0.0;
  return out;
}

WaveState step_kick_split(const WaveState& state, const RatchetSystem& sys,
                          const PropagatorConfig& cfg, double t_k) {
  PropagatorConfig c = cfg;
  c.scheme = Scheme::kKickSplit;
  const Propagator prop(sys, c);
  WaveState s = state;
  s.time = t_k;
  return prop.evolve(s, t_k + prop.time_step());
}

WaveState step_interaction_picture(const WaveState& state, const RatchetSystem& sys,
                                   const PropagatorConfig& cfg, double t, double dt) {
  PropagatorConfig c = cfg;
  c.scheme = Scheme::kInteractionPicture;
  const Propagator prop(sys, c);
  WaveState s = state;
  s.time = t;
  return prop.evolve(s, t + dt);
}

double unitarity_defect(const ComplexMatrix& u) {
  const ComplexMatrix g = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

FloquetMatrix build_floquet_matrix(const RatchetSystem& sys, const PropagatorConfig& cfg,
                                   double t_start, int n_checkpoints) {
  const Propagator prop(sys, cfg);
  const double period = sys.driving.period();
  if (n_checkpoints < 0) throw InvalidArgument("n_checkpoints must be >= 0");
  if (n_checkpoints > 0 && cfg.scheme == Scheme::kKickSplit &&
      cfg.steps_per_period % n_checkpoints != 0)
    throw InvalidArgument("n_checkpoints must divide steps_per_period");

  FloquetMatrix fm;
  fm.t_start = t_start;
  fm.system = sys;
  fm.config = cfg;
  ComplexMatrix u = ComplexMatrix::Identity(sys.dim(), sys.dim());
  if (n_checkpoints == 0) {
    prop.evolve(u, t_start, t_start + period);
  } else {
    const double span = period / n_checkpoints;
    for (int j = 0; j < n_checkpoints; ++j) {
      fm.checkpoints.push_back(u);
      prop.evolve(u, t_start + j * span, t_start + (j + 1) * span);
    }
  }
  const double defect = unitarity_defect(u);
  if (defect >= kUnitarityLimit)
    throw UnitarityViolation("Floquet matrix is not unitary; refine N_t or N", defect);
  fm.u = std::move(u);
  return fm;
}

ComplexMatrix evolution_matrix(const RatchetSystem& sys, const PropagatorConfig& cfg, double t1,
                               double t2) {
  const Propagator prop(sys, cfg);
  ComplexMatrix u = ComplexMatrix::Identity(sys.dim(), sys.dim());
  prop.evolve(u, t1, t2);
  return u;
}

}  // namespace qratchet
