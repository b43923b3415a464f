// Copyright 2026 The svm-euler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svm/scheme.hpp"

#include "svm/convection.hpp"
#include "svm/diagnostics.hpp"
#include "svm/operators.hpp"
#include "svm/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace svm {

std::string to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::euler_maruyama: return "euler_maruyama";
    case Integrator::semi_implicit_em: return "semi_implicit_em";
    case Integrator::deterministic_midpoint: return "deterministic_midpoint";
  }
  return "unknown";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "euler_maruyama") return Integrator::euler_maruyama;
  if (name == "semi_implicit_em") return Integrator::semi_implicit_em;
  if (name == "deterministic_midpoint") return Integrator::deterministic_midpoint;
  throw ConfigError("unknown integrator '" + name + "'");
}

int SchemeConfig::default_threshold(int n) {
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
}

double SchemeConfig::viscosity_law(int n, double c, double theta) {
  return c * std::pow(static_cast<double>(n), -theta);
}

void SchemeConfig::validate(const NoiseModel& noise) const {
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  if (n < 1) throw ConfigError("cutoff n must be positive");
  if (m < 0 || m >= n) {
    throw ConfigError("viscosity threshold m=" + std::to_string(m) + " must satisfy 0 <= m < n=" +
                      std::to_string(n));
  }
  if (!(eps >= 0)) throw ConfigError("eps must be >= 0");
  if (!(dt > 0)) throw ConfigError("dt must be > 0");
  if (!(T >= 0)) throw ConfigError("T must be >= 0");
  if (integrator == Integrator::deterministic_midpoint && !noise.is_zero()) {
    throw ConfigError("deterministic_midpoint integrator requires the zero noise family");
  }
}

SvmScheme::SvmScheme(SchemeConfig config, NoiseModel noise)
    : config_(config), noise_(std::move(noise)) {
  config_.validate(noise_);
  lattice_ = make_lattice(config_.dim, config_.n, config_.grid);
  const Eigen::ArrayXd band = upper_band_mask(*lattice_, config_.m, config_.n);
  implicit_factor_ = 1.0 / (1.0 + config_.eps * config_.dt * lattice_->k_squared() * band);
}

Eigen::Index SvmScheme::total_steps() const { return step_count(config_.T, config_.dt); }

SolverState SvmScheme::initial_state(const Field& u0) const {
  if (u0.dim() != config_.dim || !u0.is_vector()) {
    throw ConfigError("initial field dimension does not match the scheme");
  }
  const double mean = u0.mode(u0.lattice().zero_index()).norm();
  if (mean > 1e-12 * std::max(coefficient_scale(u0), 1e-300)) {
    throw DataError("initial field has nonzero mean (|u_0| = " + std::to_string(mean) + ")");
  }
  Field u = restrict_to(u0, config_.n, config_.grid);
  u = galerkin_project(std::move(u), config_.n);
  u.mode(lattice_->zero_index()).setZero();
  return SolverState{0.0, u.on_lattice(lattice_), 0};
}

Field SvmScheme::drift(const Field& u) const {
  Field d = spectral_viscosity_term(u, config_.eps, config_.m, config_.n);
  d -= convective_term(u);
  return d;
}

SolverState SvmScheme::step(const SolverState& state, const WienerPath& path,
                            StepIncrements* increments) const {
  const double dt = config_.dt;
  const Field& u = state.u;
  StepIncrements inc;

  Field noise_inc(lattice_);
  noise_inc.set_tag(FieldTag::divergence_free);
  if (!noise_.is_zero() && config_.integrator != Integrator::deterministic_midpoint) {
    const int stride = path.stride_for(dt);
    if (path.modes() < noise_.modes()) throw ConfigError("Wiener path has too few modes");
    const Eigen::VectorXd dw =
        path.step_increments(state.step_index, stride).head(noise_.modes());
    const auto projected = projected_sigma(noise_, u, config_.n);
    noise_inc = combine_noise(projected, dw, lattice_);
    for (const auto& f : projected) inc.ito += squared_norm(f) * dt;
    inc.martingale = inner(u, noise_inc);
  }

  Field next;
  switch (config_.integrator) {
    case Integrator::euler_maruyama: {
      next = u + dt * drift(u) + noise_inc;
      inc.viscous = dt * viscous_dissipation_rate(u, config_.eps, config_.m, config_.n);
      break;
    }
    case Integrator::semi_implicit_em: {
      Field rhs = u - dt * convective_term(u) + noise_inc;
      next = Field(lattice_, implicit_factor_.matrix().asDiagonal() * rhs.coeffs(),
                   FieldTag::divergence_free);
      inc.viscous = dt * viscous_dissipation_rate(next, config_.eps, config_.m, config_.n);
      break;
    }
    case Integrator::deterministic_midpoint: {
      const double scale = std::max(l2_norm(u), 1e-300);
      next = u + dt * drift(u);
      double prev_change = std::numeric_limits<double>::infinity();
      bool converged = false;
      for (int it = 0; it < 100; ++it) {
        if (!next.coeffs().allFinite()) {
          throw StepError("midpoint fixed point diverged at step " + std::to_string(state.step_index));
        }
        Field mid = 0.5 * (u + next);
        Field candidate = u + dt * drift(mid);
        const double change = l2_norm(candidate - next);
        next = std::move(candidate);
        // Stop at 1e-14, or once the iteration stalls at rounding level
        // below the 1e-12 acceptance threshold.
        if (change <= 1e-14 * scale || (change <= 1e-12 * scale && change >= prev_change)) {
          converged = true;
          break;
        }
        prev_change = change;
      }
      if (!converged && prev_change <= 1e-12 * scale) converged = true;
      if (!converged) {
        std::ostringstream msg;
        msg << "midpoint fixed point did not converge in 100 iterations at step "
            << state.step_index << " (last change " << prev_change << ")";
        throw StepError(msg.str());
      }
      const Field mid = 0.5 * (u + next);
      inc.viscous = dt * viscous_dissipation_rate(mid, config_.eps, config_.m, config_.n);
      break;
    }
  }
  next.mode(lattice_->zero_index()).setZero();
  next.set_tag(FieldTag::divergence_free);
  if (increments) *increments = inc;
  const Eigen::Index index = state.step_index + 1;
  return SolverState{static_cast<double>(index) * dt, std::move(next), index};
}

std::optional<std::string> SvmScheme::cfl_advisory(const Field& u) const {
  const double umax = inverse_transform(u).values().rowwise().norm().maxCoeff();
  const double n = config_.n;
  const double bound = 0.5 / (config_.eps * n * n + n * umax);
  if (config_.dt <= bound) return std::nullopt;
  std::ostringstream msg;
  msg << "dt=" << config_.dt << " exceeds advisory bound " << bound
      << " = 0.5/(eps n^2 + n max|u|)";
  return msg.str();
}

RunResult run(const SvmScheme& scheme, const WienerPath& path, SolverState start,
              std::span<RunObserver* const> observers, EnergyLedger ledger, Eigen::Index stop_at) {
  if (ledger.empty()) {
    ledger.rows.push_back(LedgerRow{start.time, energy(start.u), 0, 0, 0});
  }
  for (auto* obs : observers) obs->on_start(start);

  const Eigen::Index total =
      stop_at >= 0 ? std::min(stop_at, scheme.total_steps()) : scheme.total_steps();
  SolverState state = std::move(start);
  while (state.step_index < total) {
    StepIncrements inc;
    SolverState next = scheme.step(state, path, &inc);
    if (!next.u.coeffs().allFinite()) {
      throw NumericalAbort("non-finite coefficient at step " + std::to_string(next.step_index) +
                               " (t=" + std::to_string(next.time) + ")",
                           state);
    }
    LedgerRow row = ledger.back();
    row.t = next.time;
    row.energy = energy(next.u);
    row.viscous_cumulative += inc.viscous;
    row.ito_cumulative += inc.ito;
    row.martingale_cumulative += inc.martingale;
    ledger.rows.push_back(row);
    state = std::move(next);
    for (auto* obs : observers) obs->on_step(state, inc);
  }
  for (auto* obs : observers) obs->on_finish(state);
  return RunResult{std::move(state), std::move(ledger)};
}

WienerPath path_for(const SvmScheme& scheme, std::uint64_t seed) {
  return WienerPath(seed, scheme.noise().modes(), scheme.config().dt, scheme.config().T);
}

}  // namespace svm
