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

#pragma once

#include "svm/energy_ledger.hpp"
#include "svm/noise.hpp"
#include "svm/spectral_field.hpp"
#include "svm/wiener_path.hpp"

#include <optional>
#include <span>
#include <string>

namespace svm {

enum class Integrator { euler_maruyama, semi_implicit_em, deterministic_midpoint };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

/// Parameters of the spectral vanishing viscosity scheme
///   du + P_n(u.grad u) dt = eps div(Q_n grad u) dt + P_n sigma(u) dW.
struct SchemeConfig {
  int dim = 2;
  int n = 16;
  int grid = 0;  ///< 0 selects the dealiased grid
  int m = 4;
  double eps = 1.0 / 16;
  double dt = 1e-2;
  double T = 1.0;
  Integrator integrator = Integrator::euler_maruyama;

  /// m = ceil(sqrt(n)).
  static int default_threshold(int n);
  /// eps = c * n^{-theta}.
  static double viscosity_law(int n, double c = 1.0, double theta = 1.0);

  /// Throws ConfigError on m >= n, dt <= 0, eps < 0, or midpoint with noise.
  void validate(const NoiseModel& noise) const;

  bool operator==(const SchemeConfig&) const = default;
};

struct SolverState {
  double time = 0;
  Field u;
  Eigen::Index step_index = 0;
};

/// Energy-balance contributions of one step.
struct StepIncrements {
  double viscous = 0;
  double ito = 0;
  double martingale = 0;
};

/// Raised when a step produces a non-finite coefficient.
class NumericalAbort : public Error {
 public:
  NumericalAbort(const std::string& what, SolverState last_valid)
      : Error(what), last_valid_(std::move(last_valid)) {}
  const SolverState& last_valid() const { return last_valid_; }

 private:
  SolverState last_valid_;
};

class SvmScheme {
 public:
  SvmScheme(SchemeConfig config, NoiseModel noise);

  const SchemeConfig& config() const { return config_; }
  const NoiseModel& noise() const { return noise_; }
  const LatticePtr& lattice() const { return lattice_; }
  Eigen::Index total_steps() const;

  /// u_n(0) = P_n T_n u0 on the scheme lattice. Rejects nonzero mean.
  SolverState initial_state(const Field& u0) const;

  /// -P_n(u.grad u) + eps div(Q_n grad u).
  Field drift(const Field& u) const;

  /// Advances one step of size dt using Wiener increments of step
  /// state.step_index (ignored by the deterministic integrator).
  SolverState step(const SolverState& state, const WienerPath& path,
                   StepIncrements* increments = nullptr) const;

  /// Advisory CFL-type bound dt <= 0.5 / (eps n^2 + n max|u|); returns a
  /// message when violated.
  std::optional<std::string> cfl_advisory(const Field& u) const;

 private:
  SchemeConfig config_;
  NoiseModel noise_;
  LatticePtr lattice_;
  Eigen::ArrayXd implicit_factor_;
};

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_start(const SolverState&) {}
  virtual void on_step(const SolverState&, const StepIncrements&) {}
  virtual void on_finish(const SolverState&) {}
};

struct RunResult {
  SolverState final_state;
  EnergyLedger ledger;
};

/// Steps from `start` to the horizon, recording an energy-ledger row per
/// step. `ledger` carries rows of an interrupted run (resume); when empty the
/// initial row is recorded. A non-negative `stop_at` ends the run once that
/// step index is reached. Throws NumericalAbort on NaN/Inf.
RunResult run(const SvmScheme& scheme, const WienerPath& path, SolverState start,
              std::span<RunObserver* const> observers = {}, EnergyLedger ledger = {},
              Eigen::Index stop_at = -1);

/// Path covering the scheme horizon at the scheme's dt.
WienerPath path_for(const SvmScheme& scheme, std::uint64_t seed);

}  // namespace svm
