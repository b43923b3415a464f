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

#include "svm/ensemble.hpp"
#include "svm/initial_conditions.hpp"
#include "svm/noise.hpp"
#include "svm/scheme.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svm {

/// Every violation found while parsing, not only the first.
class ConfigViolations : public ConfigError {
 public:
  explicit ConfigViolations(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct NoiseConfig {
  std::string family = "zero";
  int K = 8;
  std::optional<std::vector<double>> alphas;  ///< explicit amplitudes, else the law
  double amplitude = 0.1;
  double decay = 2.0;
  std::optional<double> D0;
  std::optional<double> D1;
  std::optional<std::uint64_t> seed;  ///< overrides the run seed for the path
  std::vector<AdditiveMode> modes;

  NoiseModel build(int dim) const;
  bool operator==(const NoiseConfig&) const = default;
};

struct ObserverConfig {
  int energy_stride = 1;
  int snapshot_stride = 0;    ///< 0 disables snapshots
  int checkpoint_stride = 0;  ///< 0 writes a checkpoint only at the end
  std::vector<Probe> probes;

  bool operator==(const ObserverConfig&) const = default;
};

struct EnsembleBlock {
  int members = 1;
  std::vector<int> ladder;
  bool coupled = true;
  int histogram_bins = 20;
  std::vector<double> times;  ///< Cesaro sample times (empty: T)
  int reference_n = 0;        ///< 0 selects 4 * max(ladder)
  int ref_dt_factor = 4;
  int sample_stride = 10;
  double gronwall_slack = 0.2;

  bool operator==(const EnsembleBlock&) const = default;
};

struct ConsistencyBlock {
  int phi_modes = 64;
  std::uint64_t phi_seed = 1;
  double phi_slope = 3.0;
  std::vector<int> ladder{8, 16, 32};
  int calibrate_n = 8;

  bool operator==(const ConsistencyBlock&) const = default;
};

struct VerifyBlock {
  double tolerance = 1e-10;
  std::vector<double> dts;  ///< non-empty: measure the residual order over these steps
  double min_order = 0.9;

  bool operator==(const VerifyBlock&) const = default;
};

struct OutputBlock {
  std::string dir = "out";
  int threads = 1;

  bool operator==(const OutputBlock&) const = default;
};

/// Complete description of a run or experiment.
struct RunConfig {
  int dim = 2;
  int n = 16;
  int grid = 0;
  std::optional<double> eps;  ///< unset: eps_c n^{-eps_theta}
  double eps_c = 1.0;
  double eps_theta = 1.0;
  std::optional<int> m;  ///< unset: ceil(sqrt(n))
  double dt = 1e-2;
  double T = 1.0;
  Integrator integrator = Integrator::euler_maruyama;
  NoiseConfig noise;
  InitialSpec initial;
  ObserverConfig observers;
  EnsembleBlock ensemble;
  ConsistencyBlock consistency;
  VerifyBlock verify;
  OutputBlock output;
  std::uint64_t seed = 0;

  ResolutionLaw law() const;
  SchemeConfig scheme_config() const;
  NoiseModel noise_model() const { return noise.build(dim); }
  std::uint64_t path_seed() const { return noise.seed.value_or(seed); }
  EnsembleConfig ensemble_config() const;
  WeakStrongConfig weak_strong_config() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses a JSON document, applies `key=value` overrides (dotted keys,
/// values parsed as JSON when possible, else taken as strings), and
/// validates. Unknown keys and missing required keys (lattice.dim,
/// lattice.n, scheme.dt, scheme.T, initial.preset) are errors.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical pretty JSON. With include_output = false the output block
/// (directory, threads) is left out.
std::string serialize_config(const RunConfig& cfg, bool include_output = true);

/// FNV-1a hash of the canonical serialization without the output block.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace svm
