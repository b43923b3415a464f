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

#include "svm/diagnostics.hpp"
#include "svm/energy_ledger.hpp"
#include "svm/noise.hpp"
#include "svm/scheme.hpp"
#include "svm/spectral_field.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svm {

/// Point (t, x) at which member velocities are sampled.
struct Probe {
  double t = 0;
  Eigen::VectorXd x;

  bool operator==(const Probe&) const = default;
};

struct EnsembleConfig {
  int members = 1;
  std::uint64_t master_seed = 0;
  std::vector<int> ladder;
  bool coupled = true;
  std::vector<Probe> probes;
  int histogram_bins = 20;
  int threads = 1;

  /// Seeds of the members, drawn from a generator seeded by master_seed.
  std::vector<std::uint64_t> member_seeds() const;

  /// Throws ConfigError on M < 1, non-increasing ladder, bins < 1, or probes
  /// outside [0, T] x [0, 2 pi)^dim.
  void validate(const SchemeConfig& scheme) const;

  bool operator==(const EnsembleConfig&) const = default;
};

/// Cutoff-dependent parameters of a ladder level. Unset eps follows
/// eps = eps_c n^{-eps_theta}; unset m follows m = ceil(sqrt(n)).
struct ResolutionLaw {
  std::optional<double> eps;
  double eps_c = 1.0;
  double eps_theta = 1.0;
  std::optional<int> m;

  SchemeConfig at(const SchemeConfig& base, int n) const;

  bool operator==(const ResolutionLaw&) const = default;
};

/// Empirical surrogate of the Young measure at one probe: a histogram per
/// velocity component. Each bin keeps the count, mean and centered second
/// moment of its samples, so histogram moments equal sample moments.
struct YoungMeasureHistogram {
  int probe = 0;
  std::vector<Eigen::VectorXd> edges;  ///< per component, bins + 1 monotone edges
  std::vector<Eigen::VectorXi> counts;
  std::vector<Eigen::VectorXd> bin_means;
  std::vector<Eigen::VectorXd> bin_m2;

  int components() const { return static_cast<int>(counts.size()); }
  int samples() const { return counts.empty() ? 0 : counts[0].sum(); }
  int occupied_bins(int component) const { return (counts.at(component).array() > 0).count(); }
  double mean(int component) const;
  double variance(int component) const;  ///< unbiased
};

/// samples: one row per member, one column per component. The bin count is
/// min(bins, number of distinct values); identical samples give a single
/// degenerate bin [c, c]. Needs >= 2 samples.
YoungMeasureHistogram empirical_young_measure(const Eigen::MatrixXd& samples, int bins, int probe = 0);

/// W1 distance of two 1-D empirical measures: mean absolute difference of
/// the sorted samples for equal sizes, the integral of the quantile-function
/// difference otherwise. Throws DataError on empty input.
double wasserstein1_1d(std::span<const double> a, std::span<const double> b);

/// Normalized L1 distance (2 pi)^{-d} int |a - b| dx by a grid quadrature on
/// `grid` points per axis. 0 selects max(4n+2, 512) in 2-D, which resolves
/// the kinks of |a - b| to ~1e-7 relative, and max(4n+2, 64) in 3-D.
double l1_distance(const Field& a, const Field& b, int grid = 0);

/// Arithmetic mean of ladder fields zero-padded to the largest cutoff,
/// summed in a fixed pairwise order. Refuses uncoupled trajectories.
Field cesaro_mean(std::span<const Field> fields, bool coupled = true);

/// Mean of fields (padded to the largest cutoff) by pairwise summation.
Field pairwise_mean(std::span<const Field> fields);

struct MemberResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  EnergyLedger ledger;
  Field final_u;
  Eigen::MatrixXd probe_values;  ///< probes x dim
};

struct ProbeStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  YoungMeasureHistogram histogram;
};

struct EnsembleResult {
  std::vector<MemberResult> members;
  std::vector<ProbeStats> probes;
  std::vector<std::string> warnings;
  Field mean_final;
  int failures = 0;
};

/// M independent runs of the scheme from u0 with the member seeds, on
/// cfg.threads worker threads. Results are a pure function of the inputs.
/// Failed members (non-finite state) are excluded with a warning; more
/// than 10% failures raise ExperimentError.
EnsembleResult run_ensemble(const EnsembleConfig& cfg, const SchemeConfig& scheme,
                            const NoiseModel& noise, const Field& u0);

struct CesaroReport {
  std::vector<int> ladder;
  std::vector<double> times;
  /// gaps[t][N-1] = L1(C_{N+1}, C_N) at times[t], averaged over members.
  std::vector<std::vector<double>> gaps;
  std::vector<std::vector<std::vector<double>>> member_gaps;  ///< [member][t][N-1]
  int failures = 0;
  bool monotone = false;  ///< gaps strictly decreasing at the final time
};

/// Coupled ladder runs: every level of member j consumes the same Wiener
/// path; Cesaro means are formed at each sample time.
CesaroReport cesaro_experiment(const EnsembleConfig& cfg, const SchemeConfig& base,
                               const ResolutionLaw& law, const NoiseModel& noise, const Field& u0,
                               std::vector<double> times = {});

struct WeakStrongConfig {
  int reference_n = 128;
  int ref_dt_factor = 4;     ///< dt_ref = dt / ref_dt_factor
  int sample_stride = 10;    ///< coarse steps between samples
  double gronwall_slack = 0.2;
  int allowed_non_monotone = 1;

  bool operator==(const WeakStrongConfig&) const = default;
};

struct WeakStrongLevel {
  int n = 0;
  std::vector<double> l1;               ///< member mean of L1 distance
  std::vector<double> l2;               ///< member mean of L2 distance
  std::vector<double> relative_energy;  ///< pathwise mean 1/2 ||u - U||^2
  std::vector<double> h_surrogate;      ///< ensemble variance of the level
  double l1_integrated = 0;             ///< trapezoid rule in time
  GronwallReport gronwall;
};

struct WeakStrongReport {
  std::vector<double> times;
  std::vector<WeakStrongLevel> levels;
  double gradient_sup = 0;  ///< sup over samples and members of ||grad U||_inf
  double rate = 0;          ///< 2 gradient_sup + D1
  int failures = 0;
  bool monotone = false;
  bool gronwall_pass = false;
  bool pass = false;
};

/// Compares every ladder level against a reference run at reference_n with
/// dt / ref_dt_factor on the same Wiener path. A level with n == reference_n
/// runs the reference configuration itself.
WeakStrongReport weak_strong_experiment(const EnsembleConfig& cfg, const WeakStrongConfig& ws,
                                        const SchemeConfig& base, const ResolutionLaw& law,
                                        const NoiseModel& noise, const Field& u0);

}  // namespace svm
