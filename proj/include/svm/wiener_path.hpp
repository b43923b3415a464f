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

#include <Eigen/Core>

#include <cstdint>

namespace svm {

/// Table of Brownian increments dW_k(j) ~ N(0, dt_base) for K independent
/// modes on a uniform base grid of step dt_base.
///
/// Each mode k draws from its own generator seeded by (seed, k), so the
/// table for a mode does not depend on K, and a longer horizon extends a
/// shorter one. Runs with dt = r * dt_base consume sums of r consecutive base
/// increments, which is what couples time-step and resolution ladders.
class WienerPath {
 public:
  WienerPath() = default;
  WienerPath(std::uint64_t seed, int modes, double dt_base, double horizon);

  std::uint64_t seed() const { return seed_; }
  int modes() const { return static_cast<int>(increments_.cols()); }
  double dt_base() const { return dt_base_; }
  Eigen::Index steps() const { return increments_.rows(); }

  /// steps x modes table.
  const Eigen::MatrixXd& increments() const { return increments_; }
  double increment(int k, Eigen::Index j) const { return increments_(j, k); }

  /// Increments of coarse step j for dt = stride * dt_base (exact sums of
  /// the base increments, summed in order).
  Eigen::VectorXd step_increments(Eigen::Index j, int stride) const;

  /// Path with dt_base * factor whose increments are the exact sums.
  WienerPath coarsen(int factor) const;

  /// Integer stride r with r * dt_base == dt (to 1e-9 relative).
  int stride_for(double dt) const;

 private:
  std::uint64_t seed_ = 0;
  double dt_base_ = 0;
  Eigen::MatrixXd increments_;
};

/// Number of steps of size dt covering [0, horizon] (ceil with a 1e-9
/// relative guard against rounding in horizon / dt).
Eigen::Index step_count(double horizon, double dt);

}  // namespace svm
