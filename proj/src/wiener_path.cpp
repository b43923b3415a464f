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

#include "svm/wiener_path.hpp"

#include "svm/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace svm {

Eigen::Index step_count(double horizon, double dt) {
  if (!(dt > 0)) throw ConfigError("time step must be positive");
  if (horizon <= 0) return 0;
  return static_cast<Eigen::Index>(std::ceil(horizon / dt - 1e-9));
}

WienerPath::WienerPath(std::uint64_t seed, int modes, double dt_base, double horizon)
    : seed_(seed), dt_base_(dt_base) {
  if (!(dt_base > 0)) throw ConfigError("Wiener path dt_base must be positive");
  if (horizon < 0) throw ConfigError("Wiener path horizon must be non-negative");
  if (modes < 0) throw ConfigError("Wiener path needs a non-negative mode count");
  const Eigen::Index steps = step_count(horizon, dt_base);
  increments_.resize(steps, modes);
  const double sd = std::sqrt(dt_base);
  for (int k = 0; k < modes; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(k)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal(0.0, sd);
    for (Eigen::Index j = 0; j < steps; ++j) increments_(j, k) = normal(gen);
  }
}

Eigen::VectorXd WienerPath::step_increments(Eigen::Index j, int stride) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(modes());
  const Eigen::Index first = j * stride;
  if (j < 0 || first + stride > steps()) {
    throw IndexError("Wiener step " + std::to_string(j) + " (stride " + std::to_string(stride) +
                     ") outside path of " + std::to_string(steps()) + " base steps");
  }
  for (Eigen::Index s = first; s < first + stride; ++s) out += increments_.row(s).transpose();
  return out;
}

WienerPath WienerPath::coarsen(int factor) const {
  if (factor < 1) throw ConfigError("coarsening factor must be >= 1");
  WienerPath out;
  out.seed_ = seed_;
  out.dt_base_ = dt_base_ * factor;
  const Eigen::Index coarse = steps() / factor;
  out.increments_.resize(coarse, modes());
  for (Eigen::Index j = 0; j < coarse; ++j) {
    out.increments_.row(j) = step_increments(j, factor).transpose();
  }
  return out;
}

int WienerPath::stride_for(double dt) const {
  const double ratio = dt / dt_base_;
  const long r = std::lround(ratio);
  if (r < 1 || std::abs(ratio - double(r)) > 1e-9 * ratio) {
    throw ConfigError("time step " + std::to_string(dt) +
                      " is not an integer multiple of the path base step " +
                      std::to_string(dt_base_));
  }
  return static_cast<int>(r);
}

}  // namespace svm
