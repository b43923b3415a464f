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
#include "svm/spectral_field.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace svm {

/// Velocity sampled at probe `probe` (index into the configured probes).
struct ProbeRecord {
  int probe = 0;
  double t = 0;
  Eigen::VectorXd value;

  bool operator==(const ProbeRecord&) const = default;
};

/// Binary checkpoint layout (little endian):
///   "SVMC" magic, u32 version, u64 config hash, i64 step index, f64 time,
///   u64 ledger rows then 5 f64 per row,
///   u64 probe records then per record u32 probe, f64 t, u32 n, n f64,
///   embedded SVMF snapshot of the state.
/// The Wiener path cursor is the step index: increments are a function of
/// (seed, mode, step) only.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::int64_t step = 0;
  double time = 0;
  EnergyLedger ledger;
  std::vector<ProbeRecord> probes;
  Field field;
};

/// Writes to `path` + ".tmp" and renames, so a reader never sees a partial file.
void write_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace svm
