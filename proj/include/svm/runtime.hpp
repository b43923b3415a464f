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

#include "svm/checkpoint.hpp"
#include "svm/config.hpp"
#include "svm/scheme.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace svm {

/// Output tree of a single run:
///   config.json        effective configuration (output block omitted)
///   ledger.csv         energy ledger every energy_stride steps
///   probes.csv         probe, t, x..., u...
///   snapshots/         step_<index>.svmf every snapshot_stride steps
///   final.svmf         state at T
///   checkpoint.svmc    latest checkpoint
struct RunOutcome {
  bool completed = false;         ///< reached T
  bool already_complete = false;  ///< resume found a finished run; nothing was recomputed
  bool resumed = false;
  SolverState state;
  EnergyLedger ledger;
  std::vector<ProbeRecord> probes;
  std::vector<std::string> notices;
};

inline constexpr const char* kCheckpointFile = "checkpoint.svmc";

/// Initial velocity of the configured preset on its natural lattice.
Field initial_field(const RunConfig& cfg);

/// Runs cfg to T (or to step `stop_after` when non-negative) writing the
/// output tree under `out`. With `resume`, continues from out/checkpoint.svmc;
/// a checkpoint whose config hash differs is refused with ConfigError.
RunOutcome execute_run(const RunConfig& cfg, const std::filesystem::path& out, bool resume = false,
                       std::int64_t stop_after = -1);

/// Writes `text` to `path` through a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Hex digits of a config hash, as printed in manifests and results.
std::string hash_hex(std::uint64_t h);

}  // namespace svm
