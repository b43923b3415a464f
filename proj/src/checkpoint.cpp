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

#include "svm/checkpoint.hpp"

#include "svm/binary_io.hpp"
#include "svm/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace svm {

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write("SVMC", 4);
    binio::write_u32(out, kCheckpointVersion);
    binio::write_u64(out, cp.config_hash);
    binio::write_u64(out, std::bit_cast<std::uint64_t>(cp.step));
    binio::write_f64(out, cp.time);
    binio::write_u64(out, cp.ledger.rows.size());
    for (const auto& r : cp.ledger.rows) {
      for (double v : {r.t, r.energy, r.viscous_cumulative, r.ito_cumulative, r.martingale_cumulative}) {
        binio::write_f64(out, v);
      }
    }
    binio::write_u64(out, cp.probes.size());
    for (const auto& p : cp.probes) {
      binio::write_u32(out, static_cast<std::uint32_t>(p.probe));
      binio::write_f64(out, p.t);
      binio::write_u32(out, static_cast<std::uint32_t>(p.value.size()));
      for (double v : p.value) binio::write_f64(out, v);
    }
    write_snapshot(out, cp.field, cp.time);
    out.flush();
    if (!out) throw IoError("checkpoint write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("checkpoint truncated: missing magic");
  if (std::string(magic, 4) != "SVMC") throw IoError("not a checkpoint file (bad magic)");
  const std::uint32_t version = binio::read_u32(in);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) + " (reader supports " +
                  std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint cp;
  cp.config_hash = binio::read_u64(in);
  cp.step = std::bit_cast<std::int64_t>(binio::read_u64(in));
  cp.time = binio::read_f64(in);
  const std::uint64_t rows = binio::read_u64(in);
  if (rows > (std::uint64_t(1) << 40)) throw IoError("checkpoint ledger size is implausible");
  cp.ledger.rows.resize(rows);
  for (auto& r : cp.ledger.rows) {
    r.t = binio::read_f64(in);
    r.energy = binio::read_f64(in);
    r.viscous_cumulative = binio::read_f64(in);
    r.ito_cumulative = binio::read_f64(in);
    r.martingale_cumulative = binio::read_f64(in);
  }
  const std::uint64_t probes = binio::read_u64(in);
  if (probes > (std::uint64_t(1) << 32)) throw IoError("checkpoint probe count is implausible");
  cp.probes.resize(probes);
  for (auto& p : cp.probes) {
    p.probe = static_cast<int>(binio::read_u32(in));
    p.t = binio::read_f64(in);
    const std::uint32_t n = binio::read_u32(in);
    if (n > 3) throw IoError("checkpoint probe record has invalid width");
    p.value.resize(n);
    for (auto& v : p.value) v = binio::read_f64(in);
  }
  Snapshot snap = read_snapshot(in);
  cp.field = std::move(snap.field);
  return cp;
}

}  // namespace svm
