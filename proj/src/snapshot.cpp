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

#include "svm/snapshot.hpp"

#include "svm/binary_io.hpp"

#include <fstream>

namespace svm {

void write_snapshot(std::ostream& out, const Field& field, double time) {
  if (!field.is_vector()) throw ContractError("snapshots hold vector fields only");
  out.write("SVMF", 4);
  binio::write_u32(out, kSnapshotVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(field.dim()));
  binio::write_u32(out, static_cast<std::uint32_t>(field.cutoff()));
  binio::write_f64(out, time);
  const auto& c = field.coeffs();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index comp = 0; comp < c.cols(); ++comp) {
      binio::write_f64(out, c(i, comp).real());
      binio::write_f64(out, c(i, comp).imag());
    }
  }
  if (!out) throw IoError("snapshot write failed");
}

Snapshot read_snapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("snapshot truncated: missing magic");
  if (std::string(magic, 4) != "SVMF") throw IoError("not a snapshot file (bad magic)");
  const std::uint32_t version = binio::read_u32(in);
  if (version != kSnapshotVersion) {
    throw IoError("unsupported snapshot version " + std::to_string(version) + " (reader supports " +
                  std::to_string(kSnapshotVersion) + ")");
  }
  const std::uint32_t dim = binio::read_u32(in);
  const std::uint32_t cutoff = binio::read_u32(in);
  if ((dim != 2 && dim != 3) || cutoff < 1 || cutoff > 4096) {
    throw IoError("snapshot header has invalid dim/cutoff");
  }
  Snapshot snap;
  snap.time = binio::read_f64(in);
  snap.field = Field(make_lattice(static_cast<int>(dim), static_cast<int>(cutoff)));
  auto& c = snap.field.coeffs();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index comp = 0; comp < c.cols(); ++comp) {
      const double re = binio::read_f64(in);
      const double im = binio::read_f64(in);
      c(i, comp) = {re, im};
    }
  }
  return snap;
}

void write_snapshot(const std::string& path, const Field& field, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_snapshot(out, field, time);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  return read_snapshot(in);
}

}  // namespace svm
