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

#include "svm/spectral_field.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace svm {

/// Binary snapshot layout (all little endian):
///   "SVMF"  magic
///   u32     version (kSnapshotVersion)
///   u32     dim
///   u32     cutoff
///   f64     time
///   then for every k in lexicographic order, for every component,
///   f64 real, f64 imag.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  Field field;
  double time = 0;
};

void write_snapshot(std::ostream& out, const Field& field, double time);
Snapshot read_snapshot(std::istream& in);

void write_snapshot(const std::string& path, const Field& field, double time);
Snapshot read_snapshot(const std::string& path);

}  // namespace svm
