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

#include <vector>

namespace svm {

/// One row of the Ito energy balance
///   E(t) + eps int ||Q_n grad u||^2 = E(0) + M(t) + 1/2 int sum_k ||P_n sigma_k(u)||^2,
/// with E = 1/2 ||u||^2 and M the Ito (left point) martingale.
struct LedgerRow {
  double t = 0;
  double energy = 0;
  double viscous_cumulative = 0;
  double ito_cumulative = 0;
  double martingale_cumulative = 0;

  bool operator==(const LedgerRow&) const = default;
};

struct EnergyLedger {
  std::vector<LedgerRow> rows;

  bool empty() const { return rows.empty(); }
  const LedgerRow& front() const { return rows.front(); }
  const LedgerRow& back() const { return rows.back(); }
  bool operator==(const EnergyLedger&) const = default;
};

}  // namespace svm
