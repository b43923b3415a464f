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

#include <iosfwd>
#include <string_view>
#include <string>
#include <vector>

namespace svm {

/// Shortest decimal that parses back to exactly `v`, independent of locale.
/// Non-finite values print as nan, inf, -inf.
std::string format_double(double v);

/// Parses text produced by format_double. Throws DataError on malformed input.
double parse_double(std::string_view text);

/// Minimal comma separated writer. Fields are written verbatim; callers
/// only emit numbers and identifiers.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t pending_ = 0;
};

/// Ledger columns: t, E, viscous_cum, ito_cum, martingale_cum, residual.
/// Every stride-th row is written, plus the final row.
void write_ledger_csv(std::ostream& out, const EnergyLedger& ledger, int stride = 1);
void write_ledger_csv(const std::string& path, const EnergyLedger& ledger, int stride = 1);

/// Reads the first five columns back into ledger rows.
EnergyLedger read_ledger_csv(std::istream& in);

}  // namespace svm
