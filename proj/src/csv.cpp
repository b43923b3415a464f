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

#include "svm/csv.hpp"

#include "svm/diagnostics.hpp"
#include "svm/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace svm {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw DataError("malformed number '" + std::string(text) + "'");
  }
  return v;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (pending_ > 0) out_ << ',';
  out_ << v;
  ++pending_;
  return *this;
}

void CsvWriter::end_row() {
  if (pending_ != columns_) {
    throw ContractError("csv row has " + std::to_string(pending_) + " cells, header has " +
                        std::to_string(columns_));
  }
  out_ << '\n';
  pending_ = 0;
}

void write_ledger_csv(std::ostream& out, const EnergyLedger& ledger, int stride) {
  if (stride < 1) throw ContractError("ledger stride must be >= 1");
  CsvWriter csv(out, {"t", "E", "viscous_cum", "ito_cum", "martingale_cum", "residual"});
  if (ledger.empty()) return;
  const auto residual = energy_balance_residual(ledger);
  const std::size_t last = ledger.rows.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    if (i % std::size_t(stride) != 0 && i != last) continue;
    const auto& r = ledger.rows[i];
    csv.cell(r.t).cell(r.energy).cell(r.viscous_cumulative).cell(r.ito_cumulative);
    csv.cell(r.martingale_cumulative).cell(residual[i]);
    csv.end_row();
  }
}

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger, int stride) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_ledger_csv(out, ledger, stride);
  if (!out) throw IoError("write to '" + path + "' failed");
}

EnergyLedger read_ledger_csv(std::istream& in) {
  EnergyLedger ledger;
  std::string line;
  if (!std::getline(in, line)) throw DataError("ledger csv is empty");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(parse_double(tok));
    if (v.size() < 5) throw DataError("ledger csv row has fewer than 5 columns");
    ledger.rows.push_back(LedgerRow{v[0], v[1], v[2], v[3], v[4]});
  }
  return ledger;
}

}  // namespace svm
