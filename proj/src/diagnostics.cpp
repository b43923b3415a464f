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

#include "svm/diagnostics.hpp"

#include "svm/operators.hpp"
#include "svm/transform.hpp"

#include <algorithm>
#include <cmath>

namespace svm {

double energy(const Field& u) { return 0.5 * squared_norm(u); }

std::vector<double> energy_balance_residual(const EnergyLedger& ledger) {
  if (ledger.empty()) throw DataError("energy_balance_residual: ledger has no rows");
  const LedgerRow& first = ledger.front();
  std::vector<double> out;
  out.reserve(ledger.rows.size());
  for (const auto& row : ledger.rows) {
    out.push_back((row.energy - first.energy) + (row.viscous_cumulative - first.viscous_cumulative) -
                  (row.martingale_cumulative - first.martingale_cumulative) -
                  0.5 * (row.ito_cumulative - first.ito_cumulative));
  }
  return out;
}

std::vector<double> observed_orders(std::span<const double> residuals) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
    orders.push_back(std::log2(std::abs(residuals[i]) / std::abs(residuals[i + 1])));
  }
  return orders;
}

AprioriReport apriori_check(const std::vector<std::vector<EnergyLedger>>& per_resolution, double p,
                            double tolerance) {
  if (per_resolution.size() < 2) throw ConfigError("apriori_check needs >= 2 resolutions");
  AprioriReport report;
  report.tolerance = tolerance;
  for (const auto& members : per_resolution) {
    if (members.empty()) throw ConfigError("apriori_check: resolution without members");
    double acc = 0;
    for (const auto& ledger : members) {
      double sup_energy = 0;
      for (const auto& row : ledger.rows) sup_energy = std::max(sup_energy, row.energy);
      acc += std::pow(std::sqrt(2.0 * sup_energy), p);
    }
    report.moments.push_back(acc / static_cast<double>(members.size()));
  }
  report.pass = true;
  for (std::size_t i = 0; i + 1 < report.moments.size(); ++i) {
    const double ratio = report.moments[i] > 0 ? report.moments[i + 1] / report.moments[i] : 1.0;
    report.ratios.push_back(ratio);
    if (ratio > 1.0 + tolerance) report.pass = false;
  }
  return report;
}

double apriori_envelope(double norm0, double p, double s2, double T) {
  if (!(p > 1)) throw ConfigError("apriori_envelope needs p > 1");
  return std::pow(p / (p - 1), p) * std::pow(norm0, p) * std::exp(0.5 * p * (p - 1) * s2 * T);
}

namespace {

// (I - P_n) phi. On a solenoidal phi, P_n reduces to T_n, which is exact.
Field high_part(const Field& phi, int n) {
  const int c = std::min(n, phi.cutoff());
  if (phi.tag() == FieldTag::divergence_free) return phi - truncate(phi, c);
  return phi - galerkin_project(phi, c);
}

// Common lattice (cutoff of phi) whose grid integrates trigonometric
// polynomials of degree <= max_degree exactly.
LatticePtr quadrature_lattice(const Field& phi, int max_degree) {
  const int grid = FourierLattice::smooth_size(std::max(max_degree + 1, 2 * phi.cutoff() + 2));
  return make_lattice(phi.dim(), phi.cutoff(), grid);
}

void check_phi_lattice(const Field& u, const Field& phi) {
  if (phi.dim() != u.dim() || !phi.is_vector() || !u.is_vector()) {
    throw ContractError("consistency residual: u and phi must be vector fields of equal dim");
  }
  if (phi.cutoff() < u.cutoff()) {
    throw ContractError("consistency residual: phi lattice (cutoff " + std::to_string(phi.cutoff()) +
                        ") smaller than u's (cutoff " + std::to_string(u.cutoff()) + ")");
  }
}

}  // namespace

double consistency_residual_R1(const Field& u, const Field& phi, int n) {
  check_phi_lattice(u, phi);
  const int d = u.dim();
  // Integrand degree: phi modes plus the 2 u.cutoff() spread of u (x) u.
  auto quad = quadrature_lattice(phi, phi.cutoff() + 2 * u.cutoff());
  const Field psi = high_part(phi, n).on_lattice(quad);
  const Field uq = zero_pad_embed(u, phi.cutoff()).on_lattice(quad);

  const GridField uphys = inverse_transform(uq);
  const auto grad = velocity_gradient(psi);
  Eigen::ArrayXd integrand = Eigen::ArrayXd::Zero(quad->grid_size());
  for (int i = 0; i < d; ++i) {
    const GridField gi = inverse_transform(grad[i]);  // d_j psi_i
    for (int j = 0; j < d; ++j) {
      integrand += gi.values().col(j).array() * uphys.values().col(i).array() *
                   uphys.values().col(j).array();
    }
  }
  const double r1 = -integrand.mean();
  return r1 == 0 ? 0.0 : r1;
}

double r1_bound_factor(const Field& u, const Field& phi, int n) {
  check_phi_lattice(u, phi);
  return squared_norm(u) * sobolev_norm(high_part(phi, n), 1.5);
}

double n_bound(const Field& u, const Field& phi, int m, double eps) {
  check_phi_lattice(u, phi);
  return eps * l2_norm(u) * sobolev_norm(high_part(phi, m), 2.0);
}

double consistency_residual_N(const Field& u, const Field& phi, int m, double eps) {
  check_phi_lattice(u, phi);
  if (eps == 0) return 0.0;
  auto quad = quadrature_lattice(phi, 2 * phi.cutoff());
  const Field a = high_part(differentiate(phi, DerivativeKind::laplacian), m).on_lattice(quad);
  const Field uq = zero_pad_embed(u, phi.cutoff()).on_lattice(quad);
  const GridField aphys = inverse_transform(a);
  const GridField uphys = inverse_transform(uq);
  const double value = eps * aphys.values().cwiseProduct(uphys.values()).rowwise().sum().mean();

  const double bound = n_bound(u, phi, m, eps);
  if (std::abs(value) > bound * (1 + 1e-10) + 1e-300) {
    throw InternalConsistencyError("N residual " + std::to_string(value) + " exceeds its bound " +
                                   std::to_string(bound));
  }
  return value;
}

std::vector<ConsistencyReport> consistency_study(const Field& u, const Field& phi,
                                                 std::span<const ConsistencyLevel> levels,
                                                 int calibrate_n, double slack) {
  auto at = [&](int n) {
    Field un = galerkin_project(restrict_to(u, n), n);
    un.mode(un.lattice().zero_index()).setZero();
    return std::make_pair(un, zero_pad_embed(phi, std::max(phi.cutoff(), n)));
  };
  const auto [uc, pc] = at(calibrate_n);
  const double calib_factor = r1_bound_factor(uc, pc, calibrate_n);
  const double c_hat =
      calib_factor > 0 ? std::abs(consistency_residual_R1(uc, pc, calibrate_n)) / calib_factor : 0.0;

  std::vector<ConsistencyReport> out;
  for (const auto& level : levels) {
    const auto [un, pn] = at(level.n);
    ConsistencyReport r;
    r.n = level.n;
    r.C_hat = c_hat;
    r.R1_value = consistency_residual_R1(un, pn, level.n);
    r.R1_factor = r1_bound_factor(un, pn, level.n);
    r.r1_within_bound = std::abs(r.R1_value) <= slack * c_hat * r.R1_factor;
    r.N_bound = n_bound(un, pn, level.m, level.eps);
    try {
      r.N_value = consistency_residual_N(un, pn, level.m, level.eps);
      r.n_within_bound = true;
    } catch (const InternalConsistencyError&) {
      r.N_value = std::nan("");
      r.n_within_bound = false;
    }
    out.push_back(r);
  }
  return out;
}

RelativeEnergy relative_energy(std::span<const Field> members, const Field& reference) {
  if (members.empty()) throw ContractError("relative_energy: empty ensemble");
  int cutoff = reference.cutoff();
  for (const auto& m : members) cutoff = std::max(cutoff, m.cutoff());
  const Field ref = zero_pad_embed(reference, cutoff);

  RelativeEnergy out;
  Field mean(ref.lattice_ptr());
  double mean_energy = 0;
  for (const auto& member : members) {
    const Field u = zero_pad_embed(member, cutoff);
    if (!u.lattice().same_modes(ref.lattice())) {
      throw ContractError("relative_energy: lattice mismatch after padding");
    }
    out.mean_part += energy(u - ref);
    mean_energy += energy(u);
    mean += u;
  }
  const double M = static_cast<double>(members.size());
  out.mean_part /= M;
  mean *= 1.0 / M;
  out.h_surrogate = std::max(0.0, mean_energy / M - energy(mean));
  if (members.size() == 1) out.h_surrogate = 0.0;
  out.total = out.mean_part + out.h_surrogate;
  return out;
}

RelativeEnergy relative_energy_pathwise(std::span<const Field> members,
                                        std::span<const Field> references) {
  if (members.empty() || members.size() != references.size()) {
    throw ContractError("relative_energy_pathwise: need one reference per member");
  }
  RelativeEnergy out;
  for (std::size_t j = 0; j < members.size(); ++j) {
    const int cutoff = std::max(members[j].cutoff(), references[j].cutoff());
    out.mean_part += energy(zero_pad_embed(members[j], cutoff) - zero_pad_embed(references[j], cutoff));
  }
  out.mean_part /= static_cast<double>(members.size());
  out.total = out.mean_part;
  return out;
}

GronwallReport gronwall_envelope(std::span<const double> times, std::span<const double> series,
                                 double rate, double slack, double floor) {
  if (times.size() != series.size() || series.empty()) {
    throw ContractError("gronwall_envelope: times and series must be non-empty and equal length");
  }
  GronwallReport report;
  report.pass = true;
  const double base = std::max(series[0], floor);
  for (std::size_t j = 0; j < series.size(); ++j) {
    const double growth = base * std::exp(rate * (times[j] - times[0]));
    report.envelope.push_back(growth * (1 + slack));
    const double ratio = growth > 0 ? series[j] / growth : (series[j] > 0 ? INFINITY : 0.0);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
    if (series[j] > growth * (1 + slack)) report.pass = false;
  }
  return report;
}

double gradient_sup_norm(const Field& u) {
  const auto grad = velocity_gradient(u);
  Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(u.lattice().grid_size());
  for (const auto& row : grad) {
    sq += inverse_transform(row).values().rowwise().squaredNorm().array();
  }
  return std::sqrt(sq.maxCoeff());
}

double gronwall_rate(double gradient_sup, double D1) { return 2.0 * gradient_sup + D1; }

}  // namespace svm
