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

#include <span>
#include <string>
#include <vector>

namespace svm {

/// 1/2 ||u||^2 (normalized measure, Parseval).
double energy(const Field& u);

/// Per-row defect of the Ito energy balance relative to the first row:
///   E(t) + viscous(t) - E(0) - martingale(t) - 1/2 ito(t).
/// Zero for exact semi-discrete dynamics; for a time integrator it measures
/// the discretization defect. Throws DataError on an empty ledger.
std::vector<double> energy_balance_residual(const EnergyLedger& ledger);

/// Observed convergence orders log2(r_i / r_{i+1}) of residuals measured at
/// successively halved time steps.
std::vector<double> observed_orders(std::span<const double> residuals);

struct AprioriReport {
  std::vector<double> moments;  ///< E[sup_t ||u_n||^p] per resolution
  std::vector<double> ratios;   ///< moments[i+1] / moments[i]
  double tolerance = 0.1;
  bool pass = false;
};

/// `per_resolution[r][j]` is the ledger of member j at resolution r.
/// pass iff every successive ratio is <= 1 + tolerance.
AprioriReport apriori_check(const std::vector<std::vector<EnergyLedger>>& per_resolution, double p,
                            double tolerance = 0.1);

/// Envelope for E[sup_t ||u||^p] under linear noise with sum alpha^2 = s2:
/// Doob's maximal inequality applied to the geometric-Brownian moment,
///   (p/(p-1))^p ||u0||^p exp(p (p-1) s2 T / 2).
/// Requires p > 1.
double apriori_envelope(double norm0, double p, double s2, double T);

/// R1(n, phi) = -int grad (I - P_n) phi : (u (x) u) dx, evaluated by a grid
/// quadrature that is exact for the trigonometric integrand. phi must live
/// on a lattice at least as large as u's.
double consistency_residual_R1(const Field& u, const Field& phi, int n);

/// ||u||^2 ||(I - P_n) phi||_{H^{3/2}}.
double r1_bound_factor(const Field& u, const Field& phi, int n);

/// N(n, phi) = eps int (I - P_m) lap phi . u dx by exact grid quadrature.
/// Throws InternalConsistencyError if |N| > eps ||u|| ||(I - P_m) phi||_{H^2}.
double consistency_residual_N(const Field& u, const Field& phi, int m, double eps);

/// eps ||u|| ||(I - P_m) phi||_{H^2}.
double n_bound(const Field& u, const Field& phi, int m, double eps);

struct ConsistencyReport {
  std::string phi_id;
  int n = 0;
  double R1_value = 0;
  double R1_factor = 0;  ///< ||u||^2 ||(I-P_n)phi||_{H^{3/2}}
  double C_hat = 0;      ///< constant used for the R1 bound
  double N_value = 0;
  double N_bound = 0;
  bool r1_within_bound = false;
  bool n_within_bound = false;
};

/// Cutoff-dependent parameters of one consistency level.
struct ConsistencyLevel {
  int n = 0;
  int m = 0;
  double eps = 0;
};

/// R1 and N for u_n = P_n T_n u at every level. C_hat = |R1| / factor at
/// calibrate_n (0 when the factor vanishes); a level passes the R1 check
/// when |R1| <= slack C_hat factor, and the N check when |N| is within its
/// bound.
std::vector<ConsistencyReport> consistency_study(const Field& u, const Field& phi,
                                                 std::span<const ConsistencyLevel> levels,
                                                 int calibrate_n, double slack = 1.05);

/// Relative energy of an empirical (atomic) measure against U:
///   mean_part = mean_j 1/2 ||u_j - U||^2,
///   h_surrogate = max(0, mean_j 1/2 ||u_j||^2 - 1/2 ||mean_j u_j||^2),
///   total = mean_part + h_surrogate.
struct RelativeEnergy {
  double mean_part = 0;
  double h_surrogate = 0;
  double total = 0;
};

RelativeEnergy relative_energy(std::span<const Field> members, const Field& reference);

/// Pathwise form: member j is compared with its own reference (same Brownian
/// path). Each path carries a Dirac measure, so the defect surrogate is zero.
RelativeEnergy relative_energy_pathwise(std::span<const Field> members,
                                        std::span<const Field> references);

struct GronwallReport {
  bool pass = false;
  std::vector<double> envelope;
  double worst_ratio = 0;  ///< max_t series(t) / (series(0) exp(c t))
};

/// pass iff series(t) <= max(series(0), floor) * exp(c t) * (1 + slack).
GronwallReport gronwall_envelope(std::span<const double> times, std::span<const double> series,
                                 double rate, double slack = 0.2, double floor = 0.0);

/// max_x |grad U(x)| (Frobenius) on U's grid.
double gradient_sup_norm(const Field& u);

/// Growth rate of the relative energy: 2 ||grad U||_inf + D1.
double gronwall_rate(double gradient_sup, double D1);

}  // namespace svm
