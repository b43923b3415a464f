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
#include "svm/wiener_path.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace svm {

enum class NoiseFamily { zero, linear, saturated_linear, additive_modes };

std::string to_string(NoiseFamily family);
NoiseFamily noise_family_from_string(const std::string& name);

/// Forcing field of the additive family: g(x) = sqrt(2) a cos(q . x) with a
/// unit direction a, so ||g||_{L2} = 1.
struct AdditiveMode {
  Eigen::VectorXi wavevector;
  Eigen::VectorXd direction;

  bool operator==(const AdditiveMode&) const = default;
};

/// Multiplicative noise sigma(u) dW = sum_k sigma_k(u) dW_k with K retained
/// modes. The sigma_k act pointwise on velocity values:
///   linear            sigma_k(u) = alpha_k u
///   saturated_linear  sigma_k(u) = alpha_k u / sqrt(1 + |u|^2)
///   additive_modes    sigma_k(u) = alpha_k g_k(x)
/// D0, D1 are the declared growth and Lipschitz constants,
///   sum_k |sigma_k(u)|^2 <= D0 (1 + |u|^2),
///   sum_k |sigma_k(u) - sigma_k(v)|^2 <= D1 |u - v|^2.
class NoiseModel {
 public:
  NoiseModel() = default;

  static NoiseModel zero(int modes = 0);
  static NoiseModel linear(Eigen::VectorXd alphas);
  static NoiseModel saturated_linear(Eigen::VectorXd alphas);
  /// Empty `modes` selects shear forcings q_k = k e_2, a = e_1.
  static NoiseModel additive(Eigen::VectorXd alphas, int dim, std::vector<AdditiveMode> modes = {});

  /// alpha_k = amplitude * k^{-decay}, k = 1..K.
  static Eigen::VectorXd alpha_law(int modes, double amplitude, double decay);

  NoiseFamily family() const { return family_; }
  int modes() const { return static_cast<int>(alphas_.size()); }
  const Eigen::VectorXd& alphas() const { return alphas_; }
  const std::vector<AdditiveMode>& additive_modes() const { return additive_; }
  double D0() const { return d0_; }
  double D1() const { return d1_; }
  void set_declared_constants(double d0, double d1) {
    d0_ = d0;
    d1_ = d1;
  }
  bool is_zero() const { return family_ == NoiseFamily::zero || alphas_.isZero(0.0); }

  /// sigma_k(u) at the point x; `x` is only read by the additive family.
  Eigen::VectorXd apply(int k, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Pointwise sigma_k on grid samples. Throws IndexError for k >= K.
  GridField evaluate_sigma(const GridField& u, int k) const;

  bool operator==(const NoiseModel&) const = default;

 private:
  NoiseFamily family_ = NoiseFamily::zero;
  Eigen::VectorXd alphas_;
  std::vector<AdditiveMode> additive_;
  double d0_ = 0;
  double d1_ = 0;
};

/// P_n sigma_k(u) for every retained mode k, evaluated on u's lattice grid.
/// The k = 0 coefficient is pinned to zero (zero-mean solution space).
std::vector<Field> projected_sigma(const NoiseModel& model, const Field& u, int n);

/// sum_k P_n sigma_k(u) dW_k for the given increments.
Field combine_noise(const std::vector<Field>& projected, const Eigen::Ref<const Eigen::VectorXd>& dw,
                    const LatticePtr& lattice);

/// sum_k P_n sigma_k(u) dW_k(step) with increments from the path (coarse
/// step `step` of size stride * dt_base).
Field projected_noise_increment(const NoiseModel& model, const Field& u, const WienerPath& path,
                                Eigen::Index step, int n, int stride = 1);

/// sum_k ||P_n sigma_k(u)||^2.
double ito_energy_rate(const NoiseModel& model, const Field& u, int n);

struct NoiseContractReport {
  double D0_hat = 0;
  double D1_hat = 0;
  bool pass = false;
};

/// Empirical maxima of sum|sigma_k(u)|^2 / (1+|u|^2) and
/// sum|sigma_k(u)-sigma_k(v)|^2 / |u-v|^2 over random point clouds whose radii
/// span 1e-3 .. 1e8. pass iff both are <= the declared constants.
NoiseContractReport verify_noise_contract(const NoiseModel& model, int sample_count, int dim,
                                          std::uint64_t seed = 1);

}  // namespace svm
