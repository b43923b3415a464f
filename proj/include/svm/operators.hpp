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

// Spectral operators on truncated Fourier fields. All L2 quantities use the
// normalized torus measure dx / (2 pi)^d, so Parseval reads
// ||u||^2 = sum_k |u_k|^2.

#include "svm/spectral_field.hpp"
#include "svm/transform.hpp"

#include <cmath>
#include <vector>

namespace svm {

enum class DerivativeKind { gradient, divergence, laplacian };

/// L2 inner product <u, v>.
template <typename Scalar>
Scalar inner(const SpectralField<Scalar>& u, const SpectralField<Scalar>& v) {
  u.check_compatible(v);
  return (u.coeffs().conjugate().cwiseProduct(v.coeffs())).sum().real();
}

template <typename Scalar>
Scalar squared_norm(const SpectralField<Scalar>& u) {
  return u.coeffs().squaredNorm();
}

template <typename Scalar>
Scalar l2_norm(const SpectralField<Scalar>& u) {
  return std::sqrt(squared_norm(u));
}

/// Largest coefficient modulus, used as the field scale in tolerances.
template <typename Scalar>
Scalar coefficient_scale(const SpectralField<Scalar>& u) {
  return u.coeffs().size() ? u.coeffs().cwiseAbs().maxCoeff() : Scalar(0);
}

/// max_k |k . u_k|.
template <typename Scalar>
Scalar divergence_defect(const SpectralField<Scalar>& u) {
  const auto& k = u.lattice().wavevectors();
  Scalar worst = 0;
  for (Eigen::Index i = 0; i < u.lattice().mode_count(); ++i) {
    std::complex<Scalar> dot = 0;
    for (int d = 0; d < u.dim(); ++d) dot += Scalar(k(i, d)) * u.coeffs()(i, d);
    worst = std::max(worst, std::abs(dot));
  }
  return worst;
}

/// True when |k . u_k| <= tol * max_k |u_k| for every k.
template <typename Scalar>
bool is_divergence_free(const SpectralField<Scalar>& u, Scalar tol = Scalar(1e-12)) {
  return divergence_defect(u) <= tol * coefficient_scale(u);
}

/// T_m: zero every mode with |k|_inf > cutoff.
template <typename Scalar>
SpectralField<Scalar> truncate(SpectralField<Scalar> u, int cutoff) {
  if (cutoff > u.cutoff()) {
    throw ContractError("truncate: cutoff " + std::to_string(cutoff) + " exceeds lattice cutoff " +
                        std::to_string(u.cutoff()));
  }
  const auto& kmax = u.lattice().k_max();
  for (Eigen::Index i = 0; i < u.lattice().mode_count(); ++i) {
    if (kmax(i) > cutoff) u.mode(i).setZero();
  }
  return u;
}

/// Helmholtz/Leray projection P_H: u_k - (u_k . k) k / |k|^2.
/// The k = 0 mode passes through unchanged.
template <typename Scalar>
SpectralField<Scalar> leray_project(SpectralField<Scalar> u) {
  const auto& lat = u.lattice();
  const auto& k = lat.wavevectors();
  const auto& k2 = lat.k_squared();
  const int d = u.dim();
  for (Eigen::Index i = 0; i < lat.mode_count(); ++i) {
    if (k2(i) == 0) continue;
    std::complex<Scalar> dot = 0;
    for (int j = 0; j < d; ++j) dot += Scalar(k(i, j)) * u.coeffs()(i, j);
    const std::complex<Scalar> f = dot / Scalar(k2(i));
    for (int j = 0; j < d; ++j) u.coeffs()(i, j) -= f * Scalar(k(i, j));
  }
  u.set_tag(FieldTag::divergence_free);
  return u;
}

/// P_n = T_n o P_H.
template <typename Scalar>
SpectralField<Scalar> galerkin_project(SpectralField<Scalar> u, int n) {
  const int cutoff = std::min(n, u.cutoff());
  return truncate(leray_project(std::move(u)), cutoff);
}

/// Spectral derivatives. gradient acts on a scalar field (one component)
/// and returns a vector field; divergence maps a vector field to a scalar;
/// laplacian keeps the shape.
template <typename Scalar>
SpectralField<Scalar> differentiate(const SpectralField<Scalar>& u, DerivativeKind kind) {
  const auto& lat = u.lattice();
  const auto& k = lat.wavevectors();
  const std::complex<Scalar> I(0, 1);
  switch (kind) {
    case DerivativeKind::gradient: {
      if (u.components() != 1) throw ContractError("gradient expects a scalar field");
      SpectralField<Scalar> out(u.lattice_ptr(), lat.dim());
      for (int j = 0; j < lat.dim(); ++j) {
        out.coeffs().col(j) = (I * k.col(j).template cast<Scalar>().array()).matrix().cwiseProduct(
            u.coeffs().col(0));
      }
      return out;
    }
    case DerivativeKind::divergence: {
      if (!u.is_vector()) throw ContractError("divergence expects a vector field");
      SpectralField<Scalar> out(u.lattice_ptr(), 1);
      for (int j = 0; j < lat.dim(); ++j) {
        out.coeffs().col(0) += (I * k.col(j).template cast<Scalar>().array()).matrix().cwiseProduct(
            u.coeffs().col(j));
      }
      return out;
    }
    case DerivativeKind::laplacian: {
      SpectralField<Scalar> out = u;
      out.coeffs() = (-lat.k_squared().template cast<Scalar>()).matrix().asDiagonal() * u.coeffs();
      return out;
    }
  }
  throw ContractError("unknown derivative kind");
}

/// Rows of the velocity gradient: result[i] = grad u_i.
template <typename Scalar>
std::vector<SpectralField<Scalar>> velocity_gradient(const SpectralField<Scalar>& u) {
  std::vector<SpectralField<Scalar>> rows;
  rows.reserve(u.components());
  for (int i = 0; i < u.components(); ++i) {
    SpectralField<Scalar> ui(u.lattice_ptr(), u.coeffs().col(i));
    rows.push_back(differentiate(ui, DerivativeKind::gradient));
  }
  return rows;
}

/// Mask of the upper band m < |k|_inf <= n.
inline Eigen::ArrayXd upper_band_mask(const FourierLattice& lat, int m, int n) {
  return ((lat.k_max() > m) && (lat.k_max() <= n)).cast<double>();
}

/// eps div(Q_n grad u): -eps |k|^2 u_k on m < |k|_inf <= n, zero below.
template <typename Scalar>
SpectralField<Scalar> spectral_viscosity_term(const SpectralField<Scalar>& u, Scalar eps, int m, int n) {
  if (m >= n) {
    throw ConfigError("spectral viscosity threshold m=" + std::to_string(m) +
                      " must be below cutoff n=" + std::to_string(n));
  }
  const auto& lat = u.lattice();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> mult =
      (-eps) * (lat.k_squared() * upper_band_mask(lat, m, n)).template cast<Scalar>();
  SpectralField<Scalar> out(u.lattice_ptr(), mult.matrix().asDiagonal() * u.coeffs(), u.tag());
  return out;
}

/// eps ||Q_n grad u||^2 = eps sum_{m<|k|<=n} |k|^2 |u_k|^2.
template <typename Scalar>
Scalar viscous_dissipation_rate(const SpectralField<Scalar>& u, Scalar eps, int m, int n) {
  const auto& lat = u.lattice();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> w =
      (lat.k_squared() * upper_band_mask(lat, m, n)).template cast<Scalar>();
  return eps * (w * u.coeffs().rowwise().squaredNorm().array()).sum();
}

/// Copy of u on a lattice with cutoff n_target >= cutoff, new modes zero.
template <typename Scalar>
SpectralField<Scalar> zero_pad_embed(const SpectralField<Scalar>& u, int n_target, int grid = 0) {
  if (n_target < u.cutoff()) {
    throw ContractError("zero_pad_embed: target cutoff " + std::to_string(n_target) +
                        " below field cutoff " + std::to_string(u.cutoff()));
  }
  if (n_target == u.cutoff() && grid == 0) return u;
  auto target = make_lattice(u.dim(), n_target, grid);
  SpectralField<Scalar> out(target, u.components());
  const auto& k = u.lattice().wavevectors();
  std::vector<int> kv(u.dim());
  for (Eigen::Index i = 0; i < u.lattice().mode_count(); ++i) {
    for (int d = 0; d < u.dim(); ++d) kv[d] = k(i, d);
    out.mode(target->index_of(kv)) = u.mode(i);
  }
  out.set_tag(u.tag());
  return out;
}

/// T_n followed by dropping the zeroed modes: a field on a cutoff-n lattice.
template <typename Scalar>
SpectralField<Scalar> restrict_to(const SpectralField<Scalar>& u, int n, int grid = 0) {
  if (n > u.cutoff()) return zero_pad_embed(u, n, grid);
  auto target = make_lattice(u.dim(), n, grid);
  SpectralField<Scalar> out(target, u.components());
  const auto& k = target->wavevectors();
  std::vector<int> kv(u.dim());
  for (Eigen::Index i = 0; i < target->mode_count(); ++i) {
    for (int d = 0; d < u.dim(); ++d) kv[d] = k(i, d);
    out.mode(i) = u.mode(u.lattice().index_of(kv));
  }
  out.set_tag(u.tag());
  return out;
}

/// (sum_k (1 + |k|^2)^s |u_k|^2)^{1/2}.
template <typename Scalar>
Scalar sobolev_norm(const SpectralField<Scalar>& u, Scalar s) {
  const auto w = (1.0 + u.lattice().k_squared()).pow(static_cast<double>(s)).template cast<Scalar>();
  return std::sqrt((w * u.coeffs().rowwise().squaredNorm().array()).sum());
}

/// Exact evaluation of the Fourier series at a point x.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> evaluate_at(const SpectralField<Scalar>& u,
                                                     const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto& k = u.lattice().wavevectors();
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> acc =
      Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>::Zero(u.components());
  for (Eigen::Index i = 0; i < u.lattice().mode_count(); ++i) {
    const double phase = k.row(i).template cast<double>().dot(x);
    const std::complex<Scalar> e(Scalar(std::cos(phase)), Scalar(std::sin(phase)));
    acc += e * u.mode(i).transpose();
  }
  return acc.real();
}

}  // namespace svm
