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

// Test-only reference computations. Everything here works by direct
// summation over modes and grid points and never calls the FFT path, the
// spectral operators or the scheme, so it can serve as an independent check.

#include "svm/spectral_field.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace svm::oracle {

inline std::vector<Eigen::VectorXd> grid_points(int dim, int n) {
  std::vector<Eigen::VectorXd> pts;
  const long total = dim == 2 ? long(n) * n : long(n) * n * n;
  for (long p = 0; p < total; ++p) {
    Eigen::VectorXd x(dim);
    long rem = p;
    for (int j = dim - 1; j >= 0; --j) {
      x(j) = 2 * M_PI * double(rem % n) / n;
      rem /= n;
    }
    pts.push_back(x);
  }
  return pts;
}

/// sum_k u_k e^{ik.x} at each point (complex; imaginary part returned too).
inline Eigen::MatrixXcd synthesize(const Field& u, const std::vector<Eigen::VectorXd>& pts) {
  const auto& k = u.lattice().wavevectors();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(Eigen::Index(pts.size()), u.components());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const double ph = k.row(i).cast<double>().dot(pts[p]);
      out.row(Eigen::Index(p)) += std::complex<double>(std::cos(ph), std::sin(ph)) * u.mode(i);
    }
  }
  return out;
}

/// Spatial derivative d/dx_j of each component, by direct summation.
inline Eigen::MatrixXd synthesize_derivative(const Field& u, int j,
                                             const std::vector<Eigen::VectorXd>& pts) {
  const auto& k = u.lattice().wavevectors();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Eigen::Index(pts.size()), u.components());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(u.components());
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const double ph = k.row(i).cast<double>().dot(pts[p]);
      acc += std::complex<double>(0, k(i, j)) * std::complex<double>(std::cos(ph), std::sin(ph)) *
             u.mode(i);
    }
    out.row(Eigen::Index(p)) = acc.real();
  }
  return out;
}

/// Direct DFT of grid samples onto the modes of `lattice`.
inline Field analyze(const Eigen::MatrixXd& values, const std::vector<Eigen::VectorXd>& pts,
                     const LatticePtr& lattice) {
  Field out(lattice, int(values.cols()));
  const auto& k = lattice->wavevectors();
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(values.cols());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double ph = k.row(i).cast<double>().dot(pts[p]);
      acc += std::complex<double>(std::cos(ph), -std::sin(ph)) * values.row(Eigen::Index(p));
    }
    out.mode(i) = acc / double(pts.size());
  }
  return out;
}

/// Leray formula written out independently: u_k - (u_k.k) k / |k|^2 with
/// |k|_inf <= n, k = 0 kept.
inline Field leray_truncate(const Field& u, int n) {
  Field out = u;
  const auto& k = u.lattice().wavevectors();
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    const Eigen::VectorXd kv = k.row(i).cast<double>().transpose();
    if (k.row(i).cwiseAbs().maxCoeff() > n) {
      out.mode(i).setZero();
      continue;
    }
    const double k2 = kv.squaredNorm();
    if (k2 == 0) continue;
    const Eigen::VectorXcd uk = u.mode(i).transpose();
    const std::complex<double> dot = kv.cast<std::complex<double>>().dot(uk);  // conj(k) . u
    out.mode(i) = (uk - dot / k2 * kv.cast<std::complex<double>>()).transpose();
  }
  return out;
}

/// Grid mean of u . v (normalized L2 inner product by quadrature).
inline double quadrature_inner(const Field& u, const Field& v, int grid) {
  const auto pts = grid_points(u.dim(), grid);
  const Eigen::MatrixXd a = synthesize(u, pts).real();
  const Eigen::MatrixXd b = synthesize(v, pts).real();
  return a.cwiseProduct(b).sum() / double(pts.size());
}

/// Reality-symmetric random field (not projected), zero mean.
inline Field random_field(const LatticePtr& lat, std::uint64_t seed, double decay = 0.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Field u(lat);
  for (Eigen::Index i = 0; i < lat->zero_index(); ++i) {
    const double env = std::pow(1.0 + lat->k_squared()(i), -0.5 * decay);
    for (int c = 0; c < lat->dim(); ++c) {
      const std::complex<double> z(normal(gen), normal(gen));
      u.coeffs()(i, c) = env * z;
      u.coeffs()(lat->mirror(i), c) = std::conj(env * z);
    }
  }
  return u;
}

/// Random divergence-free field via the independent Leray formula.
inline Field random_divfree(const LatticePtr& lat, std::uint64_t seed, double decay = 0.0) {
  Field u = leray_truncate(random_field(lat, seed, decay), lat->cutoff());
  u.set_tag(FieldTag::divergence_free);
  return u;
}

}  // namespace svm::oracle
