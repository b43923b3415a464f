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

#include "svm/errors.hpp"
#include "svm/lattice.hpp"

#include <Eigen/Core>

#include <complex>
#include <string>
#include <utility>

namespace svm {

enum class FieldTag { generic, divergence_free };

/// Truncated Fourier representation sum_k u_k e^{ik.x} of a field on the
/// torus. Coefficients are a (modes x components) complex matrix; vector
/// fields have components == dim, scalar fields have one component.
template <typename Scalar>
class SpectralField {
 public:
  using RealScalar = Scalar;
  using Complex = std::complex<Scalar>;
  using Coeffs = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  SpectralField() = default;

  explicit SpectralField(LatticePtr lattice, int components = -1)
      : lattice_(std::move(lattice)) {
    const int c = components < 0 ? lattice_->dim() : components;
    coeffs_ = Coeffs::Zero(lattice_->mode_count(), c);
  }

  SpectralField(LatticePtr lattice, Coeffs coeffs, FieldTag tag = FieldTag::generic)
      : lattice_(std::move(lattice)), coeffs_(std::move(coeffs)), tag_(tag) {
    if (coeffs_.rows() != lattice_->mode_count()) {
      throw ContractError("coefficient rows " + std::to_string(coeffs_.rows()) +
                          " do not match lattice mode count " +
                          std::to_string(lattice_->mode_count()));
    }
  }

  static SpectralField Zero(LatticePtr lattice, int components = -1) {
    return SpectralField(std::move(lattice), components);
  }

  const FourierLattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }
  int dim() const { return lattice_->dim(); }
  int cutoff() const { return lattice_->cutoff(); }
  int components() const { return static_cast<int>(coeffs_.cols()); }
  bool is_vector() const { return components() == dim(); }

  Coeffs& coeffs() { return coeffs_; }
  const Coeffs& coeffs() const { return coeffs_; }
  auto mode(Eigen::Index i) { return coeffs_.row(i); }
  auto mode(Eigen::Index i) const { return coeffs_.row(i); }

  FieldTag tag() const { return tag_; }
  void set_tag(FieldTag tag) { tag_ = tag; }

  /// Same field on a lattice with the same modes but another grid.
  SpectralField on_lattice(LatticePtr lattice) const {
    if (!lattice->same_modes(*lattice_)) {
      throw ContractError("on_lattice: mode sets differ");
    }
    return SpectralField(std::move(lattice), coeffs_, tag_);
  }

  SpectralField& operator+=(const SpectralField& other) {
    check_compatible(other);
    coeffs_ += other.coeffs_;
    tag_ = combine(tag_, other.tag_);
    return *this;
  }
  SpectralField& operator-=(const SpectralField& other) {
    check_compatible(other);
    coeffs_ -= other.coeffs_;
    tag_ = combine(tag_, other.tag_);
    return *this;
  }
  SpectralField& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Scalar s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, Scalar s) { return a *= s; }
  friend SpectralField operator-(SpectralField a) { return a *= Scalar(-1); }

  void check_compatible(const SpectralField& other) const {
    if (!lattice_->same_modes(*other.lattice_) || components() != other.components()) {
      throw ContractError("spectral fields live on different lattices");
    }
  }

  template <typename Other>
  SpectralField<Other> cast() const {
    return SpectralField<Other>(lattice_, coeffs_.template cast<std::complex<Other>>(), tag_);
  }

 private:
  static FieldTag combine(FieldTag a, FieldTag b) {
    return (a == FieldTag::divergence_free && b == FieldTag::divergence_free)
               ? FieldTag::divergence_free
               : FieldTag::generic;
  }

  LatticePtr lattice_;
  Coeffs coeffs_;
  FieldTag tag_ = FieldTag::generic;
};

/// Grid samples of a field: grid_size x components, points in row-major
/// order (first axis slowest), x_j = 2*pi*i_j / grid.
template <typename Scalar>
class PhysicalField {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PhysicalField() = default;

  explicit PhysicalField(LatticePtr lattice, int components = -1)
      : lattice_(std::move(lattice)) {
    const int c = components < 0 ? lattice_->dim() : components;
    values_ = Values::Zero(lattice_->grid_size(), c);
  }

  PhysicalField(LatticePtr lattice, Values values)
      : lattice_(std::move(lattice)), values_(std::move(values)) {
    if (values_.rows() != lattice_->grid_size()) {
      throw ConfigError("physical field has " + std::to_string(values_.rows()) +
                        " points, lattice grid expects " +
                        std::to_string(lattice_->grid_size()));
    }
  }

  const FourierLattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }
  int components() const { return static_cast<int>(values_.cols()); }
  Values& values() { return values_; }
  const Values& values() const { return values_; }

  /// Coordinates of grid point p.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> point(Eigen::Index p) const {
    const int d = lattice_->dim();
    const int n = lattice_->grid();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(d);
    for (int j = d - 1; j >= 0; --j) {
      x(j) = Scalar(2 * EIGEN_PI) * Scalar(p % n) / Scalar(n);
      p /= n;
    }
    return x;
  }

 private:
  LatticePtr lattice_;
  Values values_;
};

using Field = SpectralField<double>;
using GridField = PhysicalField<double>;

}  // namespace svm
