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

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <span>

namespace svm {

class FourierLattice;
using LatticePtr = std::shared_ptr<const FourierLattice>;

/// Cube of integer wavevectors |k|_inf <= cutoff on the 2*pi periodic torus,
/// together with the physical grid used to transform fields on it.
///
/// Modes are stored in lexicographic order of k (first component slowest),
/// so the mode -k of linear index i sits at mode_count() - 1 - i.
class FourierLattice {
 public:
  FourierLattice(int dim, int cutoff, int grid = 0);

  /// Smallest 2,3,5,7-smooth size >= 3n+1: quadratic products of two
  /// cutoff-n fields are alias free after truncation on this grid.
  static int dealiased_grid(int cutoff);

  /// Smallest 2,3,5,7-smooth integer >= n.
  static int smooth_size(int n);

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  int side() const { return 2 * cutoff_ + 1; }
  int grid() const { return grid_; }
  Eigen::Index mode_count() const { return wavevectors_.rows(); }
  Eigen::Index grid_size() const { return grid_size_; }
  Eigen::Index zero_index() const { return (mode_count() - 1) / 2; }
  Eigen::Index mirror(Eigen::Index i) const { return mode_count() - 1 - i; }

  /// mode_count() x dim integer wavevectors.
  const Eigen::MatrixXi& wavevectors() const { return wavevectors_; }
  auto wavevector(Eigen::Index i) const { return wavevectors_.row(i); }
  const Eigen::ArrayXd& k_squared() const { return k_squared_; }
  const Eigen::ArrayXi& k_max() const { return k_max_; }

  /// Linear index of k, or -1 when |k|_inf > cutoff.
  Eigen::Index index_of(std::span<const int> k) const;

  /// Offset of each mode in the r2c half spectrum of the grid, and whether
  /// the stored value is the conjugate of the mode (k_last < 0).
  const Eigen::Array<std::int64_t, Eigen::Dynamic, 1>& half_spectrum_offset() const {
    return half_offset_;
  }
  const Eigen::Array<bool, Eigen::Dynamic, 1>& half_spectrum_conjugate() const {
    return half_conj_;
  }
  Eigen::Index half_spectrum_size() const;

  /// Same mode set, different physical grid.
  LatticePtr regrid(int grid) const;

  /// Algebraic compatibility: same dim and cutoff (grid may differ).
  bool same_modes(const FourierLattice& other) const {
    return dim_ == other.dim_ && cutoff_ == other.cutoff_;
  }
  bool operator==(const FourierLattice& other) const {
    return same_modes(other) && grid_ == other.grid_;
  }

 private:
  int dim_;
  int cutoff_;
  int grid_;
  Eigen::Index grid_size_;
  Eigen::MatrixXi wavevectors_;
  Eigen::ArrayXd k_squared_;
  Eigen::ArrayXi k_max_;
  Eigen::Array<std::int64_t, Eigen::Dynamic, 1> half_offset_;
  Eigen::Array<bool, Eigen::Dynamic, 1> half_conj_;
};

LatticePtr make_lattice(int dim, int cutoff, int grid = 0);

}  // namespace svm
