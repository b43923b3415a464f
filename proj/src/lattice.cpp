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

#include "svm/lattice.hpp"

#include "svm/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace svm {

namespace {

bool is_smooth(int v) {
  for (int p : {2, 3, 5, 7}) {
    while (v % p == 0) v /= p;
  }
  return v == 1;
}

}  // namespace

int FourierLattice::smooth_size(int n) {
  n = std::max(n, 1);
  while (!is_smooth(n)) ++n;
  return n;
}

int FourierLattice::dealiased_grid(int cutoff) { return smooth_size(std::max(3 * cutoff + 1, 4)); }

FourierLattice::FourierLattice(int dim, int cutoff, int grid)
    : dim_(dim), cutoff_(cutoff), grid_(grid == 0 ? dealiased_grid(cutoff) : grid) {
  if (dim_ != 2 && dim_ != 3) {
    throw ConfigError("lattice dim must be 2 or 3, got " + std::to_string(dim_));
  }
  if (cutoff_ < 1) {
    throw ConfigError("lattice cutoff must be positive, got " + std::to_string(cutoff_));
  }
  if (grid_ < 2 * cutoff_ + 2) {
    throw ConfigError("grid " + std::to_string(grid_) + " too small for cutoff " +
                      std::to_string(cutoff_) + " (need >= 2n+2)");
  }

  const int s = side();
  Eigen::Index count = 1;
  grid_size_ = 1;
  for (int d = 0; d < dim_; ++d) {
    count *= s;
    grid_size_ *= grid_;
  }
  wavevectors_.resize(count, dim_);
  k_squared_.resize(count);
  k_max_.resize(count);
  half_offset_.resize(count);
  half_conj_.resize(count);

  const Eigen::Index half_last = grid_ / 2 + 1;
  for (Eigen::Index i = 0; i < count; ++i) {
    Eigen::Index rem = i;
    for (int d = dim_ - 1; d >= 0; --d) {
      wavevectors_(i, d) = static_cast<int>(rem % s) - cutoff_;
      rem /= s;
    }
    auto k = wavevectors_.row(i);
    k_squared_(i) = static_cast<double>(k.squaredNorm());
    k_max_(i) = k.cwiseAbs().maxCoeff();

    const bool conj = k(dim_ - 1) < 0;
    std::int64_t offset = 0;
    for (int d = 0; d < dim_; ++d) {
      int kd = conj ? -k(d) : k(d);
      int f = ((kd % grid_) + grid_) % grid_;
      offset = (d == dim_ - 1) ? offset * half_last + f : offset * grid_ + f;
    }
    half_offset_(i) = offset;
    half_conj_(i) = conj;
  }
}

Eigen::Index FourierLattice::half_spectrum_size() const {
  return grid_size_ / grid_ * (grid_ / 2 + 1);
}

Eigen::Index FourierLattice::index_of(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) return -1;
  Eigen::Index idx = 0;
  for (int d = 0; d < dim_; ++d) {
    if (std::abs(k[d]) > cutoff_) return -1;
    idx = idx * side() + (k[d] + cutoff_);
  }
  return idx;
}

LatticePtr FourierLattice::regrid(int grid) const {
  return std::make_shared<const FourierLattice>(dim_, cutoff_, grid);
}

LatticePtr make_lattice(int dim, int cutoff, int grid) {
  return std::make_shared<const FourierLattice>(dim, cutoff, grid);
}

}  // namespace svm
