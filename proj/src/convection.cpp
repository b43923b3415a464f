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

#include "svm/convection.hpp"

#include "svm/operators.hpp"
#include "svm/transform.hpp"

namespace svm {

namespace {

Field convolve_exact(const Field& u) {
  const auto& lat = u.lattice();
  const auto& k = lat.wavevectors();
  const int d = lat.dim();
  const int n = lat.cutoff();
  const Eigen::Index modes = lat.mode_count();
  const std::complex<double> I(0, 1);

  Field out(u.lattice_ptr());
  std::vector<int> kv(d);
  for (Eigen::Index p = 0; p < modes; ++p) {
    const auto up = u.mode(p);
    if (up.squaredNorm() == 0) continue;
    for (Eigen::Index q = 0; q < modes; ++q) {
      bool inside = true;
      for (int j = 0; j < d; ++j) {
        kv[j] = k(p, j) + k(q, j);
        if (kv[j] < -n || kv[j] > n) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      std::complex<double> qdotu = 0;
      for (int j = 0; j < d; ++j) qdotu += double(k(q, j)) * up(j);
      out.mode(lat.index_of(kv)) += (I * qdotu) * u.mode(q);
    }
  }
  return out;
}

Field convolve_pseudospectral(const Field& u) {
  const auto& lat = u.lattice();
  const int d = lat.dim();
  LatticePtr grid_lat = u.lattice_ptr();
  if (lat.grid() < 3 * lat.cutoff() + 1) {
    grid_lat = lat.regrid(FourierLattice::dealiased_grid(lat.cutoff()));
  }
  const GridField phys = inverse_transform(u, grid_lat);

  // Symmetric products u_i u_j, i <= j.
  const int pairs = d * (d + 1) / 2;
  GridField prod(grid_lat, pairs);
  Eigen::MatrixXi pair_index(d, d);
  int c = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      prod.values().col(c) = phys.values().col(i).cwiseProduct(phys.values().col(j));
      pair_index(i, j) = pair_index(j, i) = c++;
    }
  }
  const Field prod_hat = forward_transform(prod);

  const auto& k = lat.wavevectors();
  const std::complex<double> I(0, 1);
  Field out(u.lattice_ptr());
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out.coeffs().col(i) += (I * k.col(j).cast<double>().array()).matrix().cwiseProduct(
          prod_hat.coeffs().col(pair_index(i, j)));
    }
  }
  return out;
}

}  // namespace

Field convective_term(const Field& u, ConvectionMethod method) {
  if (!u.is_vector()) throw ContractError("convective_term expects a vector field");
  if (!is_divergence_free(u)) {
    throw ContractError("convective_term: input is not divergence free (defect " +
                        std::to_string(divergence_defect(u)) + ")");
  }
  Field raw = method == ConvectionMethod::exact_convolution ? convolve_exact(u)
                                                            : convolve_pseudospectral(u);
  return galerkin_project(std::move(raw), u.cutoff());
}

}  // namespace svm
