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

#include "svm/initial_conditions.hpp"

#include "svm/operators.hpp"
#include "svm/snapshot.hpp"

#include <random>

namespace svm {

namespace {

enum class Trig { one, cos, sin };

struct Factor {
  Trig kind;
  int wavenumber;
};

// Adds amp * prod_j f_j(x_j) to one component using the exact coefficients
// cos(a x) -> 1/2 at +-a, sin(a x) -> -i/2 at +a and i/2 at -a.
void add_separable(Field& f, int component, double amp, const std::vector<Factor>& factors) {
  const int d = f.dim();
  std::vector<std::vector<std::pair<int, std::complex<double>>>> axis(d);
  for (int j = 0; j < d; ++j) {
    const Factor& fac = factors[j];
    switch (fac.kind) {
      case Trig::one: axis[j] = {{0, 1.0}}; break;
      case Trig::cos: axis[j] = {{fac.wavenumber, 0.5}, {-fac.wavenumber, 0.5}}; break;
      case Trig::sin:
        axis[j] = {{fac.wavenumber, std::complex<double>(0, -0.5)},
                   {-fac.wavenumber, std::complex<double>(0, 0.5)}};
        break;
    }
  }
  std::vector<int> k(d);
  std::vector<std::size_t> pick(d, 0);
  while (true) {
    std::complex<double> c = amp;
    for (int j = 0; j < d; ++j) {
      k[j] = axis[j][pick[j]].first;
      c *= axis[j][pick[j]].second;
    }
    const Eigen::Index idx = f.lattice().index_of(k);
    if (idx < 0) throw ContractError("preset mode outside lattice");
    f.coeffs()(idx, component) += c;
    int j = d - 1;
    while (j >= 0 && ++pick[j] == axis[j].size()) pick[j--] = 0;
    if (j < 0) break;
  }
}

}  // namespace

Field taylor_green(int dim, int cutoff) {
  Field u(make_lattice(dim, cutoff));
  if (dim == 2) {
    add_separable(u, 0, -1.0, {{Trig::cos, 1}, {Trig::sin, 1}});
    add_separable(u, 1, 1.0, {{Trig::sin, 1}, {Trig::cos, 1}});
  } else {
    add_separable(u, 0, 1.0, {{Trig::sin, 1}, {Trig::cos, 1}, {Trig::cos, 1}});
    add_separable(u, 1, -1.0, {{Trig::cos, 1}, {Trig::sin, 1}, {Trig::cos, 1}});
  }
  u.set_tag(FieldTag::divergence_free);
  return u;
}

Field shear_flow(int dim, double perturbation, int cutoff) {
  Field u(make_lattice(dim, cutoff));
  std::vector<Factor> f0(dim, {Trig::one, 0});
  f0[1] = {Trig::sin, 1};
  add_separable(u, 0, 1.0, f0);
  if (perturbation != 0.0) {
    std::vector<Factor> f1(dim, {Trig::one, 0});
    f1[0] = {Trig::sin, 2};
    add_separable(u, 1, perturbation, f1);
  }
  u.set_tag(FieldTag::divergence_free);
  return u;
}

Field random_divergence_free(int dim, int modes, double slope, double amplitude, std::uint64_t seed) {
  auto lat = make_lattice(dim, modes);
  Field u(lat);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  // Draw for the first half (k < 0 lexicographically), mirror the rest.
  for (Eigen::Index i = 0; i < lat->zero_index(); ++i) {
    const double envelope = std::pow(1.0 + lat->k_squared()(i), -0.5 * slope);
    for (int c = 0; c < dim; ++c) {
      const std::complex<double> z(normal(gen), normal(gen));
      u.coeffs()(i, c) = envelope * z;
      u.coeffs()(lat->mirror(i), c) = std::conj(envelope * z);
    }
  }
  u = leray_project(std::move(u));
  const double norm = l2_norm(u);
  if (norm > 0) u *= amplitude / norm;
  return u;
}

Field make_initial_field(const InitialSpec& spec, int dim) {
  Field u;
  if (spec.preset == "taylor_green") {
    u = taylor_green(dim);
    u *= spec.amplitude;
  } else if (spec.preset == "shear") {
    u = shear_flow(dim, spec.perturbation);
    u *= spec.amplitude;
  } else if (spec.preset == "random_divfree") {
    u = random_divergence_free(dim, spec.modes, spec.slope, spec.amplitude, spec.seed);
  } else if (spec.preset == "file") {
    u = read_snapshot(spec.file).field;
    if (u.dim() != dim) throw ConfigError("snapshot dim does not match lattice dim");
  } else {
    throw ConfigError("unknown initial preset '" + spec.preset + "'");
  }
  return u;
}

}  // namespace svm
