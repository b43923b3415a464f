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

#include <cstdint>
#include <string>

namespace svm {

/// Named zero-mean initial data.
///   taylor_green    2-D (-cos x1 sin x2, sin x1 cos x2); 3-D classic TG vortex
///   shear           (sin x2, perturbation * sin 2 x1, 0)
///   random_divfree  Gaussian divergence-free field, |u_k| ~ (1+|k|^2)^{-slope/2}
///                   on |k|_inf <= modes, scaled to ||u|| = amplitude
///   file            snapshot on disk
struct InitialSpec {
  std::string preset = "taylor_green";
  double amplitude = 1.0;
  double perturbation = 0.0;
  std::uint64_t seed = 0;
  int modes = 16;
  double slope = 3.0;
  std::string file;

  bool operator==(const InitialSpec&) const = default;
};

/// The preset on its own natural lattice. A random_divfree field depends only
/// on (seed, modes, slope, amplitude), so any resolution sees truncations of
/// the same field.
Field make_initial_field(const InitialSpec& spec, int dim);

Field taylor_green(int dim, int cutoff = 1);
Field shear_flow(int dim, double perturbation = 0.0, int cutoff = 2);
Field random_divergence_free(int dim, int modes, double slope, double amplitude, std::uint64_t seed);

}  // namespace svm
