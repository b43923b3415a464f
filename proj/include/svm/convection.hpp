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

namespace svm {

enum class ConvectionMethod { exact_convolution, dealiased_pseudospectral };

/// P_n(u . grad u) for a divergence-free u with modes <= n.
///
/// exact_convolution sums sum_{p+q=k} (i q . u_p) u_q over all mode pairs
/// (O(M^2), intended for small lattices and cross-checks). The
/// pseudo-spectral path forms div(u (x) u) on a grid of at least 3n+1
/// points per axis, where the quadratic product is alias free.
/// Throws ContractError if u is not divergence free.
Field convective_term(const Field& u,
                      ConvectionMethod method = ConvectionMethod::dealiased_pseudospectral);

}  // namespace svm
