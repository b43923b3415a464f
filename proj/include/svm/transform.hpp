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

/// Coefficients of the trigonometric interpolant of f on its lattice grid,
/// truncated to |k|_inf <= cutoff. Normalized so that a unit-amplitude
/// e^{ik.x} sample yields coefficient 1 at k.
template <typename Scalar>
SpectralField<Scalar> forward_transform(const PhysicalField<Scalar>& f);

/// Synthesis sum_k u_k e^{ik.x} on the lattice grid.
/// Throws DataError if u_{-k} != conj(u_k) beyond 1e-12 of the field scale.
template <typename Scalar>
PhysicalField<Scalar> inverse_transform(const SpectralField<Scalar>& u);

/// Same as inverse_transform, on the given lattice's grid (same modes).
template <typename Scalar>
PhysicalField<Scalar> inverse_transform(const SpectralField<Scalar>& u, const LatticePtr& grid_lattice);

/// max_k |u_{-k} - conj(u_k)|.
template <typename Scalar>
Scalar reality_defect(const SpectralField<Scalar>& u);

}  // namespace svm
