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

#include "svm/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace svm {

namespace {

template <typename Scalar>
struct Fftw;

template <>
struct Fftw<double> {
  using Plan = fftw_plan;
  using Cplx = fftw_complex;
  static Plan r2c(int rank, const int* n, double* in, Cplx* out) {
    return fftw_plan_dft_r2c(rank, n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static Plan c2r(int rank, const int* n, Cplx* in, double* out) {
    return fftw_plan_dft_c2r(rank, n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void exec_r2c(Plan p, double* in, Cplx* out) { fftw_execute_dft_r2c(p, in, out); }
  static void exec_c2r(Plan p, Cplx* in, double* out) { fftw_execute_dft_c2r(p, in, out); }
};

template <>
struct Fftw<float> {
  using Plan = fftwf_plan;
  using Cplx = fftwf_complex;
  static Plan r2c(int rank, const int* n, float* in, Cplx* out) {
    return fftwf_plan_dft_r2c(rank, n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static Plan c2r(int rank, const int* n, Cplx* in, float* out) {
    return fftwf_plan_dft_c2r(rank, n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void exec_r2c(Plan p, float* in, Cplx* out) { fftwf_execute_dft_r2c(p, in, out); }
  static void exec_c2r(Plan p, Cplx* in, float* out) { fftwf_execute_dft_c2r(p, in, out); }
};

// The FFTW planner is not thread safe; plans are created once per
// (dim, grid) under a lock and then executed concurrently on private arrays.
template <typename Scalar>
class PlanCache {
 public:
  using Plan = typename Fftw<Scalar>::Plan;

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  std::pair<Plan, Plan> plans(int dim, int grid) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(dim, grid);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::vector<int> n(dim, grid);
    std::size_t real_size = 1;
    for (int d = 0; d < dim; ++d) real_size *= grid;
    std::size_t half_size = real_size / grid * (grid / 2 + 1);
    std::vector<Scalar> real(real_size);
    std::vector<std::complex<Scalar>> cplx(half_size);
    auto* c = reinterpret_cast<typename Fftw<Scalar>::Cplx*>(cplx.data());
    Plan fwd = Fftw<Scalar>::r2c(dim, n.data(), real.data(), c);
    Plan bwd = Fftw<Scalar>::c2r(dim, n.data(), c, real.data());
    return plans_.emplace(key, std::make_pair(fwd, bwd)).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::pair<Plan, Plan>> plans_;
};

}  // namespace

template <typename Scalar>
Scalar reality_defect(const SpectralField<Scalar>& u) {
  const auto& c = u.coeffs();
  const auto& lat = u.lattice();
  Scalar defect = 0;
  for (Eigen::Index i = 0; i <= lat.zero_index(); ++i) {
    const Eigen::Index j = lat.mirror(i);
    for (Eigen::Index comp = 0; comp < c.cols(); ++comp) {
      defect = std::max(defect, std::abs(c(j, comp) - std::conj(c(i, comp))));
    }
  }
  return defect;
}

template <typename Scalar>
SpectralField<Scalar> forward_transform(const PhysicalField<Scalar>& f) {
  using Cplx = typename Fftw<Scalar>::Cplx;
  const auto& lat = f.lattice();
  auto [fwd, bwd] = PlanCache<Scalar>::instance().plans(lat.dim(), lat.grid());
  (void)bwd;

  const Eigen::Index half = lat.half_spectrum_size();
  std::vector<std::complex<Scalar>> spectrum(half);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> column(lat.grid_size());
  const Scalar scale = Scalar(1) / Scalar(lat.grid_size());

  const auto& offset = lat.half_spectrum_offset();
  const auto& conj = lat.half_spectrum_conjugate();
  typename SpectralField<Scalar>::Coeffs coeffs(lat.mode_count(), f.components());
  for (int comp = 0; comp < f.components(); ++comp) {
    column = f.values().col(comp);
    Fftw<Scalar>::exec_r2c(fwd, column.data(), reinterpret_cast<Cplx*>(spectrum.data()));
    for (Eigen::Index i = 0; i < lat.mode_count(); ++i) {
      const auto v = spectrum[static_cast<std::size_t>(offset(i))] * scale;
      coeffs(i, comp) = conj(i) ? std::conj(v) : v;
    }
  }
  return SpectralField<Scalar>(f.lattice_ptr(), std::move(coeffs));
}

template <typename Scalar>
PhysicalField<Scalar> inverse_transform(const SpectralField<Scalar>& u, const LatticePtr& grid_lattice) {
  using Cplx = typename Fftw<Scalar>::Cplx;
  const auto& lat = *grid_lattice;
  if (!lat.same_modes(u.lattice())) {
    throw ContractError("inverse_transform: grid lattice has a different mode set");
  }
  const Scalar scale = u.coeffs().size() ? u.coeffs().cwiseAbs().maxCoeff() : Scalar(0);
  const Scalar defect = reality_defect(u);
  const Scalar tol = std::is_same_v<Scalar, float> ? Scalar(1e-5) : Scalar(1e-12);
  if (defect > tol * scale) {
    throw DataError("inverse_transform: reality violated (defect " + std::to_string(defect) +
                    ", scale " + std::to_string(scale) + ")");
  }

  auto [fwd, bwd] = PlanCache<Scalar>::instance().plans(lat.dim(), lat.grid());
  (void)fwd;
  const Eigen::Index half = lat.half_spectrum_size();
  std::vector<std::complex<Scalar>> spectrum(half);
  const auto& offset = lat.half_spectrum_offset();
  const auto& conj = lat.half_spectrum_conjugate();

  PhysicalField<Scalar> out(grid_lattice, u.components());
  for (int comp = 0; comp < u.components(); ++comp) {
    std::fill(spectrum.begin(), spectrum.end(), std::complex<Scalar>(0));
    for (Eigen::Index i = 0; i < lat.mode_count(); ++i) {
      if (!conj(i)) spectrum[static_cast<std::size_t>(offset(i))] = u.coeffs()(i, comp);
    }
    Fftw<Scalar>::exec_c2r(bwd, reinterpret_cast<Cplx*>(spectrum.data()),
                           out.values().col(comp).data());
  }
  return out;
}

template <typename Scalar>
PhysicalField<Scalar> inverse_transform(const SpectralField<Scalar>& u) {
  return inverse_transform(u, u.lattice_ptr());
}

template SpectralField<double> forward_transform(const PhysicalField<double>&);
template SpectralField<float> forward_transform(const PhysicalField<float>&);
template PhysicalField<double> inverse_transform(const SpectralField<double>&);
template PhysicalField<float> inverse_transform(const SpectralField<float>&);
template PhysicalField<double> inverse_transform(const SpectralField<double>&, const LatticePtr&);
template PhysicalField<float> inverse_transform(const SpectralField<float>&, const LatticePtr&);
template double reality_defect(const SpectralField<double>&);
template float reality_defect(const SpectralField<float>&);

}  // namespace svm
