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

#include "svm/noise.hpp"

#include "svm/operators.hpp"
#include "svm/transform.hpp"

#include <cmath>
#include <random>

namespace svm {

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::zero: return "zero";
    case NoiseFamily::linear: return "linear";
    case NoiseFamily::saturated_linear: return "saturated_linear";
    case NoiseFamily::additive_modes: return "additive_modes";
  }
  return "unknown";
}

NoiseFamily noise_family_from_string(const std::string& name) {
  if (name == "zero") return NoiseFamily::zero;
  if (name == "linear") return NoiseFamily::linear;
  if (name == "saturated_linear") return NoiseFamily::saturated_linear;
  if (name == "additive_modes") return NoiseFamily::additive_modes;
  throw ConfigError("unknown noise family '" + name + "'");
}

NoiseModel NoiseModel::zero(int modes) {
  NoiseModel m;
  m.family_ = NoiseFamily::zero;
  m.alphas_ = Eigen::VectorXd::Zero(modes);
  return m;
}

NoiseModel NoiseModel::linear(Eigen::VectorXd alphas) {
  NoiseModel m;
  m.family_ = NoiseFamily::linear;
  m.alphas_ = std::move(alphas);
  m.d0_ = m.d1_ = m.alphas_.squaredNorm();
  return m;
}

NoiseModel NoiseModel::saturated_linear(Eigen::VectorXd alphas) {
  NoiseModel m;
  m.family_ = NoiseFamily::saturated_linear;
  m.alphas_ = std::move(alphas);
  // |u|/sqrt(1+|u|^2) <= 1 and the map has Jacobian norm <= 1.
  m.d0_ = m.d1_ = m.alphas_.squaredNorm();
  return m;
}

NoiseModel NoiseModel::additive(Eigen::VectorXd alphas, int dim, std::vector<AdditiveMode> modes) {
  NoiseModel m;
  m.family_ = NoiseFamily::additive_modes;
  m.alphas_ = std::move(alphas);
  if (modes.empty()) {
    for (int k = 0; k < m.modes(); ++k) {
      AdditiveMode mode{Eigen::VectorXi::Zero(dim), Eigen::VectorXd::Zero(dim)};
      mode.wavevector(1) = k + 1;
      mode.direction(0) = 1.0;
      modes.push_back(std::move(mode));
    }
  }
  if (static_cast<int>(modes.size()) != m.modes()) {
    throw ConfigError("additive_modes: " + std::to_string(modes.size()) + " forcing modes for K=" +
                      std::to_string(m.modes()));
  }
  for (auto& mode : modes) {
    if (mode.wavevector.size() != dim || mode.direction.size() != dim) {
      throw ConfigError("additive_modes: forcing mode dimension does not match lattice dim");
    }
    if (mode.wavevector.isZero() || mode.direction.norm() == 0) {
      throw ConfigError("additive_modes: forcing needs a nonzero wavevector and direction");
    }
    mode.direction.normalize();
  }
  m.additive_ = std::move(modes);
  // |g_k(x)|^2 <= 2 pointwise; independent of u.
  m.d0_ = 2.0 * m.alphas_.squaredNorm();
  m.d1_ = 0.0;
  return m;
}

Eigen::VectorXd NoiseModel::alpha_law(int modes, double amplitude, double decay) {
  Eigen::VectorXd a(modes);
  for (int k = 0; k < modes; ++k) a(k) = amplitude * std::pow(double(k + 1), -decay);
  return a;
}

Eigen::VectorXd NoiseModel::apply(int k, const Eigen::Ref<const Eigen::VectorXd>& u,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (k < 0 || k >= modes()) {
    throw IndexError("noise mode " + std::to_string(k) + " outside 0.." + std::to_string(modes() - 1));
  }
  const double a = alphas_(k);
  switch (family_) {
    case NoiseFamily::zero: return Eigen::VectorXd::Zero(u.size());
    case NoiseFamily::linear: return a * u;
    case NoiseFamily::saturated_linear: return a * u / std::sqrt(1.0 + u.squaredNorm());
    case NoiseFamily::additive_modes: {
      const auto& mode = additive_[k];
      const double phase = mode.wavevector.cast<double>().dot(x);
      return a * std::sqrt(2.0) * std::cos(phase) * mode.direction;
    }
  }
  return Eigen::VectorXd::Zero(u.size());
}

GridField NoiseModel::evaluate_sigma(const GridField& u, int k) const {
  if (k < 0 || k >= modes()) {
    throw IndexError("noise mode " + std::to_string(k) + " outside 0.." + std::to_string(modes() - 1));
  }
  GridField out(u.lattice_ptr(), u.components());
  const double a = alphas_(k);
  switch (family_) {
    case NoiseFamily::zero: break;
    case NoiseFamily::linear: out.values() = a * u.values(); break;
    case NoiseFamily::saturated_linear: {
      const Eigen::ArrayXd scale =
          a / (1.0 + u.values().rowwise().squaredNorm().array()).sqrt();
      out.values() = scale.matrix().asDiagonal() * u.values();
      break;
    }
    case NoiseFamily::additive_modes: {
      const auto& mode = additive_[k];
      for (Eigen::Index p = 0; p < u.values().rows(); ++p) {
        const double phase = mode.wavevector.cast<double>().dot(u.point(p));
        out.values().row(p) = (a * std::sqrt(2.0) * std::cos(phase)) * mode.direction.transpose();
      }
      break;
    }
  }
  return out;
}

namespace {

Field pin_mean(Field f) {
  f.mode(f.lattice().zero_index()).setZero();
  return f;
}

// Exact coefficients of g(x) = sqrt(2) a cos(q.x): a/sqrt(2) at +-q.
Field additive_forcing(const AdditiveMode& mode, const LatticePtr& lattice) {
  Field g(lattice);
  std::vector<int> q(mode.wavevector.data(), mode.wavevector.data() + mode.wavevector.size());
  const Eigen::Index plus = lattice->index_of(q);
  if (plus < 0) return g;
  const Eigen::VectorXcd c = (mode.direction / std::sqrt(2.0)).cast<std::complex<double>>();
  g.mode(plus) += c.transpose();
  g.mode(lattice->mirror(plus)) += c.transpose();
  return g;
}

}  // namespace

std::vector<Field> projected_sigma(const NoiseModel& model, const Field& u, int n) {
  const int K = model.modes();
  std::vector<Field> out;
  out.reserve(K);
  switch (model.family()) {
    case NoiseFamily::zero:
      for (int k = 0; k < K; ++k) out.emplace_back(u.lattice_ptr());
      break;
    case NoiseFamily::linear:
    case NoiseFamily::saturated_linear: {
      // sigma_k = alpha_k * shape(u): one transform pair serves every k.
      const GridField phys = inverse_transform(u);
      GridField shape(phys.lattice_ptr(), phys.values());
      if (model.family() == NoiseFamily::saturated_linear) {
        const Eigen::ArrayXd scale = 1.0 / (1.0 + phys.values().rowwise().squaredNorm().array()).sqrt();
        shape.values() = scale.matrix().asDiagonal() * phys.values();
      }
      const Field base = pin_mean(galerkin_project(forward_transform(shape), n));
      for (int k = 0; k < K; ++k) out.push_back(model.alphas()(k) * base);
      break;
    }
    case NoiseFamily::additive_modes:
      for (int k = 0; k < K; ++k) {
        out.push_back(model.alphas()(k) *
                      pin_mean(galerkin_project(additive_forcing(model.additive_modes()[k],
                                                                 u.lattice_ptr()),
                                                n)));
      }
      break;
  }
  for (auto& f : out) f.set_tag(FieldTag::divergence_free);
  return out;
}

Field combine_noise(const std::vector<Field>& projected, const Eigen::Ref<const Eigen::VectorXd>& dw,
                    const LatticePtr& lattice) {
  Field inc(lattice);
  inc.set_tag(FieldTag::divergence_free);
  for (std::size_t k = 0; k < projected.size(); ++k) {
    inc.coeffs() += dw(static_cast<Eigen::Index>(k)) * projected[k].coeffs();
  }
  return inc;
}

Field projected_noise_increment(const NoiseModel& model, const Field& u, const WienerPath& path,
                                Eigen::Index step, int n, int stride) {
  if (path.modes() < model.modes()) {
    throw ConfigError("Wiener path has fewer modes than the noise model");
  }
  const Eigen::VectorXd dw = path.step_increments(step, stride).head(model.modes());
  return combine_noise(projected_sigma(model, u, n), dw, u.lattice_ptr());
}

double ito_energy_rate(const NoiseModel& model, const Field& u, int n) {
  double rate = 0;
  for (const auto& f : projected_sigma(model, u, n)) rate += squared_norm(f);
  return rate;
}

NoiseContractReport verify_noise_contract(const NoiseModel& model, int sample_count, int dim,
                                          std::uint64_t seed) {
  if (sample_count < 100) throw ConfigError("verify_noise_contract needs >= 100 samples");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  auto random_vector = [&](double log_lo, double log_hi) {
    Eigen::VectorXd v(dim);
    for (int d = 0; d < dim; ++d) v(d) = normal(gen);
    const double r = std::pow(10.0, log_lo + (log_hi - log_lo) * uniform(gen));
    return Eigen::VectorXd(v.normalized() * r);
  };
  auto random_point = [&] {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x(d) = 2 * EIGEN_PI * uniform(gen);
    return x;
  };

  NoiseContractReport report;
  for (int s = 0; s < sample_count; ++s) {
    const Eigen::VectorXd x = random_point();
    const Eigen::VectorXd u = random_vector(-3, 8);
    // Near pairs are perturbed relative to |u| so u - v stays well conditioned.
    const Eigen::VectorXd v = (s % 2 == 0) ? Eigen::VectorXd(u + u.norm() * random_vector(-2, 0))
                                           : random_vector(-3, 8);
    double growth = 0;
    double lipschitz = 0;
    for (int k = 0; k < model.modes(); ++k) {
      const Eigen::VectorXd su = model.apply(k, u, x);
      growth += su.squaredNorm();
      lipschitz += (su - model.apply(k, v, x)).squaredNorm();
    }
    report.D0_hat = std::max(report.D0_hat, growth / (1.0 + u.squaredNorm()));
    const double duv = (u - v).squaredNorm();
    if (duv > 0) report.D1_hat = std::max(report.D1_hat, lipschitz / duv);
  }
  const double slack = 1e-12;
  report.pass = report.D0_hat <= model.D0() * (1 + slack) + 1e-300 &&
                report.D1_hat <= model.D1() * (1 + slack) + 1e-300;
  return report;
}

}  // namespace svm
