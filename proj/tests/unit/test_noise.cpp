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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "svm/noise.hpp"
#include "svm/operators.hpp"
#include "svm/transform.hpp"

using namespace svm;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("Wiener paths are reproducible and refinement consistent") {
  const WienerPath a(42, 4, 0.01, 1.0);
  const WienerPath b(42, 4, 0.01, 1.0);
  CHECK(a.steps() == 100);
  CHECK(a.increments() == b.increments());
  CHECK(WienerPath(43, 4, 0.01, 1.0).increments() != a.increments());

  const WienerPath c = a.coarsen(2);
  CHECK(c.steps() == 50);
  CHECK(c.dt_base() == doctest::Approx(0.02));
  for (Eigen::Index j = 0; j < c.steps(); ++j) {
    for (int k = 0; k < 4; ++k) {
      CHECK(c.increment(k, j) == a.increment(k, 2 * j) + a.increment(k, 2 * j + 1));
    }
    CHECK(a.step_increments(j, 2) == c.increments().row(j).transpose());
  }
  CHECK(a.stride_for(0.04) == 4);
  CHECK_THROWS_AS(a.stride_for(0.015), ConfigError);
  CHECK_THROWS_AS(a.step_increments(50, 2), IndexError);
  CHECK_THROWS_AS(WienerPath(1, 1, 0.0, 1.0), ConfigError);
}

TEST_CASE("mode tables do not depend on K or on the horizon") {
  const WienerPath small(7, 2, 0.01, 0.5);
  const WienerPath big(7, 5, 0.01, 1.0);
  CHECK(big.increments().topLeftCorner(small.steps(), 2) == small.increments());
}

TEST_CASE("Wiener increments have variance dt") {
  const double dt = 0.01;
  const WienerPath path(2024, 2, dt, 1000.0);
  REQUIRE(path.steps() == 100000);
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd x = path.increments().col(k);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().sum() / double(x.size() - 1);
    const double se = dt * std::sqrt(2.0 / double(x.size()));
    CHECK(std::abs(var - dt) < 3 * se);
    CHECK(std::abs(mean) < 3 * std::sqrt(dt / double(x.size())));
  }
  // independent modes
  const double corr = path.increments().col(0).dot(path.increments().col(1)) /
                      (path.increments().col(0).norm() * path.increments().col(1).norm());
  CHECK(std::abs(corr) < 3 / std::sqrt(1e5));
}

TEST_CASE("evaluate_sigma pointwise families") {
  auto lat = make_lattice(3, 2);
  GridField u(lat);
  u.values().col(0).setOnes();

  CHECK(NoiseModel::zero(3).evaluate_sigma(u, 1).values().isZero());

  Eigen::VectorXd alphas(2);
  alphas << 0.3, 0.1;
  const GridField lin = NoiseModel::linear(alphas).evaluate_sigma(u, 0);
  CHECK((lin.values().col(0).array() - 0.3).abs().maxCoeff() < 1e-15);
  CHECK(lin.values().rightCols(2).isZero());

  // unit-length values in random directions
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  GridField w(lat);
  for (Eigen::Index p = 0; p < lat->grid_size(); ++p) {
    Eigen::Vector3d v(normal(gen), normal(gen), normal(gen));
    w.values().row(p) = v.normalized().transpose();
  }
  const GridField sat = NoiseModel::saturated_linear(alphas).evaluate_sigma(w, 1);
  CHECK((sat.values() - w.values() * (0.1 / std::sqrt(2.0))).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(NoiseModel::linear(alphas).evaluate_sigma(u, 2), IndexError);
  CHECK_THROWS_AS(NoiseModel::linear(alphas).apply(-1, Eigen::Vector3d::Zero(),
                                                   Eigen::Vector3d::Zero()),
                  IndexError);
}

TEST_CASE("additive forcing is sqrt(2) a cos(q.x)") {
  Eigen::VectorXd alphas(2);
  alphas << 0.5, 0.25;
  const NoiseModel model = NoiseModel::additive(alphas, 2);
  auto lat = make_lattice(2, 3);
  const GridField s = model.evaluate_sigma(GridField(lat), 1);
  for (Eigen::Index p = 0; p < lat->grid_size(); p += 7) {
    const auto x = s.point(p);
    CHECK(s.values()(p, 0) == doctest::Approx(0.25 * std::sqrt(2.0) * std::cos(2 * x(1))));
    CHECK(s.values()(p, 1) == 0.0);
  }
  CHECK(model.D0() == doctest::Approx(2 * alphas.squaredNorm()));
  CHECK(model.D1() == 0.0);
  CHECK_THROWS_AS(NoiseModel::additive(alphas, 2, {AdditiveMode{Eigen::Vector2i(1, 0),
                                                                Eigen::Vector2d(1, 0)}}),
                  ConfigError);
}

TEST_CASE("family names round trip") {
  for (auto f : {NoiseFamily::zero, NoiseFamily::linear, NoiseFamily::saturated_linear,
                 NoiseFamily::additive_modes}) {
    CHECK(noise_family_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(noise_family_from_string("pink"), ConfigError);
  const Eigen::VectorXd a = NoiseModel::alpha_law(4, 0.5, 2.0);
  CHECK(a(0) == 0.5);
  CHECK(a(3) == doctest::Approx(0.5 / 16));
}

TEST_CASE("projected noise increment") {
  auto lat = make_lattice(2, 6);
  const Field u = oracle::random_divfree(lat, 17, 1.0);
  const WienerPath path(5, 3, 0.01, 0.1);

  const Field z = projected_noise_increment(NoiseModel::zero(3), u, path, 2, 6);
  CHECK(coefficient_scale(z) == 0.0);

  const Eigen::Vector3d alphas(0.3, 0.2, 0.1);
  const Field lin = projected_noise_increment(NoiseModel::linear(alphas), u, path, 4, 6);
  const double factor = alphas.dot(path.increments().row(4).transpose());
  CHECK(max_abs_diff(lin, factor * u) < 1e-12 * coefficient_scale(u));
  CHECK(divergence_defect(lin) <= 1e-12 * coefficient_scale(lin));

  // sqrt(2) e1 cos(x1) is the gradient of sqrt(2) sin(x1)
  const NoiseModel grad = NoiseModel::additive(
      Eigen::VectorXd::Constant(1, 0.7), 2, {AdditiveMode{Eigen::Vector2i(1, 0), Eigen::Vector2d(1, 0)}});
  CHECK(coefficient_scale(projected_noise_increment(grad, u, path, 0, 6)) < 1e-16);

  // modes above n are removed
  const NoiseModel high = NoiseModel::additive(
      Eigen::VectorXd::Constant(1, 1.0), 2, {AdditiveMode{Eigen::Vector2i(0, 5), Eigen::Vector2d(1, 0)}});
  CHECK(coefficient_scale(projected_noise_increment(high, u, path, 0, 4)) == 0.0);
  CHECK(coefficient_scale(projected_noise_increment(high, u, path, 0, 5)) > 0.0);

  CHECK_THROWS_AS(projected_noise_increment(NoiseModel::linear(alphas), u, path, 10, 6), IndexError);
}

TEST_CASE("saturated noise matches a direct oracle") {
  auto lat = make_lattice(2, 4);
  const Field u = oracle::random_divfree(lat, 8, 1.0);
  const Eigen::Vector2d alphas(0.4, 0.2);
  const auto projected = projected_sigma(NoiseModel::saturated_linear(alphas), u, 4);
  // pointwise map on the lattice grid, direct DFT, explicit Leray formula
  const auto pts = oracle::grid_points(2, lat->grid());
  const Eigen::MatrixXd uval = oracle::synthesize(u, pts).real();
  Eigen::MatrixXd sval(uval.rows(), 2);
  for (Eigen::Index p = 0; p < uval.rows(); ++p) {
    sval.row(p) = uval.row(p) / std::sqrt(1 + uval.row(p).squaredNorm());
  }
  Field expect = oracle::leray_truncate(oracle::analyze(sval, pts, lat), 4);
  expect.mode(lat->zero_index()).setZero();
  CHECK(max_abs_diff(projected[1], 0.2 * expect) < 1e-13 * coefficient_scale(expect));
  CHECK(max_abs_diff(projected[0], 2.0 * projected[1]) < 1e-16);
}

TEST_CASE("ito energy rate") {
  auto lat = make_lattice(2, 6);
  const Field u = oracle::random_divfree(lat, 31);
  CHECK(ito_energy_rate(NoiseModel::zero(4), u, 6) == 0.0);

  const Eigen::Vector3d alphas(0.3, 0.2, 0.1);
  CHECK(ito_energy_rate(NoiseModel::linear(alphas), u, 6) ==
        doctest::Approx(alphas.squaredNorm() * squared_norm(u)).epsilon(1e-11));

  // default forcings: q_k = (0, k+1), a = e1, ||g_k|| = 1 while |q| <= n
  const Eigen::VectorXd a = NoiseModel::alpha_law(8, 1.0, 1.0);
  const NoiseModel add = NoiseModel::additive(a, 2);
  const double expect = a.head(6).squaredNorm();
  CHECK(ito_energy_rate(add, u, 6) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(ito_energy_rate(add, 3.0 * u, 6) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("noise contracts") {
  const auto zero = verify_noise_contract(NoiseModel::zero(3), 200, 3);
  CHECK(zero.D0_hat == 0.0);
  CHECK(zero.D1_hat == 0.0);
  CHECK(zero.pass);

  const Eigen::VectorXd a = NoiseModel::alpha_law(8, 0.3, 2.0);
  const auto lin = verify_noise_contract(NoiseModel::linear(a), 500, 3);
  CHECK(lin.D1_hat == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
  // sup over |u| of |u|^2/(1+|u|^2) approaches 1 for radii up to 1e8
  CHECK(lin.D0_hat == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
  CHECK(lin.pass);

  const auto sat = verify_noise_contract(NoiseModel::saturated_linear(a), 500, 2);
  CHECK(sat.D0_hat <= a.squaredNorm());
  CHECK(sat.D1_hat <= a.squaredNorm() * (1 + 1e-12));
  CHECK(sat.pass);

  const auto add = verify_noise_contract(NoiseModel::additive(a, 3), 500, 3);
  CHECK(add.pass);
  CHECK(add.D1_hat == 0.0);

  NoiseModel under = NoiseModel::linear(a);
  under.set_declared_constants(0.5 * a.squaredNorm(), a.squaredNorm());
  CHECK_FALSE(verify_noise_contract(under, 200, 2).pass);
  CHECK_THROWS_AS(verify_noise_contract(under, 99, 2), ConfigError);
}
