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

#include "svm/convection.hpp"
#include "svm/diagnostics.hpp"
#include "svm/initial_conditions.hpp"
#include "svm/operators.hpp"
#include "svm/scheme.hpp"

using namespace svm;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}

SchemeConfig small_config(Integrator integrator = Integrator::euler_maruyama) {
  SchemeConfig cfg;
  cfg.dim = 2;
  cfg.n = 8;
  cfg.m = 3;
  cfg.eps = 0.125;
  cfg.dt = 0.01;
  cfg.T = 0.1;
  cfg.integrator = integrator;
  return cfg;
}

struct CountingObserver : RunObserver {
  int starts = 0, steps = 0, finishes = 0;
  void on_start(const SolverState&) override { ++starts; }
  void on_step(const SolverState&, const StepIncrements&) override { ++steps; }
  void on_finish(const SolverState&) override { ++finishes; }
};

}  // namespace

TEST_CASE("configuration validation") {
  CHECK(SchemeConfig::default_threshold(16) == 4);
  CHECK(SchemeConfig::default_threshold(17) == 5);
  CHECK(SchemeConfig::viscosity_law(16) == 1.0 / 16);
  CHECK(SchemeConfig::viscosity_law(16, 2.0, 0.5) == 0.5);

  const NoiseModel none = NoiseModel::zero();
  auto expect_error = [&](auto mutate) {
    SchemeConfig cfg = small_config();
    mutate(cfg);
    CHECK_THROWS_AS(SvmScheme(cfg, none), ConfigError);
  };
  expect_error([](SchemeConfig& c) { c.m = 8; });
  expect_error([](SchemeConfig& c) { c.m = -1; });
  expect_error([](SchemeConfig& c) { c.dt = 0; });
  expect_error([](SchemeConfig& c) { c.eps = -1; });
  expect_error([](SchemeConfig& c) { c.dim = 4; });
  expect_error([](SchemeConfig& c) { c.grid = 9; });

  SchemeConfig mid = small_config(Integrator::deterministic_midpoint);
  CHECK_THROWS_AS(SvmScheme(mid, NoiseModel::linear(Eigen::VectorXd::Constant(2, 0.1))),
                  ConfigError);
  CHECK_NOTHROW(SvmScheme(mid, NoiseModel::linear(Eigen::VectorXd::Zero(2))));

  for (auto i : {Integrator::euler_maruyama, Integrator::semi_implicit_em,
                 Integrator::deterministic_midpoint}) {
    CHECK(integrator_from_string(to_string(i)) == i);
  }
  CHECK_THROWS_AS(integrator_from_string("rk4"), ConfigError);
}

TEST_CASE("initial state") {
  const SvmScheme scheme(small_config(), NoiseModel::zero());
  const SolverState tg = scheme.initial_state(taylor_green(2));
  CHECK(tg.time == 0.0);
  CHECK(tg.step_index == 0);
  CHECK(tg.u.cutoff() == 8);
  CHECK(tg.u.tag() == FieldTag::divergence_free);
  CHECK(max_abs_diff(restrict_to(tg.u, 1), taylor_green(2)) == 0.0);
  CHECK(energy(tg.u) == doctest::Approx(0.25).epsilon(1e-15));
  int nonzero = 0;
  for (Eigen::Index i = 0; i < tg.u.lattice().mode_count(); ++i) nonzero += tg.u.mode(i).norm() > 0;
  CHECK(nonzero == 4);

  const Field low = oracle::random_divfree(make_lattice(2, 5), 4);
  CHECK(max_abs_diff(restrict_to(scheme.initial_state(low).u, 5), low) < 1e-15);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field u0 = oracle::random_field(make_lattice(2, 12), seed);
    CHECK(l2_norm(scheme.initial_state(u0).u) <= l2_norm(u0) * (1 + 1e-12));
  }

  Field mean = taylor_green(2);
  mean.mode(mean.lattice().zero_index())(0) = 0.1;
  CHECK_THROWS_AS(scheme.initial_state(mean), DataError);
  CHECK_THROWS_AS(scheme.initial_state(taylor_green(3)), ConfigError);
}

TEST_CASE("drift") {
  const SvmScheme scheme(small_config(), NoiseModel::zero());
  CHECK(coefficient_scale(scheme.drift(scheme.initial_state(taylor_green(2)).u)) < 1e-14);
  CHECK(coefficient_scale(scheme.drift(Field(scheme.lattice()))) == 0.0);

  // sin(5 x2) e1: a steady shear mode above the threshold
  Field shear(scheme.lattice());
  const auto plus = scheme.lattice()->index_of(std::vector<int>{0, 5});
  shear.mode(plus)(0) = {0, -0.5};
  shear.mode(scheme.lattice()->mirror(plus))(0) = {0, 0.5};
  shear.set_tag(FieldTag::divergence_free);
  CHECK(max_abs_diff(scheme.drift(shear), -0.125 * 25.0 * shear) < 1e-15);

  const Field u = scheme.initial_state(oracle::random_divfree(scheme.lattice(), 9)).u;
  const Field d = scheme.drift(u);
  CHECK(divergence_defect(d) <= 1e-12 * coefficient_scale(d));
  CHECK(max_abs_diff(d, spectral_viscosity_term(u, 0.125, 3, 8) - convective_term(u)) == 0.0);
}

TEST_CASE("steady and trivial states under every integrator") {
  for (auto integrator : {Integrator::euler_maruyama, Integrator::semi_implicit_em,
                          Integrator::deterministic_midpoint}) {
    const SvmScheme scheme(small_config(integrator), NoiseModel::zero());
    const WienerPath path = path_for(scheme, 1);
    SolverState s = scheme.initial_state(taylor_green(2));
    const Field u0 = s.u;
    for (int j = 0; j < 10; ++j) {
      s = scheme.step(s, path);
      CHECK(max_abs_diff(s.u, u0) < 1e-12);
    }
    CHECK(s.step_index == 10);
    CHECK(s.time == doctest::Approx(0.1));

    const SolverState z = scheme.step(SolverState{0, Field(scheme.lattice()), 0}, path);
    CHECK(coefficient_scale(z.u) == 0.0);
  }
}

TEST_CASE("semi-implicit step matches the scalar recurrence on an upper mode") {
  SchemeConfig cfg = small_config(Integrator::semi_implicit_em);
  cfg.dt = 0.5;
  const SvmScheme scheme(cfg, NoiseModel::zero());
  const WienerPath path = path_for(scheme, 1);
  Field shear(scheme.lattice());
  const auto plus = scheme.lattice()->index_of(std::vector<int>{0, 6});
  shear.mode(plus)(0) = {0.3, -0.5};
  shear.mode(scheme.lattice()->mirror(plus))(0) = {0.3, 0.5};
  shear.set_tag(FieldTag::divergence_free);
  SolverState s{0, shear, 0};
  std::complex<double> expect{0.3, -0.5};
  for (int j = 0; j < 5; ++j) {
    s = scheme.step(s, path);
    expect /= 1.0 + 0.125 * 36 * 0.5;
    CHECK(std::abs(s.u.mode(plus)(0) - expect) < 1e-16);
  }
}

TEST_CASE("steps preserve divergence, reality and the zero mean") {
  const Eigen::VectorXd alphas = NoiseModel::alpha_law(4, 0.3, 2.0);
  for (auto integrator : {Integrator::euler_maruyama, Integrator::semi_implicit_em}) {
    for (const NoiseModel& noise :
         {NoiseModel::linear(alphas), NoiseModel::saturated_linear(alphas),
          NoiseModel::additive(alphas, 2)}) {
      const SvmScheme scheme(small_config(integrator), noise);
      const WienerPath path = path_for(scheme, 3);
      SolverState s = scheme.initial_state(oracle::random_divfree(scheme.lattice(), 5, 1.0));
      for (int j = 0; j < 10; ++j) {
        s = scheme.step(s, path);
        const double scale = coefficient_scale(s.u);
        CHECK(divergence_defect(s.u) <= 1e-12 * scale);
        CHECK(s.u.mode(s.u.lattice().zero_index()).norm() == 0.0);
        double defect = 0;
        for (Eigen::Index i = 0; i < s.u.lattice().mode_count(); ++i) {
          defect = std::max(defect,
                            (s.u.mode(i) - s.u.mode(s.u.lattice().mirror(i)).conjugate()).norm());
        }
        CHECK(defect <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("midpoint conserves energy without viscosity") {
  SchemeConfig cfg = small_config(Integrator::deterministic_midpoint);
  cfg.eps = 0;
  cfg.dt = 0.01;
  cfg.T = 1.0;
  const SvmScheme scheme(cfg, NoiseModel::zero());
  const RunResult r = run(scheme, path_for(scheme, 0),
                          scheme.initial_state(oracle::random_divfree(scheme.lattice(), 2, 1.0)));
  REQUIRE(r.ledger.rows.size() == 101);
  const double e0 = r.ledger.front().energy;
  for (const auto& row : r.ledger.rows) CHECK(std::abs(row.energy - e0) <= 1e-10);
}

TEST_CASE("midpoint reports a diverging fixed point") {
  SchemeConfig cfg = small_config(Integrator::deterministic_midpoint);
  cfg.dt = 1.0;
  const SvmScheme scheme(cfg, NoiseModel::zero());
  const SolverState s = scheme.initial_state(1e3 * oracle::random_divfree(scheme.lattice(), 2));
  CHECK_THROWS_AS(scheme.step(s, path_for(scheme, 0)), StepError);
}

TEST_CASE("run drives observers and writes one ledger row per step") {
  const SvmScheme scheme(small_config(), NoiseModel::linear(Eigen::VectorXd::Constant(3, 0.2)));
  CountingObserver obs;
  RunObserver* list[] = {&obs};
  const RunResult r = run(scheme, path_for(scheme, 11),
                          scheme.initial_state(taylor_green(2)), list);
  CHECK(obs.starts == 1);
  CHECK(obs.steps == 10);
  CHECK(obs.finishes == 1);
  CHECK(r.ledger.rows.size() == 11);
  CHECK(r.final_state.step_index == 10);
  CHECK(r.ledger.back().t == doctest::Approx(0.1));
  CHECK(r.ledger.back().ito_cumulative > 0);

  SchemeConfig zero_t = small_config();
  zero_t.T = 0;
  const SvmScheme idle(zero_t, NoiseModel::zero());
  const RunResult r0 = run(idle, path_for(idle, 1), idle.initial_state(taylor_green(2)));
  CHECK(r0.ledger.rows.size() == 1);
  CHECK(r0.final_state.step_index == 0);
}

TEST_CASE("runs are bit reproducible and resumable") {
  const SvmScheme scheme(small_config(Integrator::semi_implicit_em),
                         NoiseModel::saturated_linear(NoiseModel::alpha_law(4, 0.5, 1.0)));
  const Field u0 = oracle::random_divfree(scheme.lattice(), 6, 1.0);
  const WienerPath path = path_for(scheme, 99);
  const RunResult a = run(scheme, path, scheme.initial_state(u0));
  const RunResult b = run(scheme, path, scheme.initial_state(u0));
  CHECK(a.ledger == b.ledger);
  CHECK(a.final_state.u.coeffs() == b.final_state.u.coeffs());

  // stop half way, then continue from the saved state and ledger
  SchemeConfig half_cfg = scheme.config();
  half_cfg.T = 0.05;
  const SvmScheme half(half_cfg, scheme.noise());
  const RunResult first = run(half, path, half.initial_state(u0));
  const RunResult rest = run(scheme, path, first.final_state, {}, first.ledger);
  CHECK(rest.ledger == a.ledger);
  CHECK(rest.final_state.u.coeffs() == a.final_state.u.coeffs());
}

TEST_CASE("non-finite states abort with the last valid state") {
  SchemeConfig cfg = small_config();
  cfg.dt = 1.0;
  cfg.T = 1000;
  cfg.eps = 0;
  const SvmScheme scheme(cfg, NoiseModel::zero());
  const SolverState s = scheme.initial_state(1e3 * oracle::random_divfree(scheme.lattice(), 2));
  try {
    run(scheme, path_for(scheme, 0), s);
    FAIL("expected NumericalAbort");
  } catch (const NumericalAbort& e) {
    CHECK(e.last_valid().u.coeffs().allFinite());
    CHECK(e.last_valid().step_index > 0);
  }
}

TEST_CASE("CFL advisory") {
  SchemeConfig cfg = small_config();
  const SvmScheme ok(cfg, NoiseModel::zero());
  CHECK_FALSE(ok.cfl_advisory(ok.initial_state(taylor_green(2)).u).has_value());
  cfg.dt = 1.0;
  const SvmScheme big(cfg, NoiseModel::zero());
  CHECK(big.cfl_advisory(big.initial_state(taylor_green(2)).u).has_value());
}

TEST_CASE("Euler-Maruyama energy residual is first order in dt without noise") {
  std::vector<double> residuals;
  for (double dt : {0.02, 0.01, 0.005}) {
    SchemeConfig cfg = small_config();
    cfg.dt = dt;
    cfg.T = 0.5;
    const SvmScheme scheme(cfg, NoiseModel::zero());
    const Field u0 = oracle::random_divfree(scheme.lattice(), 4, 1.0);
    const RunResult r = run(scheme, path_for(scheme, 0), scheme.initial_state((1 / l2_norm(u0)) * u0));
    residuals.push_back(energy_balance_residual(r.ledger).back());
  }
  for (double order : observed_orders(residuals)) CHECK(order >= 0.9);
}

namespace {

// RMS over paths of ||u_dt(T) - u_ref(T)|| with u_ref at dt/8 on the same path.
std::vector<double> strong_errors(const NoiseModel& noise, int paths) {
  const std::vector<double> dts{0.04, 0.02, 0.01};
  std::vector<double> err(dts.size(), 0.0);
  const double dt_ref = dts.back() / 8;
  for (int p = 0; p < paths; ++p) {
    auto run_at = [&](double dt) {
      SchemeConfig cfg;
      cfg.dim = 2;
      cfg.n = 4;
      cfg.m = 2;
      cfg.eps = 0.05;
      cfg.dt = dt;
      cfg.T = 0.4;
      const SvmScheme scheme(cfg, noise);
      const WienerPath path(1000 + p, noise.modes(), dt_ref, cfg.T);
      return run(scheme, path, scheme.initial_state(zero_pad_embed(taylor_green(2), 4))).final_state.u;
    };
    const Field ref = run_at(dt_ref);
    for (std::size_t i = 0; i < dts.size(); ++i) err[i] += squared_norm(run_at(dts[i]) - ref) / paths;
  }
  for (auto& e : err) e = std::sqrt(e);
  return err;
}

}  // namespace

TEST_CASE("strong order: one for additive noise, one half for linear multiplicative noise") {
  // order over the factor-4 span of dt, less sensitive to path sampling
  auto order = [](const std::vector<double>& e) { return 0.5 * std::log2(e[0] / e[2]); };
  const Eigen::VectorXd alphas = NoiseModel::alpha_law(3, 1.0, 1.0);
  const double additive = order(strong_errors(NoiseModel::additive(alphas, 2), 50));
  const double linear = order(strong_errors(NoiseModel::linear(alphas), 400));
  MESSAGE("strong orders: additive " << additive << ", linear " << linear);
  CHECK(additive >= 0.85);
  CHECK(additive <= 1.3);
  CHECK(linear >= 0.35);
  CHECK(linear <= 0.7);
}
