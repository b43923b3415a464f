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

#include "svm/ensemble.hpp"
#include "svm/initial_conditions.hpp"
#include "svm/operators.hpp"

#include <random>

using namespace svm;

namespace {

SchemeConfig base_config() {
  SchemeConfig cfg;
  cfg.dim = 2;
  cfg.n = 6;
  cfg.m = 3;
  cfg.eps = 1.0 / 6;
  cfg.dt = 0.02;
  cfg.T = 0.4;
  return cfg;
}

EnsembleConfig ensemble_config(int members) {
  EnsembleConfig e;
  e.members = members;
  e.master_seed = 17;
  e.probes = {Probe{0.2, Eigen::Vector2d(0.5, 1.0)}, Probe{0.4, Eigen::Vector2d(3.0, 2.0)}};
  e.histogram_bins = 8;
  return e;
}

}  // namespace

TEST_CASE("member seeds and configuration checks") {
  EnsembleConfig e = ensemble_config(5);
  const auto s = e.member_seeds();
  CHECK(s == e.member_seeds());
  CHECK(std::set<std::uint64_t>(s.begin(), s.end()).size() == 5);
  e.master_seed = 18;
  CHECK(e.member_seeds() != s);

  const SchemeConfig cfg = base_config();
  auto bad = [&](auto mutate) {
    EnsembleConfig c = ensemble_config(3);
    mutate(c);
    CHECK_THROWS_AS(c.validate(cfg), ConfigError);
  };
  bad([](EnsembleConfig& c) { c.members = 0; });
  bad([](EnsembleConfig& c) { c.ladder = {8, 8}; });
  bad([](EnsembleConfig& c) { c.ladder = {16, 8}; });
  bad([](EnsembleConfig& c) { c.histogram_bins = 0; });
  bad([](EnsembleConfig& c) { c.probes[0].t = 1.0; });
  bad([](EnsembleConfig& c) { c.probes[0].x = Eigen::Vector2d(7.0, 0.0); });
  bad([](EnsembleConfig& c) { c.probes[0].x = Eigen::Vector3d(1, 1, 1); });
  CHECK_NOTHROW(ensemble_config(3).validate(cfg));
}

TEST_CASE("resolution law") {
  const SchemeConfig base = base_config();
  const SchemeConfig a = ResolutionLaw{}.at(base, 16);
  CHECK(a.n == 16);
  CHECK(a.m == 4);
  CHECK(a.eps == 1.0 / 16);
  ResolutionLaw fixed;
  fixed.eps = 0.01;
  fixed.m = 2;
  const SchemeConfig b = fixed.at(base, 32);
  CHECK(b.eps == 0.01);
  CHECK(b.m == 2);
  CHECK(b.dt == base.dt);
}

TEST_CASE("a single member is the plain solver run") {
  const SchemeConfig cfg = base_config();
  const NoiseModel noise = NoiseModel::linear(NoiseModel::alpha_law(3, 0.3, 1.0));
  const EnsembleConfig e = ensemble_config(1);
  const auto result = run_ensemble(e, cfg, noise, taylor_green(2));
  const SvmScheme scheme(cfg, noise);
  const RunResult direct =
      run(scheme, path_for(scheme, e.member_seeds()[0]), scheme.initial_state(taylor_green(2)));
  REQUIRE(result.members.size() == 1);
  CHECK(result.members[0].ledger == direct.ledger);
  CHECK(result.members[0].final_u.coeffs() == direct.final_state.u.coeffs());
  CHECK(result.mean_final.coeffs() == direct.final_state.u.coeffs());
  CHECK(result.probes[1].mean.isApprox(evaluate_at(direct.final_state.u, e.probes[1].x), 1e-15));
}

TEST_CASE("zero noise ensembles are point masses") {
  const Field u0 = make_initial_field({"random_divfree", 1.0, 0, 3, 6, 3.0, ""}, 2);
  const auto result = run_ensemble(ensemble_config(4), base_config(), NoiseModel::zero(), u0);
  for (const auto& m : result.members) {
    CHECK(m.final_u.coeffs() == result.members[0].final_u.coeffs());
  }
  for (const auto& p : result.probes) {
    for (int c = 0; c < 2; ++c) {
      CHECK(p.histogram.occupied_bins(c) == 1);
      CHECK(p.variance(c) == 0.0);
    }
  }
}

TEST_CASE("ensembles are deterministic under threading") {
  const NoiseModel noise = NoiseModel::saturated_linear(NoiseModel::alpha_law(4, 0.5, 1.0));
  EnsembleConfig e = ensemble_config(6);
  const auto one = run_ensemble(e, base_config(), noise, taylor_green(2));
  e.threads = 3;
  const auto three = run_ensemble(e, base_config(), noise, taylor_green(2));
  for (int j = 0; j < 6; ++j) {
    CHECK(one.members[j].ledger == three.members[j].ledger);
    CHECK(one.members[j].probe_values == three.members[j].probe_values);
  }
  CHECK(one.mean_final.coeffs() == three.mean_final.coeffs());
}

TEST_CASE("half ensembles agree to Monte-Carlo accuracy") {
  const NoiseModel noise = NoiseModel::linear(NoiseModel::alpha_law(3, 0.4, 1.0));
  const int M = 64;
  const auto result = run_ensemble(ensemble_config(M), base_config(), noise, taylor_green(2));
  std::vector<Field> a, b, all;
  for (int j = 0; j < M; ++j) {
    (j < M / 2 ? a : b).push_back(result.members[j].final_u);
    all.push_back(result.members[j].final_u);
  }
  const Field mean = pairwise_mean(all);
  double var = 0;
  for (const auto& f : all) var += squared_norm(f - mean) / (M - 1);
  const double diff = l2_norm(pairwise_mean(a) - pairwise_mean(b));
  // E||mean_a - mean_b||^2 = 2 var / (M/2)
  const double expected = std::sqrt(4 * var / M);
  CHECK(diff > 0);
  CHECK(diff < 3 * expected);
}

TEST_CASE("excessive member failures abort the ensemble") {
  SchemeConfig cfg = base_config();
  cfg.dt = 1.0;
  cfg.T = 400;
  cfg.eps = 0;
  const Field big = 1e3 * make_initial_field({"random_divfree", 1.0, 0, 3, 6, 1.0, ""}, 2);
  CHECK_THROWS_AS(run_ensemble(ensemble_config(3), cfg, NoiseModel::zero(), big), ExperimentError);
}

TEST_CASE("empirical Young measure histograms") {
  Eigen::MatrixXd same = Eigen::MatrixXd::Constant(5, 2, 0.7);
  const auto point = empirical_young_measure(same, 10);
  CHECK(point.occupied_bins(0) == 1);
  CHECK(point.counts[0].size() == 1);
  CHECK(point.edges[0](0) == 0.7);
  CHECK(point.mean(1) == 0.7);
  CHECK(point.samples() == 5);

  Eigen::MatrixXd pm(2, 1);
  pm << -1, 1;
  const auto two = empirical_young_measure(pm, 10);
  REQUIRE(two.counts[0].size() == 2);
  CHECK(two.counts[0] == Eigen::Vector2i(1, 1));

  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal(3.0, 0.25);
  Eigen::MatrixXd g(500, 3);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(gen);
  const auto h = empirical_young_measure(g, 16, 2);
  CHECK(h.probe == 2);
  for (int c = 0; c < 3; ++c) {
    const double mean = g.col(c).mean();
    const double var = (g.col(c).array() - mean).square().sum() / 499;
    CHECK(h.counts[c].sum() == 500);
    CHECK(std::abs(h.mean(c) - mean) <= 1e-12 * std::abs(mean));
    CHECK(std::abs(h.variance(c) - var) <= 1e-12 * var);
    REQUIRE(h.edges[c].size() == h.counts[c].size() + 1);
    CHECK(h.counts[c].size() == 16);
    CHECK(h.edges[c](0) == g.col(c).minCoeff());
    CHECK(h.edges[c](16) == g.col(c).maxCoeff());
    for (Eigen::Index b = 0; b + 1 < h.edges[c].size(); ++b) {
      CHECK(h.edges[c](b) < h.edges[c](b + 1));
      if (h.counts[c](b) > 0) {
        CHECK(h.bin_means[c](b) >= h.edges[c](b));
        CHECK(h.bin_means[c](b) <= h.edges[c](b + 1));
      }
    }
  }
  CHECK(two.edges[0].size() == 3);
  CHECK(point.edges[0].size() == 2);
  CHECK_THROWS_AS(empirical_young_measure(Eigen::MatrixXd::Zero(1, 2), 4), ContractError);
}

TEST_CASE("probe histograms agree with the ensemble mean") {
  const NoiseModel noise = NoiseModel::linear(NoiseModel::alpha_law(3, 0.4, 1.0));
  const auto r = run_ensemble(ensemble_config(20), base_config(), noise, taylor_green(2));
  for (std::size_t p = 0; p < r.probes.size(); ++p) {
    for (int c = 0; c < 2; ++c) {
      CHECK(r.probes[p].histogram.mean(c) ==
            doctest::Approx(r.probes[p].mean(c)).epsilon(1e-12).scale(1e-12));
    }
  }
  // probe at T equals the mean field evaluated there
  CHECK((evaluate_at(r.mean_final, r.probes.size() > 1 ? ensemble_config(1).probes[1].x
                                                        : Eigen::VectorXd()) -
         r.probes[1].mean)
            .norm() < 1e-13);
}

TEST_CASE("one-dimensional Wasserstein distance") {
  const std::vector<double> a{0, 1}, b{1, 2};
  CHECK(wasserstein1_1d(a, a) == 0.0);
  CHECK(wasserstein1_1d(a, b) == 1.0);
  const std::vector<double> c{1, 0};
  CHECK(wasserstein1_1d(a, c) == 0.0);
  const std::vector<double> point{2.5}, moved{4.0};
  CHECK(wasserstein1_1d(point, moved) == 1.5);
  // unequal sizes: exact quantile integral
  const std::vector<double> twice{0, 0, 1, 1};
  CHECK(wasserstein1_1d(a, twice) == 0.0);
  const std::vector<double> zero{0.0};
  CHECK(wasserstein1_1d(zero, a) == 0.5);
  const std::vector<double> three{0, 1, 2};
  CHECK(wasserstein1_1d(a, three) == doctest::Approx(0.5));
  CHECK_THROWS_AS(wasserstein1_1d(std::vector<double>{}, a), DataError);

  std::mt19937_64 gen(9);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(20), y(20), z(20);
    for (auto* v : {&x, &y, &z}) {
      for (auto& e : *v) e = normal(gen);
    }
    const double xy = wasserstein1_1d(x, y), yz = wasserstein1_1d(y, z), xz = wasserstein1_1d(x, z);
    CHECK(xy == wasserstein1_1d(y, x));
    CHECK(xz <= xy + yz + 1e-12);
    CHECK(xy >= 0);
  }
}

TEST_CASE("Cesaro means") {
  auto lat = make_lattice(2, 4);
  const Field u = oracle::random_divfree(lat, 1);
  const std::vector<Field> same{u, u, u};
  CHECK((cesaro_mean(same).coeffs() - u.coeffs()).cwiseAbs().maxCoeff() < 1e-15);
  const std::vector<Field> pair{u, 3.0 * u};
  CHECK((cesaro_mean(pair).coeffs() - (2.0 * u).coeffs()).cwiseAbs().maxCoeff() < 1e-15);
  const std::vector<Field> mixed{restrict_to(u, 2), u};
  const Field m = cesaro_mean(mixed);
  CHECK(m.cutoff() == 4);
  CHECK((m.coeffs() - (0.5 * (zero_pad_embed(restrict_to(u, 2), 4) + u)).coeffs()).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK_THROWS_AS(cesaro_mean(pair, false), ContractError);
}

TEST_CASE("L1 distance") {
  const Field tg = taylor_green(2);
  CHECK(l1_distance(tg, tg) == 0.0);

  // |u| of 2-D Taylor-Green in closed form on a grid 16x finer per axis
  const double l1 = l1_distance(Field(tg.lattice_ptr()), tg);
  const int fine = 16 * 256;
  double acc = 0;
  for (int i = 0; i < fine; ++i) {
    const double x = 2 * M_PI * i / fine;
    for (int j = 0; j < fine; ++j) {
      const double y = 2 * M_PI * j / fine;
      acc += std::hypot(std::cos(x) * std::sin(y), std::sin(x) * std::cos(y));
    }
  }
  const double reference = acc / (double(fine) * fine);
  CHECK(std::abs(l1 - reference) <= 1e-6 * reference);

  auto lat = make_lattice(2, 5);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Field a = oracle::random_divfree(lat, 3 * s, 1.0);
    const Field b = oracle::random_divfree(lat, 3 * s + 1, 1.0);
    const Field c = oracle::random_divfree(lat, 3 * s + 2, 1.0);
    CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
    CHECK(l1_distance(a, b) == doctest::Approx(l1_distance(b, a)).epsilon(1e-14));
  }
}

TEST_CASE("Cesaro experiment on a steady state has vanishing gaps") {
  EnsembleConfig e = ensemble_config(2);
  e.ladder = {4, 8, 12};
  e.probes.clear();
  const auto r = cesaro_experiment(e, base_config(), ResolutionLaw{}, NoiseModel::zero(), taylor_green(2),
                                   {0.2, 0.4});
  REQUIRE(r.gaps.size() == 2);
  for (const auto& row : r.gaps) {
    REQUIRE(row.size() == 2);
    for (double g : row) CHECK(g < 1e-12);
  }
  e.coupled = false;
  CHECK_THROWS_AS(cesaro_experiment(e, base_config(), ResolutionLaw{}, NoiseModel::zero(),
                                    taylor_green(2)),
                  ContractError);
}

TEST_CASE("weak-strong experiment") {
  EnsembleConfig e = ensemble_config(2);
  e.probes.clear();
  WeakStrongConfig ws;
  ws.reference_n = 16;
  ws.sample_stride = 5;

  e.ladder = {16};
  const auto self = weak_strong_experiment(e, ws, base_config(), ResolutionLaw{},
                                           NoiseModel::linear(NoiseModel::alpha_law(2, 0.2, 1.0)),
                                           taylor_green(2));
  for (double d : self.levels[0].l1) CHECK(d == 0.0);

  ws.reference_n = 32;
  e.ladder = {4, 8};
  const auto tg = weak_strong_experiment(e, ws, base_config(), ResolutionLaw{}, NoiseModel::zero(),
                                         taylor_green(2));
  REQUIRE(tg.times.size() == 5);
  for (const auto& level : tg.levels) {
    for (double d : level.l1) CHECK(d <= 1e-10);
    for (double d : level.l2) CHECK(d <= 1e-10);
  }
  CHECK(tg.gronwall_pass);
  CHECK(tg.gradient_sup == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // shear with small linear noise: the finer level is closer to the reference
  const Field shear = shear_flow(2, 0.1);
  const auto sh = weak_strong_experiment(e, ws, base_config(), ResolutionLaw{},
                                         NoiseModel::linear(NoiseModel::alpha_law(2, 0.1, 1.0)),
                                         zero_pad_embed(shear, 12) + 0.2 * make_initial_field(
                                             {"random_divfree", 1.0, 0, 5, 12, 3.0, ""}, 2));
  CHECK(sh.levels[1].l1.back() < sh.levels[0].l1.back());
  CHECK(sh.levels[1].l1_integrated < sh.levels[0].l1_integrated);

  e.ladder = {8, 16};
  CHECK_THROWS_AS(weak_strong_experiment(e, ws, base_config(), ResolutionLaw{}, NoiseModel::zero(),
                                         taylor_green(2)),
                  ConfigError);
}
