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

#include "svm/ensemble.hpp"

#include "svm/diagnostics.hpp"
#include "svm/operators.hpp"
#include "svm/transform.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

namespace svm {

namespace {

constexpr double kTwoPi = 2 * EIGEN_PI;

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception (by index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, std::max(count, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Eigen::Index step_of(double t, double dt) { return static_cast<Eigen::Index>(std::llround(t / dt)); }

// Records u at selected step indices.
class SampleObserver : public RunObserver {
 public:
  explicit SampleObserver(std::vector<Eigen::Index> steps) : steps_(std::move(steps)) {
    fields_.resize(steps_.size());
  }
  void on_start(const SolverState& s) override { record(s); }
  void on_step(const SolverState& s, const StepIncrements&) override { record(s); }
  const std::vector<Field>& fields() const { return fields_; }

 private:
  void record(const SolverState& s) {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      if (steps_[i] == s.step_index) fields_[i] = s.u;
    }
  }
  std::vector<Eigen::Index> steps_;
  std::vector<Field> fields_;
};

class ProbeObserver : public RunObserver {
 public:
  ProbeObserver(const std::vector<Probe>& probes, double dt, int dim)
      : probes_(probes), values_(Eigen::MatrixXd::Zero(Eigen::Index(probes.size()), dim)) {
    for (const auto& p : probes) steps_.push_back(step_of(p.t, dt));
  }
  void on_start(const SolverState& s) override { record(s); }
  void on_step(const SolverState& s, const StepIncrements&) override { record(s); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  void record(const SolverState& s) {
    for (std::size_t i = 0; i < probes_.size(); ++i) {
      if (steps_[i] == s.step_index) values_.row(Eigen::Index(i)) = evaluate_at(s.u, probes_[i].x).transpose();
    }
  }
  const std::vector<Probe>& probes_;
  std::vector<Eigen::Index> steps_;
  Eigen::MatrixXd values_;
};

bool is_member_failure(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const NumericalAbort&) {
    return true;
  } catch (const StepError&) {
    return true;
  } catch (...) {
    return false;
  }
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

void check_failures(int failures, int members, const std::string& what) {
  if (failures * 10 > members) {
    throw ExperimentError(what + ": " + std::to_string(failures) + " of " + std::to_string(members) +
                          " members failed (more than 10%)");
  }
}

Field pairwise_sum(std::span<const Field> f) {
  if (f.size() == 1) return f[0];
  const std::size_t half = f.size() / 2;
  return pairwise_sum(f.first(half)) + pairwise_sum(f.subspan(half));
}

std::vector<Eigen::Index> sample_steps(Eigen::Index total, int stride) {
  std::vector<Eigen::Index> steps;
  for (Eigen::Index s = 0; s < total; s += stride) steps.push_back(s);
  steps.push_back(total);
  return steps;
}

}  // namespace

std::vector<std::uint64_t> EnsembleConfig::member_seeds() const {
  std::mt19937_64 gen(master_seed);
  std::vector<std::uint64_t> seeds(std::max(members, 0));
  for (auto& s : seeds) s = gen();
  return seeds;
}

void EnsembleConfig::validate(const SchemeConfig& scheme) const {
  if (members < 1) throw ConfigError("ensemble needs at least one member");
  if (histogram_bins < 1) throw ConfigError("histogram_bins must be positive");
  if (threads < 1) throw ConfigError("threads must be positive");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1 || (i > 0 && ladder[i] <= ladder[i - 1])) {
      throw ConfigError("ladder cutoffs must be positive and strictly increasing");
    }
  }
  for (const auto& p : probes) {
    if (p.x.size() != scheme.dim) throw ConfigError("probe point has wrong dimension");
    if (p.t < 0 || p.t > scheme.T * (1 + 1e-12)) throw ConfigError("probe time outside [0, T]");
    if ((p.x.array() < 0).any() || (p.x.array() >= kTwoPi).any()) {
      throw ConfigError("probe point outside [0, 2 pi)");
    }
  }
}

SchemeConfig ResolutionLaw::at(const SchemeConfig& base, int n) const {
  SchemeConfig cfg = base;
  cfg.n = n;
  cfg.grid = 0;
  cfg.eps = eps ? *eps : SchemeConfig::viscosity_law(n, eps_c, eps_theta);
  cfg.m = m ? *m : SchemeConfig::default_threshold(n);
  return cfg;
}

double YoungMeasureHistogram::mean(int c) const {
  const auto n = counts.at(c).cast<double>();
  return n.dot(bin_means.at(c)) / n.sum();
}

double YoungMeasureHistogram::variance(int c) const {
  const auto n = counts.at(c).cast<double>().array();
  const double mu = mean(c);
  const double m2 = (bin_m2.at(c).array() + n * (bin_means.at(c).array() - mu).square()).sum();
  return m2 / (n.sum() - 1);
}

YoungMeasureHistogram empirical_young_measure(const Eigen::MatrixXd& samples, int bins, int probe) {
  if (samples.rows() < 2) throw ContractError("empirical_young_measure needs at least 2 samples");
  if (bins < 1) throw ConfigError("histogram bins must be positive");
  YoungMeasureHistogram h;
  h.probe = probe;
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    std::vector<double> v(samples.col(c).data(), samples.col(c).data() + samples.rows());
    std::sort(v.begin(), v.end());
    const auto distinct = std::unique(v.begin(), v.end()) - v.begin();
    const int B = static_cast<int>(std::min<std::ptrdiff_t>(bins, distinct));
    const double lo = v.front();
    const double hi = *std::max_element(v.begin(), v.begin() + distinct);
    Eigen::VectorXd edges(B + 1);
    if (B == 1) {
      edges << lo, hi;
    } else {
      edges = Eigen::VectorXd::LinSpaced(B + 1, lo, hi);
    }
    Eigen::VectorXi count = Eigen::VectorXi::Zero(B);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(B);
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(B);
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
      const double x = samples(r, c);
      int b = B == 1 ? 0 : static_cast<int>(std::floor((x - lo) / (hi - lo) * B));
      b = std::clamp(b, 0, B - 1);
      // Welford update
      ++count(b);
      const double delta = x - mean(b);
      mean(b) += delta / count(b);
      m2(b) += delta * (x - mean(b));
    }
    h.edges.push_back(std::move(edges));
    h.counts.push_back(std::move(count));
    h.bin_means.push_back(std::move(mean));
    h.bin_m2.push_back(std::move(m2));
  }
  return h;
}

double wasserstein1_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("wasserstein1_1d: empty sample set");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t na = x.size();
  const std::size_t nb = y.size();
  if (na == nb) {
    double acc = 0;
    for (std::size_t i = 0; i < na; ++i) acc += std::abs(x[i] - y[i]);
    return acc / static_cast<double>(na);
  }
  // Quantile functions are step functions with jumps at i/na and j/nb.
  double acc = 0;
  double s = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < na && j < nb) {
    const std::size_t lhs = (i + 1) * nb;
    const std::size_t rhs = (j + 1) * na;
    const double next = lhs <= rhs ? double(i + 1) / double(na) : double(j + 1) / double(nb);
    acc += (next - s) * std::abs(x[i] - y[j]);
    s = next;
    if (lhs <= rhs) ++i;
    if (rhs <= lhs) ++j;
  }
  return acc;
}

double l1_distance(const Field& a, const Field& b, int grid) {
  if (a.dim() != b.dim() || a.components() != b.components()) {
    throw ContractError("l1_distance: fields have different shapes");
  }
  const int cutoff = std::max(a.cutoff(), b.cutoff());
  if (grid == 0) {
    grid = FourierLattice::smooth_size(std::max(4 * cutoff + 2, a.dim() == 2 ? 512 : 64));
  }
  auto lat = make_lattice(a.dim(), cutoff, grid);
  const Field diff = (zero_pad_embed(a, cutoff) - zero_pad_embed(b, cutoff)).on_lattice(lat);
  return inverse_transform(diff).values().rowwise().norm().mean();
}

Field pairwise_mean(std::span<const Field> fields) {
  if (fields.empty()) throw ContractError("mean of an empty set of fields");
  int cutoff = 0;
  for (const auto& f : fields) cutoff = std::max(cutoff, f.cutoff());
  std::vector<Field> padded;
  padded.reserve(fields.size());
  for (const auto& f : fields) padded.push_back(zero_pad_embed(f, cutoff));
  return (1.0 / static_cast<double>(fields.size())) * pairwise_sum(padded);
}

Field cesaro_mean(std::span<const Field> fields, bool coupled) {
  if (!coupled) {
    throw ContractError("cesaro_mean: ladder trajectories must share one Wiener path (coupled)");
  }
  return pairwise_mean(fields);
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg, const SchemeConfig& scheme_cfg,
                            const NoiseModel& noise, const Field& u0) {
  cfg.validate(scheme_cfg);
  const SvmScheme scheme(scheme_cfg, noise);
  const SolverState start = scheme.initial_state(u0);
  const auto seeds = cfg.member_seeds();

  EnsembleResult result;
  result.members.resize(cfg.members);
  parallel_for(cfg.members, cfg.threads, [&](int j) {
    MemberResult& member = result.members[j];
    member.seed = seeds[j];
    ProbeObserver probes(cfg.probes, scheme_cfg.dt, scheme_cfg.dim);
    RunObserver* observers[] = {&probes};
    try {
      RunResult r = run(scheme, path_for(scheme, seeds[j]), start, observers);
      member.ledger = std::move(r.ledger);
      member.final_u = std::move(r.final_state.u);
      member.probe_values = probes.values();
      member.ok = true;
    } catch (...) {
      const auto e = std::current_exception();
      if (!is_member_failure(e)) throw;
      member.error = describe(e);
    }
  });

  std::vector<Field> finals;
  std::vector<const MemberResult*> ok;
  for (std::size_t j = 0; j < result.members.size(); ++j) {
    const auto& m = result.members[j];
    if (m.ok) {
      ok.push_back(&m);
      finals.push_back(m.final_u);
    } else {
      ++result.failures;
      result.warnings.push_back("member " + std::to_string(j) + " (seed " + std::to_string(m.seed) +
                                ") excluded: " + m.error);
    }
  }
  check_failures(result.failures, cfg.members, "ensemble");
  result.mean_final = pairwise_mean(finals);

  for (std::size_t p = 0; p < cfg.probes.size(); ++p) {
    Eigen::MatrixXd samples(Eigen::Index(ok.size()), scheme_cfg.dim);
    for (std::size_t j = 0; j < ok.size(); ++j) {
      samples.row(Eigen::Index(j)) = ok[j]->probe_values.row(Eigen::Index(p));
    }
    ProbeStats stats;
    stats.mean = samples.colwise().mean().transpose();
    if (samples.rows() >= 2) {
      stats.variance = ((samples.rowwise() - stats.mean.transpose()).array().square().colwise().sum() /
                        double(samples.rows() - 1))
                           .transpose();
      stats.histogram = empirical_young_measure(samples, cfg.histogram_bins, int(p));
    } else {
      stats.variance = Eigen::VectorXd::Zero(scheme_cfg.dim);
    }
    result.probes.push_back(std::move(stats));
  }
  return result;
}

CesaroReport cesaro_experiment(const EnsembleConfig& cfg, const SchemeConfig& base,
                               const ResolutionLaw& law, const NoiseModel& noise, const Field& u0,
                               std::vector<double> times) {
  cfg.validate(base);
  if (!cfg.coupled) {
    throw ContractError("Cesaro experiment requires coupled ladder trajectories");
  }
  if (cfg.ladder.size() < 2) throw ConfigError("Cesaro experiment needs at least two ladder levels");
  if (times.empty()) times.push_back(base.T);

  std::vector<SvmScheme> schemes;
  for (int n : cfg.ladder) schemes.emplace_back(law.at(base, n), noise);
  std::vector<Eigen::Index> steps;
  for (double t : times) {
    if (t < 0 || t > base.T * (1 + 1e-12)) throw ConfigError("Cesaro sample time outside [0, T]");
    steps.push_back(step_of(t, base.dt));
  }

  const auto seeds = cfg.member_seeds();
  const std::size_t L = cfg.ladder.size();
  std::vector<std::vector<std::vector<double>>> gaps(cfg.members);
  std::vector<std::string> errors(cfg.members);

  parallel_for(cfg.members, cfg.threads, [&](int j) {
    const WienerPath path(seeds[j], noise.modes(), base.dt, base.T);
    std::vector<std::vector<Field>> fields(times.size());  // [t][level]
    try {
      for (const auto& scheme : schemes) {
        SampleObserver obs(steps);
        RunObserver* list[] = {&obs};
        run(scheme, path, scheme.initial_state(u0), list);
        for (std::size_t t = 0; t < times.size(); ++t) fields[t].push_back(obs.fields()[t]);
      }
    } catch (...) {
      const auto e = std::current_exception();
      if (!is_member_failure(e)) throw;
      errors[j] = describe(e);
      return;
    }
    for (std::size_t t = 0; t < times.size(); ++t) {
      std::vector<double> g;
      Field prev = cesaro_mean(std::span<const Field>(fields[t]).first(1), true);
      for (std::size_t N = 2; N <= L; ++N) {
        Field next = cesaro_mean(std::span<const Field>(fields[t]).first(N), true);
        g.push_back(l1_distance(next, prev));
        prev = std::move(next);
      }
      gaps[j].push_back(std::move(g));
    }
  });

  CesaroReport report;
  report.ladder = cfg.ladder;
  report.times = times;
  report.gaps.assign(times.size(), std::vector<double>(L - 1, 0.0));
  int ok = 0;
  for (int j = 0; j < cfg.members; ++j) {
    if (!errors[j].empty()) {
      ++report.failures;
      continue;
    }
    ++ok;
    for (std::size_t t = 0; t < times.size(); ++t) {
      for (std::size_t k = 0; k + 1 < L; ++k) report.gaps[t][k] += gaps[j][t][k];
    }
    report.member_gaps.push_back(gaps[j]);
  }
  check_failures(report.failures, cfg.members, "Cesaro experiment");
  for (auto& row : report.gaps) {
    for (auto& g : row) g /= ok;
  }
  const auto& last = report.gaps.back();
  report.monotone = true;
  for (std::size_t k = 0; k + 1 < last.size(); ++k) {
    if (!(last[k + 1] < last[k])) report.monotone = false;
  }
  return report;
}

WeakStrongReport weak_strong_experiment(const EnsembleConfig& cfg, const WeakStrongConfig& ws,
                                        const SchemeConfig& base, const ResolutionLaw& law,
                                        const NoiseModel& noise, const Field& u0) {
  cfg.validate(base);
  if (cfg.ladder.empty()) throw ConfigError("weak-strong experiment needs a ladder");
  if (ws.ref_dt_factor < 4) throw ConfigError("reference dt must be at most dt/4 (ref_dt_factor >= 4)");
  if (ws.sample_stride < 1) throw ConfigError("sample_stride must be positive");
  for (int n : cfg.ladder) {
    if (n != ws.reference_n && 4 * n > ws.reference_n) {
      throw ConfigError("reference cutoff " + std::to_string(ws.reference_n) +
                        " must be at least 4x every ladder cutoff (got " + std::to_string(n) + ")");
    }
  }

  SchemeConfig ref_cfg = law.at(base, ws.reference_n);
  ref_cfg.dt = base.dt / ws.ref_dt_factor;
  const SvmScheme reference(ref_cfg, noise);
  std::vector<std::optional<SvmScheme>> levels;
  for (int n : cfg.ladder) {
    if (n == ws.reference_n) {
      levels.emplace_back();
    } else {
      levels.emplace_back(SvmScheme(law.at(base, n), noise));
    }
  }

  const Eigen::Index total = step_count(base.T, base.dt);
  const auto coarse = sample_steps(total, ws.sample_stride);
  std::vector<Eigen::Index> fine;
  for (auto s : coarse) fine.push_back(s * ws.ref_dt_factor);
  const std::size_t S = coarse.size();
  const std::size_t L = cfg.ladder.size();

  struct MemberData {
    bool ok = false;
    std::string error;
    std::vector<std::vector<Field>> level_fields;  // [level][sample]
    std::vector<std::vector<double>> l1, l2, rel;  // [level][sample]
    double grad_sup = 0;
  };
  const auto seeds = cfg.member_seeds();
  std::vector<MemberData> data(cfg.members);

  parallel_for(cfg.members, cfg.threads, [&](int j) {
    MemberData& d = data[j];
    const WienerPath path(seeds[j], noise.modes(), ref_cfg.dt, base.T);
    SampleObserver ref_obs(fine);
    {
      RunObserver* list[] = {&ref_obs};
      try {
        run(reference, path, reference.initial_state(u0), list);
      } catch (const Error& e) {
        throw ExperimentError("reference run failed for member " + std::to_string(j) + ": " + e.what());
      }
    }
    const auto& U = ref_obs.fields();
    for (const auto& f : U) d.grad_sup = std::max(d.grad_sup, gradient_sup_norm(f));
    try {
      for (std::size_t l = 0; l < L; ++l) {
        std::vector<Field> samples;
        if (levels[l]) {
          SampleObserver obs(coarse);
          RunObserver* list[] = {&obs};
          run(*levels[l], path, levels[l]->initial_state(u0), list);
          samples = obs.fields();
        } else {
          samples = U;
        }
        std::vector<double> l1, l2, rel;
        for (std::size_t s = 0; s < S; ++s) {
          const Field diff = zero_pad_embed(samples[s], ws.reference_n) - U[s];
          l1.push_back(l1_distance(samples[s], U[s]));
          l2.push_back(l2_norm(diff));
          rel.push_back(energy(diff));
        }
        d.l1.push_back(std::move(l1));
        d.l2.push_back(std::move(l2));
        d.rel.push_back(std::move(rel));
        d.level_fields.push_back(std::move(samples));
      }
      d.ok = true;
    } catch (...) {
      const auto e = std::current_exception();
      if (!is_member_failure(e)) throw;
      d.error = describe(e);
    }
  });

  WeakStrongReport report;
  for (auto s : coarse) report.times.push_back(static_cast<double>(s) * base.dt);
  std::vector<const MemberData*> ok;
  for (const auto& d : data) {
    report.gradient_sup = std::max(report.gradient_sup, d.grad_sup);
    if (d.ok) {
      ok.push_back(&d);
    } else {
      ++report.failures;
    }
  }
  check_failures(report.failures, cfg.members, "weak-strong experiment");
  report.rate = gronwall_rate(report.gradient_sup, noise.D1());
  const double floor = 1e-24 * std::max(energy(u0), 1e-300);

  report.gronwall_pass = true;
  for (std::size_t l = 0; l < L; ++l) {
    WeakStrongLevel level;
    level.n = cfg.ladder[l];
    for (std::size_t s = 0; s < S; ++s) {
      double l1 = 0, l2 = 0, rel = 0;
      std::vector<Field> members;
      for (const auto* d : ok) {
        l1 += d->l1[l][s];
        l2 += d->l2[l][s];
        rel += d->rel[l][s];
        members.push_back(d->level_fields[l][s]);
      }
      const double M = static_cast<double>(ok.size());
      level.l1.push_back(l1 / M);
      level.l2.push_back(l2 / M);
      level.relative_energy.push_back(rel / M);
      level.h_surrogate.push_back(relative_energy(members, Field(members[0].lattice_ptr())).h_surrogate);
    }
    for (std::size_t s = 0; s + 1 < S; ++s) {
      level.l1_integrated +=
          0.5 * (report.times[s + 1] - report.times[s]) * (level.l1[s] + level.l1[s + 1]);
    }
    level.gronwall = gronwall_envelope(report.times, level.relative_energy, report.rate,
                                       ws.gronwall_slack, floor);
    report.gronwall_pass = report.gronwall_pass && level.gronwall.pass;
    report.levels.push_back(std::move(level));
  }
  int non_monotone = 0;
  for (std::size_t l = 0; l + 1 < L; ++l) {
    if (report.levels[l + 1].l1_integrated > report.levels[l].l1_integrated) ++non_monotone;
  }
  report.monotone = non_monotone <= ws.allowed_non_monotone;
  report.pass = report.monotone && report.gronwall_pass;
  return report;
}

}  // namespace svm
