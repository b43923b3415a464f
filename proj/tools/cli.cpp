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

#include "cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include "svm/config.hpp"
#include "svm/csv.hpp"
#include "svm/diagnostics.hpp"
#include "svm/ensemble.hpp"
#include "svm/initial_conditions.hpp"
#include "svm/operators.hpp"
#include "svm/runtime.hpp"
#include "svm/snapshot.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace svm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  int threads = 0;
  bool dry_run = false;
  bool resume = false;
  long long stop_after = -1;
};

struct Check {
  std::string name;
  bool pass = false;
  double value = 0;
  double threshold = 0;
};

struct Report {
  std::vector<Check> checks;
  json summary = json::object();
  std::vector<std::string> warnings;

  void check(std::string name, bool pass, double value, double threshold) {
    checks.push_back(Check{std::move(name), pass, value, threshold});
  }
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

std::string manifest_line(const std::string& command, const Options& o, const RunConfig& cfg) {
  std::ostringstream s;
  s << "svm " << command << " --config " << o.config;
  for (const auto& kv : o.sets) s << " --set " << kv;
  s << " --out " << cfg.output.dir << " --threads " << cfg.output.threads;
  if (o.resume) s << " --resume";
  if (o.stop_after >= 0) s << " --stop-after " << o.stop_after;
  s << "  # config_hash=" << hash_hex(config_hash(cfg));
  return s.str();
}

RunConfig resolve(const Options& o) {
  RunConfig cfg = load_config(o.config, o.sets);
  if (!o.out.empty()) {
    cfg.output.dir = o.out;
  } else if (const char* env = std::getenv("SVM_OUTPUT_DIR"); env && *env) {
    cfg.output.dir = env;
  }
  if (o.threads > 0) {
    cfg.output.threads = o.threads;
  } else if (const char* env = std::getenv("SVM_THREADS"); env && *env) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (*end != '\0' || t < 1 || t > 4096) {
      throw ConfigError(std::string("SVM_THREADS must be a positive integer (got '") + env + "')");
    }
    cfg.output.threads = int(t);
  }
  return cfg;
}

void write_result(const fs::path& out, const std::string& command, const RunConfig& cfg,
                  const Report& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)},
                      {"threshold", number(c.threshold)}});
  }
  json result = {{"command", command},
                 {"config_hash", hash_hex(config_hash(cfg))},
                 {"pass", report.pass()},
                 {"checks", checks},
                 {"summary", report.summary},
                 {"warnings", report.warnings}};
  fs::create_directories(out);
  write_text_file(out / "result.json", result.dump(2) + "\n");
}

int finish(std::ostream& out, const fs::path& dir, const std::string& command, const RunConfig& cfg,
           const Report& report) {
  write_result(dir, command, cfg, report);
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value)
        << " threshold=" << format_double(c.threshold) << "\n";
  }
  out << (report.pass() ? "result: pass" : "result: FAIL") << " (" << (dir / "result.json").string() << ")\n";
  return report.pass() ? kOk : kChecksFailed;
}

double max_abs_residual(const EnergyLedger& ledger) {
  double worst = 0;
  for (double r : energy_balance_residual(ledger)) worst = std::max(worst, std::abs(r));
  return worst;
}

json ledger_summary(const EnergyLedger& ledger) {
  return {{"t", ledger.back().t},
          {"energy_initial", ledger.front().energy},
          {"energy_final", ledger.back().energy},
          {"max_abs_residual", max_abs_residual(ledger)}};
}

void write_manifest(const fs::path& dir, const std::string& line) {
  fs::create_directories(dir);
  write_text_file(dir / "manifest.txt", line + "\n");
}

// --- subcommands -------------------------------------------------------------

int cmd_run(const Options& o, const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.output.dir;
  const RunOutcome r = execute_run(cfg, dir, o.resume, o.stop_after);
  for (const auto& n : r.notices) out << "notice: " << n << "\n";
  if (r.already_complete) return kOk;

  Report report;
  std::int64_t target = SvmScheme(cfg.scheme_config(), cfg.noise_model()).total_steps();
  if (o.stop_after >= 0) target = std::min<std::int64_t>(target, o.stop_after);
  report.check("reached_target_step", r.state.step_index >= target, double(r.state.step_index), double(target));
  report.summary = ledger_summary(r.ledger);
  report.summary["steps"] = r.state.step_index;
  report.summary["completed"] = r.completed;
  return finish(out, dir, "run", cfg, report);
}

int cmd_verify_energy(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.output.dir;
  const Field u0 = initial_field(cfg);
  const NoiseModel noise = cfg.noise_model();
  Report report;

  auto run_at = [&](double dt) {
    SchemeConfig sc = cfg.scheme_config();
    sc.dt = dt;
    const SvmScheme scheme(sc, noise);
    return run(scheme, path_for(scheme, cfg.path_seed()), scheme.initial_state(u0)).ledger;
  };

  if (cfg.verify.dts.empty()) {
    const EnergyLedger ledger = run_at(cfg.dt);
    const double worst = max_abs_residual(ledger);
    report.check("energy_balance_residual", worst <= cfg.verify.tolerance, worst, cfg.verify.tolerance);
    report.summary = ledger_summary(ledger);
    fs::create_directories(dir);
    std::ostringstream csv;
    write_ledger_csv(csv, ledger, cfg.observers.energy_stride);
    write_text_file(dir / "ledger.csv", csv.str());
  } else {
    std::vector<double> residuals;
    std::ostringstream text;
    CsvWriter csv(text, {"dt", "max_abs_residual"});
    for (double dt : cfg.verify.dts) {
      residuals.push_back(max_abs_residual(run_at(dt)));
      csv.cell(dt).cell(residuals.back());
      csv.end_row();
    }
    const auto orders = observed_orders(residuals);
    double min_order = INFINITY;
    for (double q : orders) min_order = std::min(min_order, q);
    if (orders.empty()) throw ConfigError("verify.dts needs at least two step sizes");
    report.check("energy_residual_order", min_order >= cfg.verify.min_order, min_order, cfg.verify.min_order);
    report.summary = {{"dts", cfg.verify.dts}, {"residuals", residuals}, {"orders", orders}};
    fs::create_directories(dir);
    write_text_file(dir / "residual_order.csv", text.str());
  }
  return finish(out, dir, "verify-energy", cfg, report);
}

int cmd_ensemble(const std::string& manifest, const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.output.dir;
  write_manifest(dir, manifest);
  write_text_file(dir / "config.json", serialize_config(cfg, false));
  const SchemeConfig sc = cfg.scheme_config();
  const NoiseModel noise = cfg.noise_model();
  const EnsembleResult res = run_ensemble(cfg.ensemble_config(), sc, noise, initial_field(cfg));

  Report report;
  report.warnings = res.warnings;
  const int M = cfg.ensemble.members;
  report.check("member_failures", res.failures * 10 <= M, res.failures, 0.1 * M);

  fs::create_directories(dir / "members");
  std::vector<const MemberResult*> ok;
  for (std::size_t j = 0; j < res.members.size(); ++j) {
    const auto& m = res.members[j];
    if (!m.ok) continue;
    ok.push_back(&m);
    char name[32];
    std::snprintf(name, sizeof(name), "member_%05zu.csv", j);
    std::ostringstream text;
    write_ledger_csv(text, m.ledger, cfg.observers.energy_stride);
    write_text_file(dir / "members" / name, text.str());
  }

  // Mean energy and its standard error on the ledger rows.
  std::ostringstream energy_text;
  CsvWriter energy_csv(energy_text, {"t", "mean_E", "stderr_E"});
  double mean_final = 0, se_final = 0;
  if (!ok.empty()) {
    const std::size_t rows = ok.front()->ledger.rows.size();
    for (std::size_t i = 0; i < rows; ++i) {
      const bool last = i + 1 == rows;
      if (i % std::size_t(cfg.observers.energy_stride) != 0 && !last) continue;
      double sum = 0, sum2 = 0;
      for (const auto* m : ok) sum += m->ledger.rows[i].energy;
      const double mean = sum / double(ok.size());
      for (const auto* m : ok) sum2 += std::pow(m->ledger.rows[i].energy - mean, 2);
      const double se = ok.size() > 1 ? std::sqrt(sum2 / double(ok.size() - 1) / double(ok.size())) : 0.0;
      energy_csv.cell(ok.front()->ledger.rows[i].t).cell(mean).cell(se);
      energy_csv.end_row();
      if (last) {
        mean_final = mean;
        se_final = se;
      }
    }
  }
  write_text_file(dir / "energy.csv", energy_text.str());

  const double E0 = ok.empty() ? 0.0 : ok.front()->ledger.front().energy;
  const double s2 = noise.alphas().squaredNorm();
  bool inviscid = true;
  for (const auto* m : ok) inviscid = inviscid && m->ledger.back().viscous_cumulative <= 1e-12 * E0;
  if (noise.family() == NoiseFamily::linear && inviscid && ok.size() > 1) {
    // Energy-conserving drift under linear noise: E[E(T)] = E(0) exp(sum alpha^2 T).
    const double expected = E0 * std::exp(s2 * cfg.T);
    const double z = se_final > 0 ? std::abs(mean_final - expected) / se_final : 0.0;
    report.check("ito_growth_law_zscore", z <= 3.0, z, 3.0);
    report.summary["ito_growth_expected"] = expected;
  }
  if (noise.family() == NoiseFamily::linear && ok.size() > 1) {
    std::vector<std::vector<EnergyLedger>> single(1);
    for (const auto* m : ok) single[0].push_back(m->ledger);
    single.push_back(single[0]);
    const double moment = apriori_check(single, 2.0).moments[0];
    const double envelope = apriori_envelope(std::sqrt(2 * E0), 2.0, s2, cfg.T);
    report.check("apriori_second_moment", moment <= envelope, moment, envelope);
  }

  std::ostringstream stats_text, hist_text;
  CsvWriter stats(stats_text, {"probe", "t", "component", "mean", "variance"});
  CsvWriter hist(hist_text, {"probe", "component", "bin", "lo", "hi", "count", "bin_mean"});
  for (std::size_t p = 0; p < res.probes.size(); ++p) {
    const auto& ps = res.probes[p];
    for (Eigen::Index c = 0; c < ps.mean.size(); ++c) {
      stats.cell((long long)p).cell(cfg.observers.probes[p].t).cell((long long)c);
      stats.cell(ps.mean(c)).cell(ps.variance(c));
      stats.end_row();
    }
    const auto& h = ps.histogram;
    for (int c = 0; c < h.components(); ++c) {
      for (Eigen::Index b = 0; b < h.counts[c].size(); ++b) {
        hist.cell((long long)p).cell((long long)c).cell((long long)b);
        hist.cell(h.edges[c](b)).cell(h.edges[c](b + 1)).cell((long long)h.counts[c](b)).cell(h.bin_means[c](b));
        hist.end_row();
      }
    }
  }
  write_text_file(dir / "stats.csv", stats_text.str());
  write_text_file(dir / "histograms.csv", hist_text.str());
  write_snapshot((dir / "mean_final.svmf").string(), res.mean_final, cfg.T);

  report.summary = {{"members", M}, {"failures", res.failures}, {"mean_energy_final", mean_final},
                    {"stderr_energy_final", se_final}, {"energy_initial", E0}, {"sum_alpha_sq", s2}};
  return finish(out, dir, "ensemble", cfg, report);
}

int cmd_converge(const std::string& manifest, const RunConfig& cfg, std::ostream& out) {
  if (cfg.ensemble.ladder.size() < 3) throw ConfigError("converge needs ensemble.ladder with >= 3 levels");
  const fs::path dir = cfg.output.dir;
  write_manifest(dir, manifest);
  write_text_file(dir / "config.json", serialize_config(cfg, false));
  SchemeConfig base = cfg.scheme_config();
  const CesaroReport rep = cesaro_experiment(cfg.ensemble_config(), base, cfg.law(), cfg.noise_model(),
                                             initial_field(cfg), cfg.ensemble.times);
  std::ostringstream text;
  CsvWriter csv(text, {"t", "N", "n_from", "n_to", "l1_gap"});
  for (std::size_t t = 0; t < rep.times.size(); ++t) {
    for (std::size_t k = 0; k < rep.gaps[t].size(); ++k) {
      csv.cell(rep.times[t]).cell((long long)(k + 1)).cell((long long)rep.ladder[k]).cell((long long)rep.ladder[k + 1]);
      csv.cell(rep.gaps[t][k]);
      csv.end_row();
    }
  }
  write_text_file(dir / "cesaro.csv", text.str());

  Report report;
  const auto& g = rep.gaps.back();
  double worst_ratio = 0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) worst_ratio = std::max(worst_ratio, g[k + 1] / g[k]);
  report.check("cesaro_gaps_decreasing", rep.monotone, worst_ratio, 1.0);
  report.summary = {{"ladder", rep.ladder}, {"times", rep.times}, {"final_gaps", g}, {"failures", rep.failures}};
  return finish(out, dir, "converge", cfg, report);
}

int cmd_relative_energy(const std::string& manifest, const RunConfig& cfg, std::ostream& out) {
  if (cfg.ensemble.ladder.size() < 2) throw ConfigError("relative-energy needs ensemble.ladder with >= 2 levels");
  const fs::path dir = cfg.output.dir;
  write_manifest(dir, manifest);
  write_text_file(dir / "config.json", serialize_config(cfg, false));
  const WeakStrongConfig ws = cfg.weak_strong_config();
  const WeakStrongReport rep = weak_strong_experiment(cfg.ensemble_config(), ws, cfg.scheme_config(), cfg.law(),
                                                      cfg.noise_model(), initial_field(cfg));
  std::ostringstream text;
  CsvWriter csv(text, {"n", "t", "l1", "l2", "relative_energy", "h_surrogate", "gronwall_envelope"});
  json levels = json::array();
  for (const auto& lv : rep.levels) {
    for (std::size_t t = 0; t < rep.times.size(); ++t) {
      csv.cell((long long)lv.n).cell(rep.times[t]).cell(lv.l1[t]).cell(lv.l2[t]);
      csv.cell(lv.relative_energy[t]).cell(lv.h_surrogate[t]).cell(lv.gronwall.envelope[t]);
      csv.end_row();
    }
    levels.push_back({{"n", lv.n}, {"l1_integrated", lv.l1_integrated}, {"l1_final", lv.l1.back()},
                      {"gronwall_pass", lv.gronwall.pass}, {"gronwall_worst_ratio", number(lv.gronwall.worst_ratio)}});
  }
  write_text_file(dir / "weak_strong.csv", text.str());

  Report report;
  double worst_ratio = 0, worst_gronwall = 0;
  for (std::size_t k = 0; k + 1 < rep.levels.size(); ++k) {
    worst_ratio = std::max(worst_ratio, rep.levels[k + 1].l1_integrated / rep.levels[k].l1_integrated);
  }
  for (const auto& lv : rep.levels) worst_gronwall = std::max(worst_gronwall, lv.gronwall.worst_ratio);
  report.check("l1_error_decreasing", rep.monotone, worst_ratio, 1.0);
  report.check("gronwall_envelope", rep.gronwall_pass, worst_gronwall, 1.0 + ws.gronwall_slack);
  report.summary = {{"reference_n", ws.reference_n}, {"ref_dt", cfg.dt / ws.ref_dt_factor},
                    {"gradient_sup", rep.gradient_sup}, {"rate", rep.rate}, {"levels", levels},
                    {"failures", rep.failures}};
  return finish(out, dir, "relative-energy", cfg, report);
}

int cmd_consistency(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.output.dir;
  const auto& c = cfg.consistency;
  const Field phi = random_divergence_free(cfg.dim, c.phi_modes, c.phi_slope, 1.0, c.phi_seed);
  const Field u = initial_field(cfg);
  SchemeConfig base = cfg.scheme_config();
  std::vector<ConsistencyLevel> levels;
  for (int n : c.ladder) {
    const SchemeConfig s = cfg.law().at(base, n);
    levels.push_back(ConsistencyLevel{n, s.m, s.eps});
  }
  const auto reports = consistency_study(u, phi, levels, c.calibrate_n);

  Report report;
  std::ostringstream text;
  CsvWriter csv(text, {"n", "m", "eps", "R1", "R1_factor", "C_hat", "R1_bound", "N", "N_bound"});
  json rows = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const double r1_bound = 1.05 * r.C_hat * r.R1_factor;
    csv.cell((long long)r.n).cell((long long)levels[i].m).cell(levels[i].eps).cell(r.R1_value).cell(r.R1_factor);
    csv.cell(r.C_hat).cell(r1_bound).cell(r.N_value).cell(r.N_bound);
    csv.end_row();
    report.check("R1_bound_n" + std::to_string(r.n), r.r1_within_bound, std::abs(r.R1_value), r1_bound);
    report.check("N_bound_n" + std::to_string(r.n), r.n_within_bound, std::abs(r.N_value), r.N_bound);
    rows.push_back({{"n", r.n}, {"R1", r.R1_value}, {"N", number(r.N_value)}});
  }
  fs::create_directories(dir);
  write_text_file(dir / "consistency.csv", text.str());
  report.summary = {{"phi_modes", c.phi_modes}, {"calibrate_n", c.calibrate_n},
                    {"C_hat", reports.empty() ? 0.0 : reports[0].C_hat}, {"levels", rows}};
  for (const auto& r : reports) out << "n=" << r.n << " R1=" << format_double(r.R1_value) << "\n";
  return finish(out, dir, "consistency", cfg, report);
}

int cmd_info(const Options& o, std::ostream& out) {
  json info = {{"version", kVersion},
               {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION)},
               {"subcommands", {"run", "ensemble", "converge", "verify-energy", "consistency", "relative-energy", "info"}}};
  if (!o.config.empty()) {
    const RunConfig cfg = resolve(o);
    const SchemeConfig sc = cfg.scheme_config();
    const NoiseModel noise = cfg.noise_model();
    const SvmScheme scheme(sc, noise);
    info["config_hash"] = hash_hex(config_hash(cfg));
    info["scheme"] = {{"dim", sc.dim}, {"n", sc.n}, {"m", sc.m}, {"eps", sc.eps},
                      {"grid", scheme.lattice()->grid()}, {"modes", scheme.lattice()->mode_count()},
                      {"dt", sc.dt}, {"T", sc.T}, {"steps", scheme.total_steps()},
                      {"integrator", to_string(sc.integrator)}};
    info["noise"] = {{"family", to_string(noise.family())}, {"K", noise.modes()},
                     {"sum_alpha_sq", noise.alphas().squaredNorm()}, {"D0", noise.D0()}, {"D1", noise.D1()}};
    info["output"] = {{"dir", cfg.output.dir}, {"threads", cfg.output.threads}};
  }
  out << info.dump(2) << "\n";
  return kOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic spectral viscosity solver for the incompressible Euler equations", "svm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"run", "Single trajectory with ledger, probes, snapshots and checkpoints"},
      {"ensemble", "Monte-Carlo ensemble statistics and Young-measure histograms"},
      {"converge", "Coupled resolution ladder and Cesaro-mean gaps"},
      {"verify-energy", "Energy-balance residual check"},
      {"consistency", "Consistency residuals R1 and N across a ladder"},
      {"relative-energy", "Weak-strong L1 error and relative-energy Gronwall check"},
      {"info", "Version and derived parameters of a config"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* cfg_opt = sub->add_option("--config,-c", o.config, "JSON config file");
    if (name != "info") cfg_opt->required()->check(CLI::ExistingFile);
    sub->add_option("--set", o.sets, "Override key=value (dotted keys, repeatable)")->take_all();
    sub->add_option("--out,-o", o.out, "Output directory");
    sub->add_option("--threads,-j", o.threads, "Worker threads")->check(CLI::Range(1, 4096));
    sub->add_flag("--dry-run", o.dry_run, "Validate and print the effective config only");
    if (name == "run") {
      sub->add_flag("--resume", o.resume, "Continue from the checkpoint in the output directory");
      sub->add_option("--stop-after", o.stop_after, "Stop and checkpoint at this step")->check(CLI::NonNegativeNumber);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "info") return cmd_info(o, out);
    const RunConfig cfg = resolve(o);
    if (o.dry_run) {
      out << serialize_config(cfg);
      return kOk;
    }
    const std::string manifest = manifest_line(command, o, cfg);
    out << "manifest: " << manifest << "\n";
    if (command == "run") return cmd_run(o, cfg, out);
    if (command == "verify-energy") return cmd_verify_energy(cfg, out);
    if (command == "ensemble") return cmd_ensemble(manifest, cfg, out);
    if (command == "converge") return cmd_converge(manifest, cfg, out);
    if (command == "relative-energy") return cmd_relative_energy(manifest, cfg, out);
    if (command == "consistency") return cmd_consistency(cfg, out);
    err << "error: unknown subcommand " << command << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << " (last valid t=" << e.last_valid().time << ")\n";
    return kNumericalAbort;
  } catch (const ExperimentError& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOtherError;
  }
}

}  // namespace svm::cli
