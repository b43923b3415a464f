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

#include "svm/runtime.hpp"

#include "svm/csv.hpp"
#include "svm/initial_conditions.hpp"
#include "svm/operators.hpp"
#include "svm/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace svm {

namespace fs = std::filesystem;

namespace {

std::string snapshot_name(Eigen::Index step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%08lld.svmf", static_cast<long long>(step));
  return buf;
}

class OutputObserver : public RunObserver {
 public:
  OutputObserver(const RunConfig& cfg, fs::path out, std::vector<ProbeRecord>& probes)
      : cfg_(cfg), out_(std::move(out)), probes_(probes) {
    for (const auto& p : cfg.observers.probes) probe_steps_.push_back(std::llround(p.t / cfg.dt));
  }

  void record(const SolverState& s) {
    for (std::size_t i = 0; i < probe_steps_.size(); ++i) {
      if (probe_steps_[i] != s.step_index) continue;
      probes_.push_back(ProbeRecord{int(i), s.time, evaluate_at(s.u, cfg_.observers.probes[i].x)});
    }
    const int stride = cfg_.observers.snapshot_stride;
    if (stride > 0 && s.step_index % stride == 0) {
      write_snapshot((out_ / "snapshots" / snapshot_name(s.step_index)).string(), s.u, s.time);
    }
  }

  void on_step(const SolverState& s, const StepIncrements&) override { record(s); }

 private:
  const RunConfig& cfg_;
  fs::path out_;
  std::vector<ProbeRecord>& probes_;
  std::vector<long long> probe_steps_;
};

void write_probes_csv(const fs::path& path, const RunConfig& cfg, const std::vector<ProbeRecord>& probes) {
  std::vector<std::string> header{"probe", "t"};
  for (int j = 0; j < cfg.dim; ++j) header.push_back("x" + std::to_string(j + 1));
  for (int j = 0; j < cfg.dim; ++j) header.push_back("u" + std::to_string(j + 1));
  std::ostringstream text;
  CsvWriter csv(text, header);
  for (const auto& r : probes) {
    csv.cell(static_cast<long long>(r.probe)).cell(r.t);
    for (double x : cfg.observers.probes[std::size_t(r.probe)].x) csv.cell(x);
    for (double u : r.value) csv.cell(u);
    csv.end_row();
  }
  write_text_file(path, text.str());
}

void write_outputs(const RunConfig& cfg, const fs::path& out, const RunOutcome& outcome) {
  std::ostringstream ledger;
  write_ledger_csv(ledger, outcome.ledger, cfg.observers.energy_stride);
  write_text_file(out / "ledger.csv", ledger.str());
  write_probes_csv(out / "probes.csv", cfg, outcome.probes);
}

void clear_snapshots(const fs::path& dir) {
  if (!fs::exists(dir)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("step_", 0) == 0 && entry.path().extension() == ".svmf") fs::remove(entry.path());
  }
}

}  // namespace

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

Field initial_field(const RunConfig& cfg) { return make_initial_field(cfg.initial, cfg.dim); }

RunOutcome execute_run(const RunConfig& cfg, const fs::path& out, bool resume, std::int64_t stop_after) {
  const SvmScheme scheme(cfg.scheme_config(), cfg.noise_model());
  const WienerPath path = path_for(scheme, cfg.path_seed());
  const std::uint64_t hash = config_hash(cfg);
  const Eigen::Index total = scheme.total_steps();
  const fs::path cp_path = out / kCheckpointFile;

  RunOutcome outcome;
  SolverState state;
  if (resume) {
    if (!fs::exists(cp_path)) throw ConfigError("no checkpoint to resume in '" + out.string() + "'");
    Checkpoint cp = read_checkpoint(cp_path.string());
    if (cp.config_hash != hash) {
      throw ConfigError("checkpoint config hash " + hash_hex(cp.config_hash) +
                        " does not match the current config hash " + hash_hex(hash) +
                        "; refusing to resume");
    }
    outcome.resumed = true;
    outcome.ledger = std::move(cp.ledger);
    outcome.probes = std::move(cp.probes);
    state = SolverState{cp.time, cp.field.on_lattice(scheme.lattice()), cp.step};
    state.u.set_tag(FieldTag::divergence_free);
    if (cp.step >= total) {
      outcome.completed = true;
      outcome.already_complete = true;
      outcome.state = std::move(state);
      outcome.notices.push_back("run already complete at step " + std::to_string(cp.step) +
                                "; nothing to do");
      return outcome;
    }
    outcome.notices.push_back("resuming from step " + std::to_string(cp.step));
  } else {
    fs::create_directories(out);
    if (cfg.observers.snapshot_stride > 0) {
      fs::create_directories(out / "snapshots");
      clear_snapshots(out / "snapshots");
    }
    write_text_file(out / "config.json", serialize_config(cfg, false));
    state = scheme.initial_state(initial_field(cfg));
  }

  OutputObserver observer(cfg, out, outcome.probes);
  if (!resume) observer.record(state);
  if (auto advisory = scheme.cfl_advisory(state.u)) outcome.notices.push_back(*advisory);
  RunObserver* observers[] = {&observer};

  const Eigen::Index target = stop_after >= 0 ? std::min<Eigen::Index>(stop_after, total) : total;
  const int stride = cfg.observers.checkpoint_stride;
  auto save = [&] {
    write_checkpoint(cp_path.string(),
                     Checkpoint{hash, state.step_index, state.time, outcome.ledger, outcome.probes, state.u});
  };
  do {
    Eigen::Index segment_end = target;
    if (stride > 0) segment_end = std::min(target, (state.step_index / stride + 1) * stride);
    RunResult r = run(scheme, path, std::move(state), observers, std::move(outcome.ledger), segment_end);
    state = std::move(r.final_state);
    outcome.ledger = std::move(r.ledger);
    save();
  } while (state.step_index < target);

  outcome.completed = state.step_index >= total;
  if (outcome.completed) write_snapshot((out / "final.svmf").string(), state.u, state.time);
  outcome.state = state;
  write_outputs(cfg, out, outcome);
  return outcome;
}

}  // namespace svm
