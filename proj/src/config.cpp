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

#include "svm/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace svm {

using nlohmann::json;

ConfigViolations::ConfigViolations(std::vector<std::string> violations)
    : ConfigError([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  - " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

namespace {

// Strict reader over one JSON object: records type errors, missing
// required keys and, on finish(), every key that was never consumed.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& errors)
      : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {
    if (!obj_.is_object()) errors_.push_back(where("") + " must be an object");
  }

  template <typename T>
  bool get(const char* key, T& out, bool required = false) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null()) {
      if (required) errors_.push_back("missing required key " + where(key));
      return false;
    }
    const json& v = obj_.at(key);
    if (!convert(v, out)) {
      errors_.push_back(where(key) + " has the wrong type (" + v.dump() + ")");
      return false;
    }
    return true;
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    T value{};
    if (get(key, value)) out = value;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null()) return nullptr;
    return &obj_.at(key);
  }

  std::string where(const std::string& key) const {
    return prefix_.empty() ? key : (key.empty() ? prefix_ : prefix_ + "." + key);
  }

  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) errors_.push_back("unknown key " + where(key));
    }
  }

 private:
  static bool convert(const json& v, int& out) {
    if (!v.is_number_integer()) return false;
    const auto x = v.get<std::int64_t>();
    if (x < INT32_MIN || x > INT32_MAX) return false;
    out = static_cast<int>(x);
    return true;
  }
  static bool convert(const json& v, std::uint64_t& out) {
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
      return true;
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<std::int64_t>());
      return true;
    }
    return false;
  }
  static bool convert(const json& v, double& out) {
    if (!v.is_number()) return false;
    out = v.get<double>();
    return true;
  }
  static bool convert(const json& v, bool& out) {
    if (!v.is_boolean()) return false;
    out = v.get<bool>();
    return true;
  }
  static bool convert(const json& v, std::string& out) {
    if (!v.is_string()) return false;
    out = v.get<std::string>();
    return true;
  }
  template <typename T>
  static bool convert(const json& v, std::vector<T>& out) {
    if (!v.is_array()) return false;
    std::vector<T> tmp;
    for (const auto& e : v) {
      T x{};
      if (!convert(e, x)) return false;
      tmp.push_back(x);
    }
    out = std::move(tmp);
    return true;
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

const json kEmpty = json::object();

const json& object_or_empty(const json* j) { return j ? *j : kEmpty; }

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

std::vector<double> from_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void read_noise(const json& j, NoiseConfig& out, std::vector<std::string>& errors) {
  Reader r(j, "noise", errors);
  r.get("family", out.family);
  r.get("K", out.K);
  std::vector<double> alphas;
  if (r.get("alphas", alphas)) out.alphas = alphas;
  if (const json* law = r.child("alpha_law")) {
    Reader lr(*law, "noise.alpha_law", errors);
    lr.get("amplitude", out.amplitude);
    lr.get("decay", out.decay);
    lr.finish();
  }
  r.get_optional("D0", out.D0);
  r.get_optional("D1", out.D1);
  r.get_optional("seed", out.seed);
  if (const json* modes = r.child("modes")) {
    if (!modes->is_array()) {
      errors.push_back("noise.modes must be an array");
    } else {
      int idx = 0;
      for (const auto& m : *modes) {
        Reader mr(m, "noise.modes[" + std::to_string(idx++) + "]", errors);
        std::vector<int> k;
        std::vector<double> a;
        mr.get("wavevector", k, true);
        mr.get("direction", a, true);
        mr.finish();
        out.modes.push_back(AdditiveMode{Eigen::Map<Eigen::VectorXi>(k.data(), Eigen::Index(k.size())),
                                         to_vector(a)});
      }
    }
  }
  r.finish();
}

void read_probes(const json& j, std::vector<Probe>& out, std::vector<std::string>& errors) {
  if (!j.is_array()) {
    errors.push_back("observers.probes must be an array");
    return;
  }
  int idx = 0;
  for (const auto& p : j) {
    Reader pr(p, "observers.probes[" + std::to_string(idx++) + "]", errors);
    Probe probe;
    std::vector<double> x;
    pr.get("t", probe.t, true);
    pr.get("x", x, true);
    pr.finish();
    probe.x = to_vector(x);
    out.push_back(std::move(probe));
  }
}

RunConfig from_json(const json& root, std::vector<std::string>& errors) {
  RunConfig c;
  Reader top(root, "", errors);
  top.get("seed", c.seed);

  {
    const json* j = top.child("lattice");
    if (!j) errors.push_back("missing required block lattice");
    Reader r(object_or_empty(j), "lattice", errors);
    r.get("dim", c.dim, true);
    r.get("n", c.n, true);
    r.get("grid", c.grid);
    r.finish();
  }
  {
    const json* j = top.child("scheme");
    if (!j) errors.push_back("missing required block scheme");
    Reader r(object_or_empty(j), "scheme", errors);
    r.get_optional("eps", c.eps);
    if (const json* law = r.child("eps_law")) {
      Reader lr(*law, "scheme.eps_law", errors);
      lr.get("c", c.eps_c);
      lr.get("theta", c.eps_theta);
      lr.finish();
    }
    r.get_optional("m", c.m);
    r.get("dt", c.dt, true);
    r.get("T", c.T, true);
    std::string integrator = to_string(c.integrator);
    if (r.get("integrator", integrator)) {
      try {
        c.integrator = integrator_from_string(integrator);
      } catch (const ConfigError& e) {
        errors.push_back(std::string("scheme.integrator: ") + e.what());
      }
    }
    r.finish();
  }
  if (const json* j = top.child("noise")) read_noise(*j, c.noise, errors);
  {
    const json* j = top.child("initial");
    if (!j) errors.push_back("missing required block initial");
    Reader r(object_or_empty(j), "initial", errors);
    r.get("preset", c.initial.preset, true);
    r.get("amplitude", c.initial.amplitude);
    r.get("perturbation", c.initial.perturbation);
    r.get("seed", c.initial.seed);
    r.get("modes", c.initial.modes);
    r.get("slope", c.initial.slope);
    r.get("file", c.initial.file);
    r.finish();
  }
  if (const json* j = top.child("observers")) {
    Reader r(*j, "observers", errors);
    r.get("energy_stride", c.observers.energy_stride);
    r.get("snapshot_stride", c.observers.snapshot_stride);
    r.get("checkpoint_stride", c.observers.checkpoint_stride);
    if (const json* p = r.child("probes")) read_probes(*p, c.observers.probes, errors);
    r.finish();
  }
  if (const json* j = top.child("ensemble")) {
    Reader r(*j, "ensemble", errors);
    r.get("M", c.ensemble.members);
    r.get("ladder", c.ensemble.ladder);
    r.get("coupled", c.ensemble.coupled);
    r.get("histogram_bins", c.ensemble.histogram_bins);
    r.get("times", c.ensemble.times);
    r.get("reference_n", c.ensemble.reference_n);
    r.get("ref_dt_factor", c.ensemble.ref_dt_factor);
    r.get("sample_stride", c.ensemble.sample_stride);
    r.get("gronwall_slack", c.ensemble.gronwall_slack);
    r.finish();
  }
  if (const json* j = top.child("consistency")) {
    Reader r(*j, "consistency", errors);
    r.get("phi_modes", c.consistency.phi_modes);
    r.get("phi_seed", c.consistency.phi_seed);
    r.get("phi_slope", c.consistency.phi_slope);
    r.get("ladder", c.consistency.ladder);
    r.get("calibrate_n", c.consistency.calibrate_n);
    r.finish();
  }
  if (const json* j = top.child("verify")) {
    Reader r(*j, "verify", errors);
    r.get("tolerance", c.verify.tolerance);
    r.get("dts", c.verify.dts);
    r.get("min_order", c.verify.min_order);
    r.finish();
  }
  if (const json* j = top.child("output")) {
    Reader r(*j, "output", errors);
    r.get("dir", c.output.dir);
    r.get("threads", c.output.threads);
    r.finish();
  }
  top.finish();
  return c;
}

bool strictly_increasing(const std::vector<int>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 1 || (i > 0 && v[i] <= v[i - 1])) return false;
  }
  return true;
}

void validate(const RunConfig& c, std::vector<std::string>& errors) {
  auto fail = [&](std::string msg) { errors.push_back(std::move(msg)); };
  if (c.dim != 2 && c.dim != 3) fail("lattice.dim must be 2 or 3 (got " + std::to_string(c.dim) + ")");
  if (c.n < 1) fail("lattice.n must be positive (got " + std::to_string(c.n) + ")");
  if (c.grid != 0 && c.grid < 2 * c.n + 2) {
    fail("lattice.grid=" + std::to_string(c.grid) + " must be 0 or >= 2n+2=" + std::to_string(2 * c.n + 2));
  }
  const int m = c.m.value_or(SchemeConfig::default_threshold(c.n));
  if (m < 0 || m >= c.n) {
    fail("scheme.m=" + std::to_string(m) + " must satisfy 0 <= m < n=" + std::to_string(c.n));
  }
  if (c.eps && !(*c.eps >= 0)) fail("scheme.eps must be >= 0");
  if (!(c.eps_c >= 0)) fail("scheme.eps_law.c must be >= 0");
  if (!(c.dt > 0)) fail("scheme.dt must be > 0");
  if (!(c.T >= 0)) fail("scheme.T must be >= 0");

  const auto& nz = c.noise;
  bool family_ok = true;
  try {
    noise_family_from_string(nz.family);
  } catch (const ConfigError&) {
    family_ok = false;
    fail("noise.family '" + nz.family + "' is not one of zero, linear, saturated_linear, additive_modes");
  }
  if (nz.K < 0) fail("noise.K must be >= 0");
  if (nz.alphas && static_cast<int>(nz.alphas->size()) != nz.K) {
    fail("noise.alphas has " + std::to_string(nz.alphas->size()) + " entries for K=" + std::to_string(nz.K));
  }
  if (nz.D0 && *nz.D0 < 0) fail("noise.D0 must be >= 0");
  if (nz.D1 && *nz.D1 < 0) fail("noise.D1 must be >= 0");
  if (family_ok && nz.family == "additive_modes" && !nz.modes.empty() &&
      static_cast<int>(nz.modes.size()) != nz.K) {
    fail("noise.modes has " + std::to_string(nz.modes.size()) + " entries for K=" + std::to_string(nz.K));
  }
  for (std::size_t i = 0; i < nz.modes.size(); ++i) {
    if (nz.modes[i].wavevector.size() != c.dim || nz.modes[i].direction.size() != c.dim) {
      fail("noise.modes[" + std::to_string(i) + "] does not match lattice.dim");
    }
  }
  if (family_ok && nz.family != "zero" && c.integrator == Integrator::deterministic_midpoint) {
    const bool zero_alphas = nz.alphas && std::all_of(nz.alphas->begin(), nz.alphas->end(),
                                                      [](double a) { return a == 0; });
    if (!zero_alphas && nz.K > 0) {
      fail("scheme.integrator deterministic_midpoint requires noise.family zero");
    }
  }

  static const std::set<std::string> presets{"taylor_green", "shear", "random_divfree", "file"};
  if (!presets.count(c.initial.preset)) {
    fail("initial.preset '" + c.initial.preset + "' is not one of taylor_green, shear, random_divfree, file");
  }
  if (c.initial.preset == "file" && c.initial.file.empty()) fail("initial.file is required for preset file");
  if (c.initial.preset == "random_divfree" && c.initial.modes < 1) fail("initial.modes must be positive");

  if (c.observers.energy_stride < 1) fail("observers.energy_stride must be >= 1");
  if (c.observers.snapshot_stride < 0) fail("observers.snapshot_stride must be >= 0");
  if (c.observers.checkpoint_stride < 0) fail("observers.checkpoint_stride must be >= 0");
  for (std::size_t i = 0; i < c.observers.probes.size(); ++i) {
    const auto& p = c.observers.probes[i];
    const std::string where = "observers.probes[" + std::to_string(i) + "]";
    if (p.x.size() != c.dim) fail(where + ".x must have " + std::to_string(c.dim) + " coordinates");
    if (p.t < 0 || p.t > c.T * (1 + 1e-12)) fail(where + ".t outside [0, T]");
    if ((p.x.array() < 0).any() || (p.x.array() >= 2 * EIGEN_PI).any()) fail(where + ".x outside [0, 2pi)");
  }

  const auto& e = c.ensemble;
  if (e.members < 1) fail("ensemble.M must be >= 1");
  if (!strictly_increasing(e.ladder)) fail("ensemble.ladder must be positive and strictly increasing");
  if (e.histogram_bins < 1) fail("ensemble.histogram_bins must be >= 1");
  if (e.ref_dt_factor < 4) fail("ensemble.ref_dt_factor must be >= 4");
  if (e.sample_stride < 1) fail("ensemble.sample_stride must be >= 1");
  if (e.gronwall_slack < 0) fail("ensemble.gronwall_slack must be >= 0");
  if (e.reference_n < 0) fail("ensemble.reference_n must be >= 0");
  for (double t : e.times) {
    if (t < 0 || t > c.T * (1 + 1e-12)) fail("ensemble.times entry outside [0, T]");
  }
  for (int n : e.ladder) {
    const int lm = c.m.value_or(SchemeConfig::default_threshold(n));
    if (lm >= n) {
      fail("ladder level n=" + std::to_string(n) + " needs m < n (m=" + std::to_string(lm) + ")");
    }
  }

  const auto& k = c.consistency;
  if (k.phi_modes < 1) fail("consistency.phi_modes must be >= 1");
  if (!strictly_increasing(k.ladder)) fail("consistency.ladder must be positive and strictly increasing");
  if (k.calibrate_n < 1) fail("consistency.calibrate_n must be >= 1");

  if (!(c.verify.tolerance > 0)) fail("verify.tolerance must be > 0");
  for (std::size_t i = 0; i < c.verify.dts.size(); ++i) {
    if (!(c.verify.dts[i] > 0)) fail("verify.dts entries must be > 0");
  }
  if (c.output.threads < 1) fail("output.threads must be >= 1");
  if (c.output.dir.empty()) fail("output.dir must not be empty");
}

json to_json(const RunConfig& c, bool include_output) {
  json root;
  root["seed"] = c.seed;
  root["lattice"] = {{"dim", c.dim}, {"n", c.n}, {"grid", c.grid}};
  json scheme = {{"dt", c.dt}, {"T", c.T}, {"integrator", to_string(c.integrator)}};
  scheme["eps_law"] = {{"c", c.eps_c}, {"theta", c.eps_theta}};
  if (c.eps) scheme["eps"] = *c.eps;
  if (c.m) scheme["m"] = *c.m;
  root["scheme"] = scheme;

  json noise = {{"family", c.noise.family},
                {"K", c.noise.K},
                {"alpha_law", {{"amplitude", c.noise.amplitude}, {"decay", c.noise.decay}}}};
  if (c.noise.alphas) noise["alphas"] = *c.noise.alphas;
  if (c.noise.D0) noise["D0"] = *c.noise.D0;
  if (c.noise.D1) noise["D1"] = *c.noise.D1;
  if (c.noise.seed) noise["seed"] = *c.noise.seed;
  if (!c.noise.modes.empty()) {
    json modes = json::array();
    for (const auto& m : c.noise.modes) {
      modes.push_back({{"wavevector", std::vector<int>(m.wavevector.data(), m.wavevector.data() + m.wavevector.size())},
                       {"direction", from_vector(m.direction)}});
    }
    noise["modes"] = modes;
  }
  root["noise"] = noise;

  root["initial"] = {{"preset", c.initial.preset},         {"amplitude", c.initial.amplitude},
                     {"perturbation", c.initial.perturbation}, {"seed", c.initial.seed},
                     {"modes", c.initial.modes},           {"slope", c.initial.slope},
                     {"file", c.initial.file}};

  json probes = json::array();
  for (const auto& p : c.observers.probes) probes.push_back({{"t", p.t}, {"x", from_vector(p.x)}});
  root["observers"] = {{"energy_stride", c.observers.energy_stride},
                       {"snapshot_stride", c.observers.snapshot_stride},
                       {"checkpoint_stride", c.observers.checkpoint_stride},
                       {"probes", probes}};
  root["ensemble"] = {{"M", c.ensemble.members},
                      {"ladder", c.ensemble.ladder},
                      {"coupled", c.ensemble.coupled},
                      {"histogram_bins", c.ensemble.histogram_bins},
                      {"times", c.ensemble.times},
                      {"reference_n", c.ensemble.reference_n},
                      {"ref_dt_factor", c.ensemble.ref_dt_factor},
                      {"sample_stride", c.ensemble.sample_stride},
                      {"gronwall_slack", c.ensemble.gronwall_slack}};
  root["consistency"] = {{"phi_modes", c.consistency.phi_modes},
                         {"phi_seed", c.consistency.phi_seed},
                         {"phi_slope", c.consistency.phi_slope},
                         {"ladder", c.consistency.ladder},
                         {"calibrate_n", c.consistency.calibrate_n}};
  root["verify"] = {{"tolerance", c.verify.tolerance}, {"dts", c.verify.dts}, {"min_order", c.verify.min_order}};
  if (include_output) root["output"] = {{"dir", c.output.dir}, {"threads", c.output.threads}};
  return root;
}

void apply_override(json& root, const std::string& assignment, std::vector<std::string>& errors) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    errors.push_back("override '" + assignment + "' is not of the form key=value");
    return;
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) {
      errors.push_back("override key '" + key + "' has an empty component");
      return;
    }
    if (!node->is_object()) {
      errors.push_back("override key '" + key + "' descends into a non-object");
      return;
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace

NoiseModel NoiseConfig::build(int dim) const {
  const auto fam = noise_family_from_string(family);
  const Eigen::VectorXd a =
      alphas ? to_vector(*alphas) : NoiseModel::alpha_law(K, amplitude, decay);
  NoiseModel model;
  switch (fam) {
    case NoiseFamily::zero: model = NoiseModel::zero(K); break;
    case NoiseFamily::linear: model = NoiseModel::linear(a); break;
    case NoiseFamily::saturated_linear: model = NoiseModel::saturated_linear(a); break;
    case NoiseFamily::additive_modes: model = NoiseModel::additive(a, dim, modes); break;
  }
  if (D0 || D1) model.set_declared_constants(D0.value_or(model.D0()), D1.value_or(model.D1()));
  return model;
}

ResolutionLaw RunConfig::law() const {
  ResolutionLaw l;
  l.eps = eps;
  l.eps_c = eps_c;
  l.eps_theta = eps_theta;
  l.m = m;
  return l;
}

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig base;
  base.dim = dim;
  base.dt = dt;
  base.T = T;
  base.integrator = integrator;
  SchemeConfig cfg = law().at(base, n);
  cfg.grid = grid;
  return cfg;
}

EnsembleConfig RunConfig::ensemble_config() const {
  EnsembleConfig e;
  e.members = ensemble.members;
  e.master_seed = seed;
  e.ladder = ensemble.ladder;
  e.coupled = ensemble.coupled;
  e.probes = observers.probes;
  e.histogram_bins = ensemble.histogram_bins;
  e.threads = output.threads;
  return e;
}

WeakStrongConfig RunConfig::weak_strong_config() const {
  WeakStrongConfig ws;
  int top = 0;
  for (int n : ensemble.ladder) top = std::max(top, n);
  ws.reference_n = ensemble.reference_n > 0 ? ensemble.reference_n : 4 * top;
  ws.ref_dt_factor = ensemble.ref_dt_factor;
  ws.sample_stride = ensemble.sample_stride;
  ws.gronwall_slack = ensemble.gronwall_slack;
  return ws;
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ConfigViolations({"configuration is not valid JSON"});
  std::vector<std::string> errors;
  for (const auto& o : overrides) apply_override(root, o, errors);
  RunConfig cfg = from_json(root, errors);
  if (errors.empty()) validate(cfg, errors);
  if (!errors.empty()) throw ConfigViolations(std::move(errors));
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigViolations({"cannot open config file '" + path + "'"});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

std::string serialize_config(const RunConfig& cfg, bool include_output) {
  return to_json(cfg, include_output).dump(2) + "\n";
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string text = to_json(cfg, false).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace svm
