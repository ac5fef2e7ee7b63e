#include <chrono>

#include <json.hpp>

#include "experiments.hpp"

#ifndef BDL_VERSION
#define BDL_VERSION "0.0.0"
#endif

namespace bdl::harness {

namespace {

using json = nlohmann::ordered_json;

constexpr std::pair<Experiment, std::string_view> kNames[] = {
    {Experiment::legendre_check, "legendre-check"},
    {Experiment::scriptf, "scriptf"},
    {Experiment::zeros, "zeros"},
    {Experiment::kernel_decay, "kernel-decay"},
    {Experiment::divsolve_check, "divsolve-check"},
    {Experiment::limit_convergence, "limit-convergence"},
    {Experiment::resonance_trend, "resonance-trend"},
};

json config_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment ? std::string(to_string(*c.experiment)) : std::string();
  j["potential"] = c.potential;
  j["lambda"] = {{"min", c.lambda.min},
                 {"max", c.lambda.max},
                 {"count", c.lambda.count},
                 {"spacing", c.lambda.geometric ? "geometric" : "linear"}};
  j["box"] = {c.box.re_lo, c.box.re_hi, c.box.im_lo, c.box.im_hi};
  j["grid"] = c.grid;
  j["rel_tolerance"] = c.rel_tolerance;
  j["z"] = {c.z.real(), c.z.imag()};
  j["w"] = {c.w.real(), c.w.imag()};
  j["xi"] = c.xi;
  j["a"] = c.a;
  j["seeds"] = c.seeds;
  j["nodes"] = c.nodes;
  j["input_shape"] = std::string(to_string(c.input_shape));
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["svg"] = c.svg;
  j["jobs"] = c.jobs;
  return j;
}

std::string manifest_name(const ExperimentConfig& c) {
  return (c.experiment ? std::string(to_string(*c.experiment)) : std::string("bdl")) + ".manifest.json";
}

void write_manifest(RunManifest& m) {
  try {
    write_atomic(std::filesystem::path(m.config.out) / manifest_name(m.config), m.to_json());
  } catch (const IoError& e) {
    m.failures.push_back(e.what());
    m.exit_code = kExitIo;
  }
}

}  // namespace

std::string_view version() { return BDL_VERSION; }

std::string_view to_string(Experiment e) {
  for (const auto& [k, name] : kNames) {
    if (k == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& [k, n] : kNames) v.push_back(k);
    return v;
  }();
  return all;
}

std::string RunManifest::to_json() const {
  json j;
  j["artifact_version"] = version;
  j["config"] = config_json(config);
  json stages_j = json::array();
  for (const auto& s : stages) stages_j.push_back({{"stage", s.stage}, {"wall_seconds", s.seconds}});
  j["stages"] = stages_j;
  j["row_counts"] = row_counts;
  j["artifacts"] = artifacts;
  j["failures"] = failures;
  j["notes"] = notes;
  j["exit_code"] = exit_code;
  return j.dump(2) + "\n";
}

RunManifest run(const ExperimentConfig& config) {
  RunManifest m;
  m.config = config;
  m.version = std::string(version());
  try {
    if (!config.experiment) throw ConfigError("no experiment selected", 0, "experiment");
    validate(config);
  } catch (const ConfigError& e) {
    m.failures.push_back(e.what());
    m.exit_code = kExitConfig;
    if (!config.out.empty()) write_manifest(m);
    return m;
  }

  const auto t0 = std::chrono::steady_clock::now();
  detail::ExperimentOutput out;
  try {
    out = detail::run_experiment(config);
  } catch (const std::exception& e) {
    out.failures.push_back(std::string(to_string(*config.experiment)) + ": " + e.what());
  }
  m.stages = out.stages;
  m.failures = out.failures;
  m.notes = out.notes;
  const double compute = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.stages.push_back({"total_compute", compute});

  bool io_failed = false;
  const std::filesystem::path dir(config.out);
  const auto emit = [&](const std::string& file, std::string_view content) {
    try {
      write_atomic(dir / file, content);
      m.artifacts.push_back(file);
      return true;
    } catch (const IoError& e) {
      m.failures.push_back(e.what());
      io_failed = true;
      return false;
    }
  };
  for (const auto& t : out.tables) {
    if (emit(t.file, t.table.to_csv())) m.row_counts[t.file] = static_cast<long>(t.table.rows.size());
  }
  for (const auto& t : out.texts) emit(t.file, t.content);
  if (config.svg) {
    bool any = false;
    for (const auto& s : out.plot) any = any || !s.points.empty();
    if (any) {
      const SvgImage img = emit_svg(out.plot, out.plot_style);
      if (img.clipped_markers > 0) {
        m.notes.push_back("svg: " + std::to_string(img.clipped_markers) +
                          " non-finite value(s) drawn as clipped markers on the bottom axis");
      }
      emit(std::string(to_string(*config.experiment)) + ".svg", img.text);
    } else {
      m.notes.push_back("svg: nothing to plot");
    }
  }

  m.exit_code = io_failed ? kExitIo : (m.failures.empty() ? kExitOk : kExitNumerical);
  write_manifest(m);
  return m;
}

void write_failure_manifest(const ExperimentConfig& config, const std::string& failure, int exit_code) {
  RunManifest m;
  m.config = config;
  m.version = std::string(version());
  m.failures.push_back(failure);
  m.exit_code = exit_code;
  if (!config.out.empty()) write_manifest(m);
}

}  // namespace bdl::harness
