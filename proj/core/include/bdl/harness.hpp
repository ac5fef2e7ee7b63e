#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bdl/divsolve1d.hpp"
#include "bdl/errors.hpp"
#include "bdl/scriptf.hpp"

namespace bdl::harness {

std::string_view version();

enum class Experiment {
  legendre_check,
  scriptf,
  zeros,
  kernel_decay,
  divsolve_check,
  limit_convergence,
  resonance_trend,
};

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

struct LambdaGrid {
  double min = 10.0;
  double max = 1000.0;
  int count = 7;
  bool geometric = true;

  std::vector<double> values() const;
};

/// Parses `min:max:count`.
LambdaGrid parse_lambda_grid(std::string_view text);
/// Parses `a,b,c,d` as [re_lo, re_hi] x [im_lo, im_hi].
ComplexBox parse_box(std::string_view text);

struct ExperimentConfig {
  std::optional<Experiment> experiment;
  std::string potential = "quadratic:1";
  LambdaGrid lambda;
  ComplexBox box{-1.0, 1.0, 0.0, 0.0};
  int grid = 21;  // points per box axis
  double rel_tolerance = 1e-10;
  // kernel-decay
  std::complex<double> z{0.0, 1.0};
  std::complex<double> w{0.0, 0.0};
  // divsolve-check
  std::vector<double> xi{0.0, 0.3, -0.3};
  double a = 3.0;
  int seeds = 20;
  int nodes = 8192;
  InputShape input_shape = InputShape::plain;

  std::uint64_t seed = 0;
  std::string out = "out";
  bool svg = false;
  int jobs = 1;
};

/// Config problem; line is 0 when the error is not tied to a line (CLI override, validation).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// TOML subset: comments (#), one [experiment] table, `key = value` with values a quoted
/// string, number, true/false or a flat array of those. Validates the result.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

/// Canonical `key = value` rendering (parse_config round-trips it).
std::string to_toml(const ExperimentConfig& config);

// CSV (RFC 4180, CRLF line ends, 17 significant digits).

std::string format_number(double v);
std::string csv_field(std::string_view raw);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// Summary block appended after the rows, each line prefixed by "# ".
  std::vector<std::vector<std::string>> footer;

  std::string to_csv() const;
};

// SVG

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

struct SvgImage {
  std::string text;
  /// Non-finite y values drawn as markers clipped to the bottom axis.
  int clipped_markers = 0;
};

/// Standalone SVG 1.1 with axes, ticks and a legend; identical input gives identical bytes.
/// Throws InvalidArgument when no series has a point.
SvgImage emit_svg(const std::vector<Series>& series, const PlotStyle& style);

/// Writes to `path.tmp` and renames over `path`; throws IoError.
void write_atomic(const std::filesystem::path& path, std::string_view content);

// Running

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  ExperimentConfig config;
  std::string version;
  std::vector<StageTiming> stages;
  std::map<std::string, long> row_counts;  // per written table
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  std::vector<std::string> artifacts;  // file names inside config.out
  int exit_code = kExitOk;

  std::string to_json() const;
};

/// Validates, dispatches, writes `<out>/<experiment>.csv` (plus certificate and SVG when
/// applicable) and `<out>/<experiment>.manifest.json`. Numerical errors land in the failure
/// list; rows computed before them are kept.
RunManifest run(const ExperimentConfig& config);

/// Best-effort manifest for a run rejected before dispatch.
void write_failure_manifest(const ExperimentConfig& config, const std::string& failure, int exit_code);

}  // namespace bdl::harness
