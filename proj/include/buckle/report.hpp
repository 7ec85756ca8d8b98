#pragma once

#include "buckle/shape_calculus.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace buckle {

std::string version_string();

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // curve
  std::string curve = "disc";  ///< disc | ellipse | fourier
  double radius = 1.0;
  double semi_a = 1.5, semi_b = 1.0;
  std::vector<double> cos_coeffs;  ///< a_1, a_2, ...
  std::vector<double> sin_coeffs;  ///< b_1, b_2, ...
  double scale = 1.0;
  // mesh and discretization
  double h = 0.1;
  int levels = 3;
  int degree = 2;
  double penalty = 20.0;
  // eigensolver
  double tolerance = 1e-6;
  double shift = 0.0;
  // perturbation field
  std::string field = "mode";  ///< normal | mode | translation
  int mode = 2;                ///< Fourier mode, or the axis (1, 2) of a translation
  double amplitude = 1.0;
  double fd_step = 0.02;
  double fd_step_second = 0.05;
  // run
  std::string out = "out";
  std::uint32_t seed = 20240607u;

  bool operator==(const RunConfig&) const = default;

  /// Mesh size of the finest refinement level.
  double finest_h() const;
};

/// Throws ConfigError when a value is out of range.
void validate(const RunConfig& config);

/// Accepts either a JSON object or "key = value" lines ('#' starts a comment;
/// vectors are space separated). Unknown keys are errors. The result is
/// validated.
RunConfig parse_config(const std::string& text);
std::string config_to_text(const RunConfig& config);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a of the key-per-line form, as 16 hex digits.
std::string config_hash(const RunConfig& config);

BoundaryCurve build_curve(const RunConfig& config);
PerturbationField build_field(const RunConfig& config, const BoundaryCurve& curve);
PipelineOptions build_pipeline(const RunConfig& config);

/// Exit status contract of every command.
enum ExitStatus { exit_ok = 0, exit_failure = 1, exit_input = 2, exit_refused = 3 };

/// A report plus any side files (name -> content) that go next to it.
struct CommandResult {
  int status = exit_ok;
  nlohmann::json report;
  std::map<std::string, std::string> files;
};

/// Report skeleton carrying the command name, version, config and its hash.
nlohmann::json report_header(const std::string& command, const RunConfig& config);

struct LevelRow {
  int level = 0;
  double h = 0.0;
  int nodes = 0;
  int dofs = 0;
  double lambda = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double residual = 0.0;
};

/// header line plus one row per level; the error column is written when
/// reference is finite.
std::string convergence_csv(const std::vector<LevelRow>& rows, double reference);
/// Lambda_h against h, with the reference drawn as a horizontal line when finite.
std::string convergence_svg(const std::vector<LevelRow>& rows, double reference);
/// Lambda(t) samples against the tangent and parabola predicted by the formulas.
std::string variation_svg(const VariationReport& first, const VariationReport* second);

CommandResult cmd_solve(const RunConfig& config);
CommandResult cmd_variations(const RunConfig& config);
CommandResult cmd_psi(const RunConfig& config);
CommandResult cmd_payne(const RunConfig& config);
CommandResult cmd_oracle(const RunConfig& config);

/// Runs a command, turning exceptions into a diagnostic report with the
/// matching exit status.
CommandResult run_guarded(const std::string& command, const RunConfig& config,
                          CommandResult (*fn)(const RunConfig&));

std::string format_double(double x);

}  // namespace buckle
