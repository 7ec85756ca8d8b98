#include "buckle/acceptance.hpp"
#include "buckle/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace buckle;

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<int> levels;
  std::optional<std::uint32_t> seed;
  bool single_thread = false;
  bool list = false;
  double tighten = 1.0;
  std::vector<int> criteria;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
}

// Config from --config (or defaults) with command-line overrides applied.
RunConfig load_config(const Flags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream is(flags.config_path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config file " + flags.config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    config = parse_config(ss.str());
  }
  if (flags.out) config.out = *flags.out;
  if (flags.levels) config.levels = *flags.levels;
  if (flags.seed) config.seed = *flags.seed;
  validate(config);
  return config;
}

int emit(const std::string& command, const RunConfig& config, const CommandResult& result) {
  const fs::path dir(config.out);
  fs::create_directories(dir);
  const std::string text = result.report.dump(2) + "\n";
  write_file(dir / (command + (result.status == exit_ok ? ".json" : "_status.json")), text);
  for (const auto& [name, content] : result.files) write_file(dir / name, content);
  (result.status == exit_ok ? std::cout : std::cerr) << text;
  return result.status;
}

int input_error(const std::string& command, const std::string& what) {
  nlohmann::json j{{"command", command}, {"version", version_string()}, {"error", {{"kind", "input"}, {"message", what}}}};
  std::cerr << j.dump(2) << "\n";
  return exit_input;
}

int run_command(const std::string& command, const Flags& flags, CommandResult (*fn)(const RunConfig&)) {
  RunConfig config;
  try {
    config = load_config(flags);
  } catch (const ConfigError& e) {
    return input_error(command, e.what());
  }
  return emit(command, config, run_guarded(command, config, fn));
}

int run_acceptance_command(const Flags& flags) {
  const auto& titles = acceptance_titles();
  if (flags.list) {
    for (size_t i = 0; i < titles.size(); ++i) std::cout << i + 1 << "  " << titles[i] << "\n";
    return exit_ok;
  }
  if (!(flags.tighten > 0.0)) return input_error("acceptance", "--tighten must be positive");
  for (int id : flags.criteria)
    if (id < 1 || id > static_cast<int>(titles.size()))
      return input_error("acceptance", "no criterion " + std::to_string(id));
  AcceptanceOptions options;
  options.tighten = flags.tighten;
  options.on_result = [](const CriterionResult& r) { std::cout << r.line() << std::endl; };
  const auto results = run_acceptance(options, flags.criteria);
  int failed = 0;
  nlohmann::json report{{"command", "acceptance"}, {"version", version_string()}, {"tighten", flags.tighten}};
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : results) {
    failed += r.passed() ? 0 : 1;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
    list.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed()}, {"error", r.error}, {"checks", checks}});
  }
  report["criteria"] = list;
  report["failed"] = failed;
  if (flags.out) {
    fs::create_directories(*flags.out);
    write_file(fs::path(*flags.out) / "acceptance.json", report.dump(2) + "\n");
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? exit_ok : exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Buckling eigenvalue shape calculus toolkit"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config_path, "config file: 'key = value' lines or one JSON object");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--levels", flags.levels, "refinement levels (1..6)");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_flag("--single-thread", flags.single_thread, "run serially (every stage already runs on one thread)");

  auto* solve = app.add_subcommand("solve", "eigenpairs, criticality report and convergence table");
  auto* variations = app.add_subcommand("variations", "first and second variation against finite differences");
  auto* psi = app.add_subcommand("psi", "the test function psi and its energy");
  auto* payne = app.add_subcommand("payne", "buckling eigenvalue against the second Dirichlet eigenvalue");
  auto* oracle = app.add_subcommand("oracle", "analytic values on the disc");
  auto* acceptance = app.add_subcommand("acceptance", "run the acceptance suite");
  acceptance->add_flag("--list", flags.list, "print criterion ids without running");
  acceptance->add_option("--tighten", flags.tighten, "scale all tolerances by this factor (diagnostic)");
  acceptance->add_option("--criteria", flags.criteria, "run only these criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*solve) return run_command("solve", flags, cmd_solve);
    if (*variations) return run_command("variations", flags, cmd_variations);
    if (*psi) return run_command("psi", flags, cmd_psi);
    if (*payne) return run_command("payne", flags, cmd_payne);
    if (*oracle) return run_command("oracle", flags, cmd_oracle);
    if (*acceptance) return run_acceptance_command(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_input;
}
