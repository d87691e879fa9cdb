// Command-line front end: classify coefficient systems, construct
// geometric solutions with annotated singular points, and check residual
// gates on stored surfaces.
//
// Exit codes: 0 ok, 1 usage, 2 math-gate failure, 3 numeric failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmae/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMathGate = 2;
constexpr int kExitNumeric = 3;

gmae::RunConfig load_config(const std::string& path,
                            const std::vector<std::string>& overrides) {
  gmae::RunConfig cfg = gmae::load_run_config(path);
  for (const auto& o : overrides) gmae::apply_tolerance_override(cfg, o);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometric solutions of quasilinear Monge-Ampere pairs"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> surface_csv;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")
        ->required();
    cmd->add_option("--tolerance-override", overrides,
                    "override a tolerance, e.g. eps_zero=1e-8");
  };

  CLI::App* cmd_classify =
      app.add_subcommand("classify", "classification report for a system");
  add_common(cmd_classify);

  CLI::App* cmd_solve =
      app.add_subcommand("solve", "construct a surface and classify its "
                                  "singular points; writes CSV/OBJ/report");
  add_common(cmd_solve);

  CLI::App* cmd_verify =
      app.add_subcommand("verify", "residual gates on a surface");
  add_common(cmd_verify);
  std::string surface_arg;
  cmd_verify->add_option("--surface", surface_arg,
                         "previously written surface CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const gmae::RunConfig cfg = load_config(config_path, overrides);
    if (cmd_classify->parsed()) {
      const gmae::ClassifyOutcome out = gmae::run_classify(cfg);
      std::cout << out.report_text;
      gmae::write_text(cfg.out_report, out.report_text);
      return kExitOk;
    }
    if (cmd_solve->parsed()) {
      const gmae::SolveArtifacts art = gmae::run_solve_and_write(cfg);
      std::cout << art.report_text;
      return kExitOk;
    }
    if (!surface_arg.empty()) surface_csv = surface_arg;
    const gmae::VerifyOutcome out = gmae::run_verify(cfg, surface_csv);
    std::cout << out.report_text;
    return out.pass ? kExitOk : kExitMathGate;
  } catch (const gmae::GateError& e) {
    std::cerr << "gate failure: " << e.what() << "\n";
    return kExitMathGate;
  } catch (const gmae::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gmae::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const gmae::EvalError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
