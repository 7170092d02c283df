// Command-line front end: lindflow <command> --config <path> [--out <dir>] [--tol <float>]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lindflow/io.hpp"
#include "lindflow/runner.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<double> tol;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "model config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", args.out, "output directory");
  sub->add_option("--tol", args.tol, "override every tolerance")->check(CLI::PositiveNumber);
}

int execute(const CommonArgs& args, const std::vector<std::string>& commands) {
  lindflow::cli::ModelConfig cfg;
  try {
    cfg = lindflow::cli::load_config(args.config);
  } catch (const lindflow::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (args.tol) lindflow::cli::override_tolerances(cfg, *args.tol);

  lindflow::cli::RunOptions opts;
  if (!args.out.empty()) opts.out_dir = std::filesystem::path(args.out);
  try {
    const auto report = lindflow::cli::run(cfg, commands, opts);
    if (!opts.out_dir) std::cout << report.body.dump(2) << '\n';
    for (const auto& [name, out] : report.body["commands"].items()) {
      const std::string status = out.value("status", "");
      std::cerr << name << ": " << status;
      if (out.contains("error")) std::cerr << " (" << out["error"].get<std::string>() << ")";
      std::cerr << '\n';
    }
    return report.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lindblad dynamics as gradient flow"};
  app.set_version_flag("--version", std::string(lindflow::kVersion));
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<std::string> selected;
  for (const char* name : lindflow::cli::kCommandOrder) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
    add_common(sub, args);
    sub->callback([&selected, name] { selected = {name}; });
  }

  auto* all = app.add_subcommand("run", "run the command list stored in the config");
  add_common(all, args);
  bool use_config_list = false;
  all->callback([&use_config_list] { use_config_list = true; });

  std::size_t basis_dim = 0;
  std::string basis_out;
  auto* basis = app.add_subcommand("basis", "export su(D) structure tensors f and d");
  basis->add_option("--dim", basis_dim, "Hilbert space dimension D")->required()->check(CLI::Range(2, 64));
  basis->add_option("--out", basis_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (basis->parsed()) {
    const auto doc = lindflow::io::structure_tensors_to_json(lindflow::generate_basis(basis_dim)).dump(2);
    if (basis_out.empty()) {
      std::cout << doc << '\n';
    } else {
      std::ofstream(basis_out) << doc << '\n';
    }
    return 0;
  }

  if (use_config_list) {
    lindflow::cli::ModelConfig cfg;
    try {
      cfg = lindflow::cli::load_config(args.config);
    } catch (const lindflow::cli::ConfigError& e) {
      std::cerr << e.what() << '\n';
      return 2;
    }
    if (cfg.commands.empty()) {
      std::cerr << "config has no \"commands\" list\n";
      return 2;
    }
    return execute(args, cfg.commands);
  }
  return execute(args, selected);
}
