// gmol <solve|fit|verify-theorem|report> --config <path> [--out <dir>]
//
// Exit status: 0 success, 1 numeric failure, 2 configuration error.

#include <iostream>

#include "CLI11.hpp"
#include "gmol/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steady Navier-Stokes on star-shaped annuli by the generalized method of lines"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  for (const char* name : {"solve", "fit", "verify-theorem", "report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides 'outputs')");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gmol::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  gmol::RunConfig config;
  try {
    config = gmol::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return gmol::kExitConfig;
  }
  if (!out_dir.empty()) config.outputs = out_dir;
  return gmol::run(command, config, std::cerr);
}
