#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlscatter/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Scattering experiments for the radial and 3D quintic wave equation"};
  std::string config, out;
  int threads = 1;
  app.add_option("--config", config, "JSON run configuration (schema 1)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (default: the config's out field, else ./out)");
  app.add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", nlscatter::version_string());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : nlscatter::kExitPrecondition;
  }
  return nlscatter::run_config_file(config, out, threads, std::cout);
}
