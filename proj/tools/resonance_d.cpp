#include <iostream>

#include "CLI11.hpp"
#include "resd/commands.hpp"
#include "resd/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"resonance poles of one-dimensional Schrodinger operators"};
  std::string config_path;
  std::string out_path;
  int threads = 0;
  app.add_option("--config", config_path, "JSON configuration file")
      ->required();
  app.add_option("--threads", threads,
                 "worker threads (default: hardware parallelism)");
  app.add_option("--out", out_path, "output path (overrides the config)");

  struct Sub {
    const char* name;
    const char* desc;
  };
  const Sub subs[] = {
      {"resonances", "locate resonance poles in a k-rectangle"},
      {"scan", "|D| and arg D over a k-grid, CSV"},
      {"evans", "Evans-function comparison at sample points"},
      {"compare", "determinant identities and oracle cross-checks"},
      {"eigenfunction", "eigenfunction samples at a located root"},
      {"project", "Riesz projection through the generalized resolvent"},
      {"oracle", "closed-form reference values"},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.desc)->fallthrough();
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().at(0)->get_name();
  try {
    resd::RunConfig rc = resd::load_config(config_path);
    return resd::run_command(cmd, std::move(rc), threads, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
