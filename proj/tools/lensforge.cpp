#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "lensforge/commands.hpp"

namespace {

using Command = int (*)(const lensforge::RunConfig&, const std::filesystem::path&, std::ostream&);

const std::map<std::string, Command> kCommands = {
    {"design", lensforge::run_design},
    {"phase-center", lensforge::run_phase_center},
    {"sweep", lensforge::run_sweep},
    {"pattern", lensforge::run_pattern},
    {"trace", lensforge::run_trace},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lens-antenna gap experiments: design, phase centre, gain sweep, pattern, rays"};
  app.require_subcommand(1, 1);

  std::string config_path;
  bool use_default = false;
  std::string out_dir;
  bool print_config = false;

  for (const auto& [name, fn] : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    auto* cfg = sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_flag("--default", use_default, "run with the built-in defaults")->excludes(cfg);
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_flag("--print-config", print_config, "print the effective configuration as JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lensforge::kExitOk : lensforge::kExitValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (config_path.empty() && !use_default) {
      throw lensforge::ConfigError("", "pass --config <path> or --default");
    }
    lensforge::RunConfig config =
        config_path.empty() ? lensforge::RunConfig{} : lensforge::load_config(config_path);
    if (!out_dir.empty()) config.output.directory = out_dir;
    lensforge::validate(config);
    if (print_config) std::cout << lensforge::config_to_json(config);
    return kCommands.at(name)(config, config.output.directory, std::cout);
  } catch (const lensforge::InvalidInput& e) {
    std::cerr << "lensforge " << name << ": invalid input: " << e.what() << '\n';
    return lensforge::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "lensforge " << name << ": error: " << e.what() << '\n';
    return lensforge::kExitValidation;
  }
}
