#ifndef TWOATOM_APP_COMMANDS_HPP
#define TWOATOM_APP_COMMANDS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "twoatom/cli_io.hpp"

namespace twoatom::app {

struct CommandResult {
  std::vector<cli::OutputFile> files;
  std::vector<std::string> summary;  // human-readable lines
};

CommandResult cmd_rates(const cli::RunConfig& cfg, unsigned workers);
CommandResult cmd_simulate(const cli::RunConfig& cfg, unsigned workers);
CommandResult cmd_decay(const cli::RunConfig& cfg, unsigned workers);
CommandResult cmd_coherent(const cli::RunConfig& cfg, unsigned workers);
CommandResult cmd_optimize(const cli::RunConfig& cfg, unsigned workers);

std::vector<std::string> preset_names();
cli::json load_preset(const std::string& name);

struct Invocation {
  std::string command;
  std::string config_path;
  std::string preset;
  std::filesystem::path out_dir = ".";
  unsigned workers = 1;
  std::vector<std::string> overrides;
};

/// Builds and validates the configuration, runs the command, writes its
/// files and returns the process exit code. Nothing is written unless the
/// whole command succeeds.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace twoatom::app

#endif
