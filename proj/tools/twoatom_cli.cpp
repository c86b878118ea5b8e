// Command-line front end: one subcommand per figure family.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char** argv) {
  using twoatom::app::Invocation;

  CLI::App app{"Two-atom excitation by single-photon and coherent pulses"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Invocation inv;
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "Print the shipped presets and exit");

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"rates", "Collective decay rate and Lamb shift versus separation (CSV: kr,gamma12_over_gamma,lambda12_over_gamma)"},
      {"simulate", "One-photon excitation dynamics, hierarchy solver cross-checked by the amplitude model"},
      {"decay", "Vacuum decay from a chosen atomic state, with fitted decay rates"},
      {"coherent", "Excitation by a coherent-state pulse and the peak populations versus separation"},
      {"optimize", "Search envelope families for the largest peak population"},
  };
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", inv.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--preset", inv.preset, "Shipped configuration (fig2 ... fig8, opt_*)");
    sub->add_option("--out", inv.out_dir, "Existing output directory")->capture_default_str();
    sub->add_option("--workers", inv.workers, "Concurrent sweep entries")->capture_default_str();
    sub->add_option("--set", inv.overrides, "Override a configuration key: key=value (value parsed as JSON)");
    sub->callback([&inv, name = std::string(s.name)] { inv.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (list_presets) {
      for (const auto& n : twoatom::app::preset_names()) std::cout << n << '\n';
      return 0;
    }
    app.exit(e);
    return twoatom::cli::validation_failure;
  }
  return twoatom::app::run(inv, std::cout, std::cerr);
}
