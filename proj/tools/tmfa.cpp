#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tmfa/cli.hpp"

// ---------------------------------------------------------------------------
// tmfa: simulator for a time-modulated nonreciprocal filtering antenna.
// Argument plumbing only; command bodies live in tmfa/cli.hpp.
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"time-modulated nonreciprocal filtering antenna toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool flag_modulated = false;
  bool flag_static = false;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"synth", "synthesize and tune the bandpass ladder, write element values"},
      {"sweep", "frequency sweep of the filter S-parameters"},
      {"pattern", "radiation pattern, principal-plane cuts, impedance table"},
      {"boresight", "boresight gain of the composed device across frequency"},
      {"optimize", "search modulation parameters for maximum isolation"},
      {"oracle-check", "compare the frequency-domain solver with transient integration"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "configuration file (JSON, partial overlays allowed)");
    sub->add_option("--out", out_dir, "output directory, overrides the config");
    CLI::Option* m = sub->add_flag("--modulated", flag_modulated, "force modulation on");
    CLI::Option* s = sub->add_flag("--static", flag_static, "force modulation off");
    m->excludes(s);
    s->excludes(m);
    sub->add_option("--seed", seed, "optimizer start jitter seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tmfa::exit_code::validation;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    tmfa::RunConfig cfg;
    if (!config_path.empty()) cfg = tmfa::load_config(config_path);
    cfg.validate();
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (sub->count("--seed") > 0) cfg.optimizer.seed = seed;

    std::optional<bool> want_mod;
    if (flag_modulated) want_mod = true;
    if (flag_static) want_mod = false;
    return tmfa::run_command(sub->get_name(), cfg, want_mod);
  } catch (const tmfa::ConfigError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return tmfa::exit_code::validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tmfa::exit_code::failure;
  }
}
