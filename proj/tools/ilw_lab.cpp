// ilw-lab: desk-scale experiments for the ILW / BO family.
//
//   ilw-lab <command> [--config FILE] [--key value ...]
//
// Exit codes: 0 pass, 1 usage, 2 numerical failure, 3 failed check.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ilw/experiments.hpp"

namespace {

struct KeyHelp {
  const char* key;
  const char* help;
};

constexpr KeyHelp kKeys[] = {
    {"equation", "ilw or bo (simulate)"},
    {"frame", "original or renormalized"},
    {"delta", "depth"},
    {"delta1", "first depth (twodepth)"},
    {"delta2", "second depth (twodepth)"},
    {"c1", "first dispersion weight (twodepth)"},
    {"c2", "second dispersion weight (twodepth)"},
    {"N", "grid points"},
    {"L", "period"},
    {"dt", "time step"},
    {"T", "final time"},
    {"Xi", "Hardy modes kept in the Lax truncation"},
    {"samples", "recorded states along a trajectory"},
    {"s", "Sobolev index"},
    {"kappa", "spectral parameter or 'auto'"},
    {"epsilon", "loss exponent in the predicted scaling"},
    {"C_s", "constant in the kappa condition"},
    {"seed", "random seed"},
    {"seeds", "number of consecutive seeds"},
    {"amplitude", "random field amplitude"},
    {"band", "highest random mode"},
    {"decay", "random field decay exponent"},
    {"deltas", "comma-separated depth sweep"},
    {"a_deltas", "comma-separated a*delta sweep (illposed)"},
    {"a_delta", "a*delta of the periodic wave (wave)"},
    {"alpha", "mean of the Galilean family (illposed)"},
    {"control", "add BO control runs (gronwall)"},
    {"drift_tol", "allowed relative drift of invariants (simulate)"},
    {"s_pairs", "comma-separated s1:s2 pairs (smoothing)"},
    {"output_dir", "directory for CSV/JSON artifacts"},
};

const std::map<std::string, std::string> kCommandHelp{
    {"simulate", "evolve random data and track mass and energy"},
    {"wave", "periodic traveling wave: residual, Poisson summation, rigid translation"},
    {"beta", "resolvent functional and its kappa-weighted integral for one field"},
    {"gronwall", "growth rate of beta_s along ILW across a depth sweep"},
    {"illposed", "traveling-wave family approaching a delta comb"},
    {"smoothing", "measured versus bound for the Q_delta smoothing estimate"},
    {"twodepth", "two-depth flow against its deep-water limit"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ILW / BO desk-scale experiments"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::map<std::string, Sub> subs;
  for (const auto& [name, cmd] : ilw::lab::command_table()) {
    auto& s = subs[name];
    s.app = app.add_subcommand(name, kCommandHelp.at(name));
    s.app->add_option("--config", s.config, "key = value config file")->check(CLI::ExistingFile);
    for (const auto& k : kKeys) s.options[k.key] = s.app->add_option(std::string("--") + k.key, s.values[k.key], k.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      ilw::lab::KeyValues flags;
      for (const auto& [k, opt] : s.options)
        if (opt->count() > 0) flags[k] = s.values[k];
      std::optional<ilw::lab::ConfigText> file;
      if (!s.config.empty()) file = ilw::lab::parse_config_file(s.config);
      const auto cfg = ilw::lab::resolve_config(ilw::lab::parse_command(name), file ? &*file : nullptr, flags);
      return ilw::lab::run(cfg, std::cout);
    }
  } catch (const ilw::ContractError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
