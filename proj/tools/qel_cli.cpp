// Experiment runner. One subcommand per experiment; every parameter can come
// from a config file (--config, `key = value` lines or a JSON object) or a
// flag, with flags winning.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qel/qel.hpp"

namespace {

struct SubcommandState {
  std::string name;
  std::string config_path;
  std::map<std::string, std::string> flag_params;
  std::string seed;
  std::string out;
  std::string format;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qel::ArgumentError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_param_flag(CLI::App* cmd, SubcommandState& state, const std::string& key,
                    const std::string& help) {
  cmd->add_option_function<std::string>(
      "--" + key,
      [&state, key](const std::string& value) { state.flag_params[key] = value; },
      help);
}

int run_subcommand(const SubcommandState& state) {
  std::map<std::string, std::string> kv;
  if (!state.config_path.empty()) {
    kv = qel::parse_config_text(read_file(state.config_path));
  }
  for (const auto& [key, value] : state.flag_params) kv[key] = value;
  if (!state.seed.empty()) kv["seed"] = state.seed;
  if (!state.out.empty()) kv["out"] = state.out;
  if (!state.format.empty()) kv["format"] = state.format;

  const qel::ExperimentConfig config = qel::finalize_config(kv, state.name);
  qel::run(config);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qel: simple states in large-rank projectors, and what that "
               "means for quantum source coding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qel::version));

  std::vector<SubcommandState> states(6);
  const char* names[6] = {"overlap-check", "find-simple", "entropy",
                          "compression",   "claim-sweep", "deficiency"};
  const char* blurbs[6] = {
      "Monte Carlo mean overlap of Haar samples against a random projector",
      "search for a certified simple state in a random projector's image",
      "von Neumann entropy of a parameterized source",
      "block-coding fidelity against the retained rank",
      "entropy vs. complexity-bound sweep over a source family",
      "randomness deficiency of uniform samples"};

  for (int i = 0; i < 6; ++i) {
    SubcommandState& state = states[i];
    state.name = names[i];
    CLI::App* cmd = app.add_subcommand(names[i], blurbs[i]);
    cmd->add_option("--config", state.config_path,
                    "config file (key = value lines, or a JSON object)");
    cmd->add_option("--seed", state.seed, "master seed (64-bit)");
    cmd->add_option("--out", state.out, "output path (default: stdout)");
    cmd->add_option("--format", state.format, "csv or json (default: csv)");
    if (state.name == "overlap-check") {
      add_param_flag(cmd, state, "n", "qubit count");
      add_param_flag(cmd, state, "rank", "projector rank");
      add_param_flag(cmd, state, "samples", "Monte Carlo samples");
      add_param_flag(cmd, state, "proj_precision", "projector dyadic bits");
    } else if (state.name == "find-simple") {
      add_param_flag(cmd, state, "n", "qubit count");
      add_param_flag(cmd, state, "m", "rank exponent, 0 <= m < n");
      add_param_flag(cmd, state, "d", "confidence parameter");
      add_param_flag(cmd, state, "rank", "projector rank (0 = random)");
      add_param_flag(cmd, state, "precision_bits", "rationalization bits");
      add_param_flag(cmd, state, "proj_precision", "projector dyadic bits");
      add_param_flag(cmd, state, "best_of_n",
                     "1 = scan the full budget for the best overlap");
      add_param_flag(cmd, state, "max_samples", "sample budget cap");
    } else if (state.name == "entropy") {
      add_param_flag(cmd, state, "family", "diag or tilted");
      add_param_flag(cmd, state, "p", "source parameter");
    } else if (state.name == "compression") {
      add_param_flag(cmd, state, "family", "diag or tilted");
      add_param_flag(cmd, state, "p", "source parameter");
      add_param_flag(cmd, state, "k", "block length");
      add_param_flag(cmd, state, "rate", "single rate (bits/symbol)");
      add_param_flag(cmd, state, "rate_min", "rate grid start");
      add_param_flag(cmd, state, "rate_max", "rate grid end");
      add_param_flag(cmd, state, "rate_step", "rate grid step");
    } else if (state.name == "claim-sweep") {
      add_param_flag(cmd, state, "family", "diag or tilted");
      add_param_flag(cmd, state, "p_min", "parameter grid start");
      add_param_flag(cmd, state, "p_max", "parameter grid end");
      add_param_flag(cmd, state, "p_step", "parameter grid step");
      add_param_flag(cmd, state, "k", "block length");
      add_param_flag(cmd, state, "epsilon", "typicality window");
      add_param_flag(cmd, state, "d", "confidence parameter");
      add_param_flag(cmd, state, "n_seeds", "replications per parameter");
      add_param_flag(cmd, state, "precision_bits", "rationalization bits");
    } else if (state.name == "deficiency") {
      add_param_flag(cmd, state, "support_size", "support points");
      add_param_flag(cmd, state, "string_length", "bits per point");
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& state : states) {
      if (app.get_subcommand(state.name)->parsed()) {
        return run_subcommand(state);
      }
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const qel::ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const qel::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
