// Experiment runner: config-driven data generation, training, layer-wise
// defrosting, compliant-learning sweeps and representation-similarity curves.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "defrost/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"defrost: layer-wise defrosting experiments for transfer learning"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::string out = ".";
    std::size_t jobs = 1;
  };

  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"gen", "generate a reference dataset and its clones"},
      {"train", "train a network on a dataset"},
      {"defrost", "build a defrosting profile or run a budget-limited probe"},
      {"compliant", "sweep the elastic coupling strength"},
      {"similarity", "layer-wise representation-similarity curves"},
  };

  std::map<std::string, SubArgs> args;
  for (const auto& [name, description] : kinds) {
    CLI::App* sub = app.add_subcommand(name, description);
    SubArgs& a = args[name];
    sub->add_option("--config", a.config, "experiment config (JSON)")->required();
    sub->add_option("--out", a.out, "output directory (default: current)");
    sub->add_option("--jobs", a.jobs, "max concurrent training cells");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are config errors
  }

  for (const auto& [name, a] : args)
    if (app.got_subcommand(name))
      return defrost::run_experiment(a.config, a.out, a.jobs, name);
  return 1;
}
