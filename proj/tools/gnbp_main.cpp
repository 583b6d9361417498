// gnbp: train and compare feed-forward networks with steepest descent,
// the improved Gauss-Newton method, or Levenberg-Marquardt.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gnbp/cli.hpp"
#include "gnbp/errors.hpp"

namespace {

gnbp::RunConfig load(const std::string& path, const std::optional<std::string>& out,
                     const std::optional<std::uint64_t>& seed) {
  gnbp::RunConfig cfg = gnbp::load_config(path);
  if (out) cfg.output_path = *out;
  if (seed) cfg.train.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feed-forward network training: steepest descent vs. improved Gauss-Newton"};
  app.require_subcommand(1);

  std::string config_path, config_a, config_b;
  std::optional<std::string> out_path, out_a, out_b;
  std::optional<std::uint64_t> seed;

  auto* train = app.add_subcommand("train", "Train one configuration and write its trace CSV");
  train->add_option("--config", config_path, "key=value config file")->required();
  train->add_option("--out", out_path, "trace CSV path (overrides output_path)");
  train->add_option("--seed", seed, "override the config seed");

  auto* cmp = app.add_subcommand("compare", "Run two configurations and tabulate convergence");
  cmp->add_option("--config-a", config_a, "first config file")->required();
  cmp->add_option("--config-b", config_b, "second config file")->required();
  cmp->add_option("--out", out_a, "trace CSV path for the first run");
  cmp->add_option("--out-b", out_b, "trace CSV path for the second run");
  cmp->add_option("--seed", seed, "override the seed of both configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train) return gnbp::run(load(config_path, out_path, seed), std::cout, std::cerr);
    return gnbp::compare(load(config_a, out_a, seed), load(config_b, out_b, seed), std::cout,
                         std::cerr);
  } catch (const gnbp::FileNotFound& e) {
    std::cerr << "error: file not found: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
