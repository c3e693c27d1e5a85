#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fastreact/commands.hpp"
#include "fastreact/config.hpp"
#include "fastreact/expression.hpp"

namespace {

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> values;
  size_t begin = 0;
  while (begin <= text.size()) {
    const size_t comma = text.find(',', begin);
    const std::string item =
        text.substr(begin, comma == std::string::npos ? std::string::npos
                                                      : comma - begin);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0')
      throw fastreact::ConfigError("--epsilons: malformed value '" + item +
                                   "'");
    values.push_back(v);
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Implicit finite-volume solver for a three-species "
      "reaction-cross-diffusion system and its fast-reaction limit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string epsilons = "1e-1,1e-2,1e-3";
  std::uint64_t seed = 2024;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "run the full system; writes fields.csv and entropy.csv");
  add_common(simulate);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "run the full system for each eps against the reduced system; "
               "writes sweep.csv");
  add_common(sweep);
  sweep->add_option("--epsilons", epsilons,
                    "comma-separated eps list (default 1e-1,1e-2,1e-3)");

  CLI::App* limit = app.add_subcommand(
      "limit", "run the reduced two-density system; writes fields.csv with "
               "reconstructed species and entropy.csv");
  add_common(limit);

  CLI::App* check = app.add_subcommand(
      "check", "model certificate, structure sampling, and inversion round "
               "trips");
  add_common(check);
  check->add_option("--seed", seed, "seed for the sampled checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fastreact::kExitConfigError;
  }

  try {
    fastreact::RunConfig cfg = fastreact::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (simulate->parsed()) return fastreact::cmd_simulate(cfg);
    if (sweep->parsed()) return fastreact::cmd_sweep(cfg, parse_eps_list(epsilons));
    if (limit->parsed()) return fastreact::cmd_limit(cfg);
    if (check->parsed()) return fastreact::cmd_check(cfg, seed);
  } catch (const fastreact::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fastreact::kExitConfigError;
  } catch (const fastreact::ExpressionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fastreact::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fastreact::kExitConfigError;
  }
  return fastreact::kExitOk;
}
