// Experiment runner and solver front end.
//
//   med_cli run <config|preset> [--output PATH] [--seed U64] [--runs N]
//                               [--workers N] [--shadow-check]
//   med_cli dmin <points> <probs> <mu> [--r N] [--nu0 X]
//   med_cli presets list
//   med_cli presets show <name>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "med/med.hpp"

namespace {

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" + item + "'");
    }
    out.push_back(x);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum Empirical Divergence bandit experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV results");
  std::string config_path;
  std::string output;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::size_t workers = 1;
  bool shadow = false;
  run->add_option("config", config_path, "JSON config file or bundled preset name")->required();
  run->add_option("--output", output, "CSV output path ('-' for stdout)");
  auto* seed_opt = run->add_option("--seed", seed, "Override the master seed");
  auto* runs_opt = run->add_option("--runs", runs, "Override the number of runs")
                       ->check(CLI::PositiveNumber);
  run->add_option("--workers", workers, "Worker threads (results do not depend on this)")
      ->check(CLI::PositiveNumber);
  run->add_flag("--shadow-check", shadow,
                "Compare cached MED divergences with fresh exact solves every round");

  auto* dmin_cmd = app.add_subcommand("dmin", "Evaluate D_min(F, mu) on [-1, 0]");
  std::string points_text;
  std::string probs_text;
  double mu = 0.0;
  int budget = 50;
  double nu0 = 0.0;
  dmin_cmd->add_option("points", points_text, "Comma-separated support points in [-1, 0]")
      ->required();
  dmin_cmd->add_option("probs", probs_text, "Comma-separated probabilities")->required();
  dmin_cmd->add_option("mu", mu, "Mean threshold (<= 0)")->required();
  dmin_cmd->add_option("--r", budget, "Iteration budget")->check(CLI::PositiveNumber);
  dmin_cmd->add_option("--nu0", nu0, "Warm start")->check(CLI::NonNegativeNumber);

  auto* presets = app.add_subcommand("presets", "Bundled experiment configs");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List bundled presets");
  auto* presets_show = presets->add_subcommand("show", "Print a preset's JSON");
  std::string preset_name;
  presets_show->add_option("name", preset_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = med::load_config(config_path);
      if (*seed_opt) config.seed = seed;
      if (*runs_opt) config.runs = runs;
      if (output.empty()) output = config.output;
      if (output.empty()) output = "-";

      const auto result = med::run_experiment(config, {workers, shadow});
      const auto summary = med::emit_summary(result);
      if (output == "-") {
        med::write_csv(result.rows, std::cout);
        std::cout.flush();
        if (!std::cout) throw std::runtime_error("write to stdout failed");
        std::cerr << summary;
      } else {
        med::emit_csv(result.rows, output);
        std::cout << summary << "wrote " << result.rows.size() << " rows to " << output << '\n';
      }
    } else if (*dmin_cmd) {
      auto pts = parse_list(points_text, "points");
      auto pr = parse_list(probs_text, "probs");
      const med::FiniteDistribution F(std::move(pts), std::move(pr), -1.0, 0.0);
      const auto res = med::dmin(F, mu, {budget, nu0});
      std::cout << "value " << med::format_double(res.value) << '\n'
                << "nu_star " << med::format_double(res.nu_star) << '\n';
    } else if (*presets_list) {
      for (const auto& p : med::kPresets) std::cout << p.name << "  " << p.description << '\n';
    } else if (*presets_show) {
      const auto* p = med::find_preset(preset_name);
      if (!p) {
        std::cerr << "error: unknown preset '" << preset_name << "'\n";
        return 2;
      }
      std::cout << p->json << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
