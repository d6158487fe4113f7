#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modquad/commands.hpp"
#include "modquad/metrics.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous modular multirotor analysis and simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "text";
  int jobs = 1;
  unsigned long seed = 0;
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--jobs,-j", jobs, "Configs simulated in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", seed, "Reserved; the simulator is deterministic");

  std::string analyze_cfg;
  auto* analyze = app.add_subcommand("analyze", "Actuation analysis of a structure");
  analyze->add_option("config", analyze_cfg, "Structure config")->required()->check(CLI::ExistingFile);

  std::vector<std::string> sim_cfgs;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Closed-loop simulation to CSV telemetry");
  simulate->add_option("config", sim_cfgs, "Scenario configs")->required()->check(CLI::ExistingFile);
  simulate->add_option("-o,--output", sim_out,
                       "Telemetry file (one config) or directory (several); "
                       "defaults to <config stem>.csv in the working directory");

  std::string metrics_csv;
  double skip = modquad::kDefaultSkip;
  auto* metrics = app.add_subcommand("metrics", "Tracking metrics of a telemetry file");
  metrics->add_option("telemetry", metrics_csv, "Telemetry CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--skip-s", skip, "Transient excluded from the window, s")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : modquad::kExitSchema;
  }

  modquad::configure_logging(std::getenv("MODQUAD_LOG"));
  const auto fmt = format == "json" ? modquad::Format::kJson : modquad::Format::kText;

  if (*analyze) return modquad::cmd_analyze(analyze_cfg, fmt, std::cout, std::cerr);
  if (*metrics) return modquad::cmd_metrics(metrics_csv, skip, fmt, std::cout, std::cerr);

  std::vector<modquad::SimulateJob> batch;
  const bool into_dir = sim_cfgs.size() > 1 || (!sim_out.empty() && fs::is_directory(sim_out));
  if (into_dir && !sim_out.empty()) {
    std::error_code ec;
    fs::create_directories(sim_out, ec);
    if (ec) {
      std::cerr << "error: cannot create " << sim_out << ": " << ec.message() << "\n";
      return modquad::kExitFailure;
    }
  }
  for (const auto& cfg : sim_cfgs) {
    const std::string stem = fs::path(cfg).stem().string() + ".csv";
    std::string out;
    if (!into_dir && !sim_out.empty()) {
      out = sim_out;
    } else {
      out = (fs::path(sim_out.empty() ? "." : sim_out) / stem).string();
    }
    batch.push_back({cfg, out});
  }
  return modquad::cmd_simulate(batch, jobs, fmt, std::cout, std::cerr);
}
