#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resilab/errors.hpp"
#include "resilab/reports.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Resilience-sorted event studies and option-implied expected returns"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "resilab 0.1.0");

  std::string config_path;
  std::string out_dir;
  std::string seed;
  bool quiet = false;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "configuration file (key = value lines)");
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the scenario seed");
  app.add_flag("-q,--quiet", quiet, "suppress progress lines");
  app.add_option("-D,--set", overrides, "override one config key (key=value), repeatable");

  std::string figure;
  std::string scenario;
  auto* ingest = app.add_subcommand("ingest", "validate and normalize a returns panel");
  auto* exposures = app.add_subcommand("exposures", "estimate factor exposures");
  auto* event_study =
      app.add_subcommand("event-study", "resilience-sorted event-study return table");
  auto* industry = app.add_subcommand("industry-xs", "industry cross-section table");
  auto* svix_cmd = app.add_subcommand("svix", "option-implied variance indices");
  auto* expret =
      app.add_subcommand("expected-returns", "option-implied expected stock returns");
  auto* figdata = app.add_subcommand("figure-data", "tidy per-figure data series");
  figdata->add_option("figure", figure, "f1, f2, f4, f5, or f6");
  auto* synth = app.add_subcommand("synth", "generate a synthetic scenario");
  synth->add_option("scenario", scenario, "crash, null, or surface");

  CLI11_PARSE(app, argc, argv);

  try {
    using resilab::reports::RunConfig;
    RunConfig cfg =
        config_path.empty() ? RunConfig() : RunConfig::from_file(config_path);
    for (const std::string& kv : overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        throw resilab::Error(resilab::Errc::bad_config,
                             "--set expects key=value, got '" + kv + "'");
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!out_dir.empty()) cfg.set("out", out_dir);
    if (!seed.empty()) cfg.set("seed", seed);
    if (cfg.get("quiet") == "1" || cfg.get("quiet") == "true") quiet = true;
    cfg.validate_files();

    using namespace resilab::reports;
    if (*ingest) {
      cmd_ingest(cfg, std::cout, quiet);
    } else if (*exposures) {
      cmd_exposures(cfg, std::cout, quiet);
    } else if (*event_study) {
      cmd_event_study(cfg, std::cout, quiet);
    } else if (*industry) {
      cmd_industry_xs(cfg, std::cout, quiet);
    } else if (*svix_cmd) {
      cmd_svix(cfg, std::cout, quiet);
    } else if (*expret) {
      cmd_expected_returns(cfg, std::cout, quiet);
    } else if (*figdata) {
      if (figure.empty()) figure = cfg.get("figure", "f1");
      cmd_figure_data(cfg, figure, std::cout, quiet);
    } else if (*synth) {
      if (scenario.empty()) scenario = cfg.get("scenario", "crash");
      cmd_synth(cfg, scenario, std::cout, quiet);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
