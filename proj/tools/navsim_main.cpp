// navsim: run the multi-environment navigation test suite headlessly.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hybridnav/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Headless multi-environment navigation test harness"};

  std::string config_path;
  std::string out_dir;
  std::string filter;
  std::string report_format = "text";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool list_envs = false;

  app.add_option("--config", config_path, "Suite config file")->required();
  app.add_option("--out", out_dir, "Directory for per-environment logs");
  app.add_option("--seed", seed, "Override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--filter", filter,
                 "Only run environments whose name matches this glob");
  app.add_flag("--list-envs", list_envs, "List environment names and exit");
  app.add_option("--report-format", report_format, "Report format: text or lines")
      ->check(CLI::IsMember({"text", "lines"}));

  CLI11_PARSE(app, argc, argv);

  auto parsed = hybridnav::parse_config_file(config_path);
  if (!parsed.ok) {
    std::cerr << config_path << ":" << parsed.error.line << ": " << parsed.error.message
              << "\n";
    return 2;
  }
  hybridnav::SuiteConfig config = parsed.config;
  if (seed_set) config.seed = seed;
  if (!filter.empty()) {
    for (auto& env : config.environments) {
      env.enabled = env.enabled && hybridnav::glob_match(filter, env.name);
    }
  }

  if (list_envs) {
    for (const auto& env : config.environments) std::cout << env.name << "\n";
    return 0;
  }

  hybridnav::RunOptions options;
  options.out_dir = out_dir;
  options.format = report_format == "lines" ? hybridnav::ReportFormat::Lines
                                            : hybridnav::ReportFormat::Text;

  const hybridnav::SuiteResult result = hybridnav::run_suite(config, options);
  std::cout << result.report_text;
  return result.exit_code;
}
