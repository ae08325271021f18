#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybridnav/environments.hpp"
#include "hybridnav/planner.hpp"
#include "hybridnav/sim.hpp"

namespace hybridnav {

/// A whole test-suite configuration: planner and simulator parameters plus
/// the environment list, parsed from the line-oriented section format.
struct SuiteConfig {
  PlannerConfig planner;
  SimParams sim;
  double timeout = 60.0;     // s per environment
  std::uint64_t seed = 1;
  double sim_rate = 50.0;    // Hz
  double planner_rate = 30.0;
  double cloud_rate = 10.0;
  std::vector<EnvSpec> environments;
};

struct ParseError {
  int line = 0;
  std::string message;
};

struct ParseResult {
  bool ok = false;
  SuiteConfig config;
  ParseError error;
};

ParseResult parse_config_text(const std::string& text);
ParseResult parse_config_file(const std::string& path);

/// Canonical serialization; parse(serialize(parse(x))) is a fixpoint.
std::string serialize_config(const SuiteConfig& config);

enum class ReportFormat { Text, Lines };

struct SuiteResult {
  std::vector<EnvReportEntry> report;
  int exit_code = 1;  // 0 iff every enabled environment succeeded
  std::string report_text;
};

struct RunOptions {
  std::string out_dir;  // per-environment tick logs and map dumps; empty = none
  ReportFormat format = ReportFormat::Text;
};

SuiteResult run_suite(const SuiteConfig& config, const RunOptions& options = {});

/// Render the report; one "env <name> status=<STATUS> t=<seconds>" line per
/// configured environment.
std::string format_report(const SuiteConfig& config,
                          const std::vector<EnvReportEntry>& report, ReportFormat format);

/// Shell-style glob match supporting '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace hybridnav
