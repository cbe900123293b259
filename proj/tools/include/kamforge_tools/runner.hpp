#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace kamforge::tools {

using json = nlohmann::json;

std::string version();

struct RunOptions {
  bool timings = false;
};

struct RunOutcome {
  json report;
  int exit_code = 0;  // 0 ok, 1 computational error, 2 schema or input error
};

/// Validates and executes one scenario document.
RunOutcome run_scenario(const json& scenario, const RunOptions& opts = {});
/// Reads the file first; unreadable or unparsable input yields a SchemaError report.
RunOutcome run_scenario_file(const std::string& path, const RunOptions& opts = {});

struct SelftestOptions {
  std::uint64_t seed = 0;
  /// Test fixture: every bracket the checks compute is taken with the opposite sign.
  bool flip_bracket_sign = false;
};

json selftest(const SelftestOptions& opts);

/// Sorted keys, two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace kamforge::tools
