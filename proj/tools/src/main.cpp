#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kamforge_tools/runner.hpp"

namespace {

// Write to a sibling temp file, then rename.
bool write_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << text;
    if (!out.flush()) return false;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  return !ec;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kamforge::tools;

  CLI::App app{"kamforge: formal normal forms, small denominators and Lie iterations"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  bool timings = false;
  CLI::App* run = app.add_subcommand("run", "Execute a scenario file and emit a JSON report");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_path, "Write the report here instead of stdout");
  run->add_flag("--timings", timings, "Add wall-clock timings to the report");

  std::uint64_t seed = 0;
  bool mutate = false;
  CLI::App* self = app.add_subcommand("selftest", "Run the invariant suite");
  self->add_option("--seed", seed, "Seed for every random draw");
  self->add_flag("--mutate-bracket-sign", mutate, "Flip the bracket sign inside the checks (test fixture)");
  self->add_option("--out", out_path, "Write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  std::string text;
  int code = 0;
  if (*run) {
    RunOptions opts;
    opts.timings = timings;
    const RunOutcome outcome = run_scenario_file(scenario_path, opts);
    text = dump(outcome.report);
    code = outcome.exit_code;
    if (code != 0 && outcome.report.contains("error")) {
      const auto& e = outcome.report["error"];
      std::cerr << "kamforge: " << e.value("message", "") << "\n";
    }
  } else {
    SelftestOptions opts;
    opts.seed = seed;
    opts.flip_bracket_sign = mutate;
    const json report = selftest(opts);
    text = dump(report);
    code = report.value("all_pass", false) ? 0 : 1;
  }

  if (!out_path.empty()) {
    if (!write_atomic(out_path, text)) {
      std::cerr << "kamforge: cannot write '" << out_path << "'\n";
      return 2;
    }
  } else {
    std::cout << text;
  }
  return code;
}
