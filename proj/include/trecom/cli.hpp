#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trecom/config.hpp"
#include "trecom/graph.hpp"

namespace trecom {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitRuntime = 3 };

// Writes the cleaned graph to `output` and the merge report (JSON) to `report`.
void cmd_preprocess(const std::filesystem::path& input, const std::filesystem::path& output,
                    const std::filesystem::path& report, const MergeOptions& options);

// Builds the gamma = 0 reservoir into cfg.out / cfg.reservoir_path.
std::size_t cmd_reservoir(const RunConfig& cfg, std::ostream& log);

// Tempered run; the top rung (or every rung) goes to cfg.out/ensemble.jsonl.
// With `resume`, continues from cfg.out/checkpoint.json up to cfg.steps.
std::size_t cmd_temper(const RunConfig& cfg, bool resume, std::ostream& log);

// Single chain at cfg.sample_gamma into cfg.out/ensemble.jsonl.
std::size_t cmd_sample(const RunConfig& cfg, bool resume, std::ostream& log);

// Analysis tables and manifest into `tables_out`.
void cmd_analyze(const RunConfig& cfg, const std::filesystem::path& ensemble,
                 const std::vector<std::filesystem::path>& compare, const std::filesystem::path& tables_out,
                 std::ostream& log);

// Full command line (argv[0] excluded). Returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trecom
