// Command-line front end: config documents, result export and subcommands.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vcsim/sim.hpp"

namespace vcsim::cli {

inline constexpr std::string_view kToolName = "vcsim";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_runtime = 3 };

// Config documents use flat keys named after ScenarioConfig fields.
nlohmann::json config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const nlohmann::json& doc);

/// Parses a config document or a run manifest (its "config" member).
/// Syntax errors carry line and column.
nlohmann::json read_config_document(const std::filesystem::path& path);

/// Applies "key=value" to a config document; the value is read as JSON
/// when possible, otherwise as a string. Nested keys use dots.
void apply_override(nlohmann::json& doc, std::string_view assignment);

std::string format_double(double v);

/// Writes rewards.csv, elections.csv and trust.csv; returns the file names.
std::vector<std::string> write_simulation(const ExperimentResult& result,
                                          const std::filesystem::path& dir);

struct Manifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
};

nlohmann::json manifest_to_json(const Manifest& m);
void write_manifest(const Manifest& m, const std::filesystem::path& dir);
std::string utc_timestamp();

/// Writes a CSV file with a header row and LF line endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Directory holding the canned scenario documents.
std::filesystem::path default_scenario_dir();

/// Names accepted by `reproduce`.
const std::vector<std::string>& reproduce_targets();

/// Runs one reproduce target into out_dir and returns the files written.
std::vector<std::string> reproduce(const std::string& target,
                                   const std::filesystem::path& scenario_dir,
                                   const std::filesystem::path& out_dir,
                                   const std::vector<std::string>& overrides,
                                   std::vector<std::string>& warnings, nlohmann::json& config_used);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace vcsim::cli
