#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "output.hpp"
#include "scenario.hpp"

namespace hpz::cli {

enum class Format { Csv, Json, Both };

struct RunOptions {
    std::filesystem::path out_dir{"."};
    std::optional<std::uint64_t> seed;  // overrides the config's seed
    unsigned threads{1};
    Format format{Format::Both};
};

struct CommandResult {
    std::vector<Table> tables;
    nlohmann::json summary;
    bool suite_passed{true};
};

const std::vector<std::string>& subcommands();

// Pure computation; throws hpz::Error on invalid input.
CommandResult run_command(const std::string& name, const ScenarioSpec& spec, const RunOptions& options);

// Full run: config -> outputs + summary + manifest in options.out_dir.
// Returns 0 on success, 2 on a failed validation suite, 1 on a config or
// model error (message on `err`).
int execute(const std::string& name, const std::string& config_path, const RunOptions& options, std::ostream& err);

// Column-wise differences of two run directories; throws ConfigError on a
// subcommand or grid mismatch.
nlohmann::json compare_runs(const std::filesystem::path& a, const std::filesystem::path& b);

std::string code_version();

}  // namespace hpz::cli
