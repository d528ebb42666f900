#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpz/config.hpp"
#include "hpz/evolution.hpp"

namespace hpz::cli {

struct TimeGrid {
    double t_start{0.0};
    double t_end{1.0};
    int n_points{2};
    bool log_spacing{false};

    std::vector<double> points() const;
};

struct DensitySlice {
    double x_min{-1.0}, x_max{1.0};
    int n_points{101};
};

struct ScenarioSpec {
    std::string name;
    PhysicalConfig physical;
    InitialState state;
    TimeGrid time;
    std::optional<DensitySlice> density;  // x slices of P(x) at t_end
    std::optional<std::uint64_t> seed;
    // subcommand sections, validated by the command that reads them
    nlohmann::json divergence, cat, validate;
    nlohmann::json echo;  // the parsed input
};

// Throws ConfigError naming the offending field.
ScenarioSpec parse_scenario(const nlohmann::json& j);
// Throws ConfigError with line and column for malformed JSON.
ScenarioSpec load_scenario(const std::string& path);

// Typed field access with dotted-path diagnostics.
double number_field(const nlohmann::json& j, const std::string& path, const char* key, std::optional<double> fallback);
int integer_field(const nlohmann::json& j, const std::string& path, const char* key, std::optional<int> fallback);
std::string string_field(const nlohmann::json& j, const std::string& path, const char* key,
                         std::optional<std::string> fallback);
void reject_unknown(const nlohmann::json& j, const std::string& path, const std::vector<std::string>& known);

}  // namespace hpz::cli
