#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hpz/error.hpp"

namespace hpz::cli {

namespace {

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

const nlohmann::json* find(const nlohmann::json& j, const std::string& path, const char* key, bool required) {
    if (!j.contains(key)) {
        if (required) throw ConfigError("missing required key '" + join(path, key) + "'");
        return nullptr;
    }
    return &j.at(key);
}

bool bool_field(const nlohmann::json& j, const std::string& path, const char* key, bool fallback) {
    const auto* v = find(j, path, key, false);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError("key '" + join(path, key) + "' must be true or false");
    return v->get<bool>();
}

const nlohmann::json& object_field(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_object()) throw ConfigError(std::string("key '") + key + "' must be an object");
    return v;
}

}  // namespace

double number_field(const nlohmann::json& j, const std::string& path, const char* key, std::optional<double> fallback) {
    const auto* v = find(j, path, key, !fallback);
    if (!v) return *fallback;
    if (!v->is_number()) throw ConfigError("key '" + join(path, key) + "' must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError("key '" + join(path, key) + "' must be finite");
    return x;
}

int integer_field(const nlohmann::json& j, const std::string& path, const char* key, std::optional<int> fallback) {
    const auto* v = find(j, path, key, !fallback);
    if (!v) return *fallback;
    if (!v->is_number_integer()) throw ConfigError("key '" + join(path, key) + "' must be an integer");
    return v->get<int>();
}

std::string string_field(const nlohmann::json& j, const std::string& path, const char* key,
                         std::optional<std::string> fallback) {
    const auto* v = find(j, path, key, !fallback);
    if (!v) return *fallback;
    if (!v->is_string()) throw ConfigError("key '" + join(path, key) + "' must be a string");
    return v->get<std::string>();
}

void reject_unknown(const nlohmann::json& j, const std::string& path, const std::vector<std::string>& known) {
    if (!j.is_object()) throw ConfigError("'" + (path.empty() ? std::string("config") : path) + "' must be an object");
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown key '" + join(path, key.c_str()) + "'");
}

std::vector<double> TimeGrid::points() const {
    std::vector<double> out(n_points);
    for (int k = 0; k < n_points; ++k) {
        const double u = static_cast<double>(k) / (n_points - 1);
        out[k] = log_spacing ? t_start * std::pow(t_end / t_start, u) : t_start + (t_end - t_start) * u;
    }
    out.back() = t_end;
    return out;
}

ScenarioSpec parse_scenario(const nlohmann::json& j) {
    reject_unknown(j, "", {"name", "physical", "state", "time_grid", "output", "seed", "divergence", "cat", "validate"});
    ScenarioSpec s;
    s.echo = j;
    s.name = string_field(j, "", "name", std::string("unnamed"));

    if (!j.contains("physical")) throw ConfigError("missing required key 'physical'");
    try {
        s.physical = config_from_json(object_field(j, "physical"));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("physical: ") + e.what());
    }

    if (j.contains("state")) {
        const auto& st = object_field(j, "state");
        reject_unknown(st, "state", {"kind", "x0", "sigma", "d", "thermal"});
        const auto kind = string_field(st, "state", "kind", std::string("gaussian"));
        const double sigma = number_field(st, "state", "sigma", 1.0);
        const bool thermal = bool_field(st, "state", "thermal", false);
        if (kind == "gaussian")
            s.state = InitialState::gaussian(number_field(st, "state", "x0", 0.0), sigma, thermal);
        else if (kind == "cat")
            s.state = InitialState::cat(number_field(st, "state", "d", std::nullopt), sigma, thermal);
        else
            throw ConfigError("key 'state.kind' must be \"gaussian\" or \"cat\", got \"" + kind + "\"");
        try {
            s.state.validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("state: ") + e.what());
        }
    }

    if (j.contains("time_grid")) {
        const auto& tg = object_field(j, "time_grid");
        reject_unknown(tg, "time_grid", {"t_start", "t_end", "n_points", "spacing"});
        s.time.t_start = number_field(tg, "time_grid", "t_start", 0.0);
        s.time.t_end = number_field(tg, "time_grid", "t_end", std::nullopt);
        s.time.n_points = integer_field(tg, "time_grid", "n_points", std::nullopt);
        const auto spacing = string_field(tg, "time_grid", "spacing", std::string("linear"));
        if (spacing != "linear" && spacing != "log")
            throw ConfigError("key 'time_grid.spacing' must be \"linear\" or \"log\"");
        s.time.log_spacing = spacing == "log";
        if (!(s.time.t_start >= 0.0)) throw ConfigError("key 'time_grid.t_start' must be >= 0");
        if (!(s.time.t_end > s.time.t_start)) throw ConfigError("key 'time_grid.t_end' must exceed t_start");
        if (s.time.n_points < 2) throw ConfigError("key 'time_grid.n_points' must be >= 2");
        if (s.time.log_spacing && !(s.time.t_start > 0.0))
            throw ConfigError("key 'time_grid.t_start' must be > 0 for log spacing");
    }

    if (j.contains("output")) {
        const auto& out = object_field(j, "output");
        reject_unknown(out, "output", {"density"});
        if (out.contains("density")) {
            const auto& d = object_field(out, "density");
            reject_unknown(d, "output.density", {"x_min", "x_max", "n_points"});
            DensitySlice slice;
            slice.x_min = number_field(d, "output.density", "x_min", std::nullopt);
            slice.x_max = number_field(d, "output.density", "x_max", std::nullopt);
            slice.n_points = integer_field(d, "output.density", "n_points", 101);
            if (!(slice.x_max > slice.x_min) || slice.n_points < 2)
                throw ConfigError("key 'output.density' needs x_max > x_min and n_points >= 2");
            s.density = slice;
        }
    }

    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_unsigned()) throw ConfigError("key 'seed' must be a non-negative integer");
        s.seed = v.get<std::uint64_t>();
    }
    for (const char* key : {"divergence", "cat", "validate"})
        if (j.contains(key)) {
            const auto& v = object_field(j, key);
            if (std::string(key) == "divergence") s.divergence = v;
            else if (std::string(key) == "cat") s.cat = v;
            else s.validate = v;
        }
    return s;
}

ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset -> line and column
        const std::size_t at = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
        const std::size_t line = 1 + std::count(text.begin(), text.begin() + at, '\n');
        const std::size_t nl = text.rfind('\n', at ? at - 1 : 0);
        const std::size_t col = nl == std::string::npos || at == 0 ? at + 1 : at - nl;
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                          e.what() + ")");
    }
    return parse_scenario(j);
}

}  // namespace hpz::cli
