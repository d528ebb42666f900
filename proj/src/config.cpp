#include "hpz/config.hpp"

#include <cmath>
#include <set>

#include "hpz/error.hpp"

namespace hpz {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void PhysicalConfig::validate() const {
    if (!finite_positive(oscillator.mass)) throw ConfigError("mass must be > 0");
    if (!(oscillator.spring_constant >= 0.0) || !std::isfinite(oscillator.spring_constant))
        throw ConfigError("spring_constant must be >= 0");
    if (!finite_positive(bath.friction)) throw ConfigError("friction must be > 0");
    if (!(bath.cutoff >= 0.0) || !std::isfinite(bath.cutoff))
        throw ConfigError("cutoff must be >= 0 (0 disables the cutoff)");
    if (bath.kind == BathKind::Ohmic && bath.relaxation_time != 0.0)
        throw ConfigError("relaxation_time must be 0 for an Ohmic bath");
    if (bath.kind == BathKind::SingleRelaxationTime) {
        if (!finite_positive(bath.relaxation_time))
            throw ConfigError("relaxation_time must be > 0 for the single-relaxation-time bath");
        if (4.0 * bath.friction * bath.relaxation_time / oscillator.mass > 1.0)
            throw ConfigError(
                "4 friction relaxation_time / mass > 1: complex relaxation roots are not supported");
    }
    if (!(thermal.temperature >= 0.0) || !std::isfinite(thermal.temperature))
        throw ConfigError("temperature must be >= 0");
    if (thermal.regime == Regime::ZeroTemperature && thermal.temperature != 0.0)
        throw ConfigError("regime 'zero' requires temperature = 0");
    if (thermal.regime == Regime::HighTemperature && thermal.temperature <= 0.0)
        throw ConfigError("regime 'high' requires temperature > 0");
    if (!finite_positive(units.hbar)) throw ConfigError("hbar must be > 0");
    if (!finite_positive(units.boltzmann)) throw ConfigError("boltzmann must be > 0");
}

PhysicalConfig ohmic_config(double mass, double friction, double kT, Regime regime,
                            double spring) {
    PhysicalConfig c;
    c.oscillator = {mass, spring};
    c.bath = {BathKind::Ohmic, friction, 0.0, 0.0};
    c.thermal = {regime == Regime::ZeroTemperature ? 0.0 : kT, regime};
    c.validate();
    return c;
}

PhysicalConfig srt_config(double mass, double friction, double tau, double kT, Regime regime,
                          double spring) {
    PhysicalConfig c;
    c.oscillator = {mass, spring};
    c.bath = {BathKind::SingleRelaxationTime, friction, tau, 0.0};
    c.thermal = {regime == Regime::ZeroTemperature ? 0.0 : kT, regime};
    c.validate();
    return c;
}

std::string to_string(BathKind k) { return k == BathKind::Ohmic ? "ohmic" : "srt"; }

std::string to_string(Regime r) {
    switch (r) {
        case Regime::HighTemperature: return "high";
        case Regime::ZeroTemperature: return "zero";
        case Regime::Exact: return "exact";
    }
    return "?";
}

PhysicalConfig config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {
        "mass",        "spring_constant", "bath_kind", "friction", "relaxation_time",
        "cutoff",      "temperature",     "regime",    "hbar",     "boltzmann"};
    static const std::set<std::string> required = {"mass", "bath_kind", "friction",
                                                   "temperature", "regime"};
    if (!j.is_object()) throw ConfigError("physical config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in physical config");
    for (const auto& key : required)
        if (!j.contains(key)) throw ConfigError("missing required key '" + key + "'");

    auto number = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(key);
        if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
        return v.get<double>();
    };
    auto text = [&](const char* key) {
        const auto& v = j.at(key);
        if (!v.is_string()) throw ConfigError(std::string("key '") + key + "' must be a string");
        return v.get<std::string>();
    };

    PhysicalConfig c;
    c.oscillator.mass = number("mass", 1.0);
    c.oscillator.spring_constant = number("spring_constant", 0.0);
    const auto kind = text("bath_kind");
    if (kind == "ohmic")
        c.bath.kind = BathKind::Ohmic;
    else if (kind == "srt")
        c.bath.kind = BathKind::SingleRelaxationTime;
    else
        throw ConfigError("key 'bath_kind' must be \"ohmic\" or \"srt\", got \"" + kind + "\"");
    c.bath.friction = number("friction", 1.0);
    c.bath.relaxation_time = number("relaxation_time", 0.0);
    c.bath.cutoff = number("cutoff", 0.0);
    c.thermal.temperature = number("temperature", 0.0);
    const auto regime = text("regime");
    if (regime == "high")
        c.thermal.regime = Regime::HighTemperature;
    else if (regime == "zero")
        c.thermal.regime = Regime::ZeroTemperature;
    else if (regime == "exact")
        c.thermal.regime = Regime::Exact;
    else
        throw ConfigError("key 'regime' must be \"high\", \"zero\" or \"exact\", got \"" + regime +
                          "\"");
    c.units.hbar = number("hbar", 1.0);
    c.units.boltzmann = number("boltzmann", 1.0);
    c.validate();
    return c;
}

nlohmann::json config_to_json(const PhysicalConfig& c) {
    return {{"mass", c.oscillator.mass},
            {"spring_constant", c.oscillator.spring_constant},
            {"bath_kind", to_string(c.bath.kind)},
            {"friction", c.bath.friction},
            {"relaxation_time", c.bath.relaxation_time},
            {"cutoff", c.bath.cutoff},
            {"temperature", c.thermal.temperature},
            {"regime", to_string(c.thermal.regime)},
            {"hbar", c.units.hbar},
            {"boltzmann", c.units.boltzmann}};
}

}  // namespace hpz
