#pragma once

#include <string>

#include <json.hpp>

namespace hpz {

enum class BathKind { Ohmic, SingleRelaxationTime };
enum class Regime { HighTemperature, ZeroTemperature, Exact };

struct OscillatorSpec {
    double mass{1.0};
    double spring_constant{0.0};  // 0 means free particle
};

struct BathSpec {
    BathKind kind{BathKind::Ohmic};
    double friction{1.0};         // zeta
    double relaxation_time{0.0};  // tau, 0 for Ohmic
    double cutoff{0.0};           // Omega_c; 0 means "no cutoff"
};

struct ThermalSpec {
    double temperature{1.0};
    Regime regime{Regime::HighTemperature};
};

struct UnitsSpec {
    double hbar{1.0};
    double boltzmann{1.0};
};

struct PhysicalConfig {
    OscillatorSpec oscillator;
    BathSpec bath;
    ThermalSpec thermal;
    UnitsSpec units;

    double m() const { return oscillator.mass; }
    double K() const { return oscillator.spring_constant; }
    double zeta() const { return bath.friction; }
    double tau() const { return bath.relaxation_time; }
    double hbar() const { return units.hbar; }
    double kT() const { return units.boltzmann * thermal.temperature; }
    bool free_particle() const { return oscillator.spring_constant == 0.0; }
    bool has_cutoff() const { return bath.cutoff > 0.0; }
    bool is_ohmic() const { return bath.kind == BathKind::Ohmic; }

    // Throws ConfigError if any invariant is violated.
    void validate() const;
};

// Convenience constructors used throughout the tests and configs.
PhysicalConfig ohmic_config(double mass, double friction, double kT,
                            Regime regime = Regime::HighTemperature, double spring = 0.0);
PhysicalConfig srt_config(double mass, double friction, double tau, double kT,
                          Regime regime = Regime::HighTemperature, double spring = 0.0);

PhysicalConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PhysicalConfig& c);

std::string to_string(BathKind k);
std::string to_string(Regime r);

}  // namespace hpz
