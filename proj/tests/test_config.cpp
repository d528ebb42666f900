#include <doctest.h>

#include <string>

#include "hpz/config.hpp"
#include "hpz/error.hpp"

using namespace hpz;
using nlohmann::json;

namespace {
json canonical() {
    return json::parse(R"({"mass":1,"spring_constant":0,"bath_kind":"srt","friction":1,
        "relaxation_time":0.1,"cutoff":50,"temperature":10,"regime":"high","hbar":1,"boltzmann":1})");
}
}  // namespace

TEST_CASE("config round trip through JSON") {
    const auto c = config_from_json(canonical());
    CHECK(c.bath.kind == BathKind::SingleRelaxationTime);
    CHECK(c.tau() == 0.1);
    CHECK(c.bath.cutoff == 50.0);
    CHECK(config_to_json(c) == canonical());
}

TEST_CASE("config rejects bad documents") {
    auto missing = canonical();
    missing.erase("friction");
    try {
        config_from_json(missing);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("friction") != std::string::npos);
    }

    auto unknown = canonical();
    unknown["colour"] = "red";
    CHECK_THROWS_AS(config_from_json(unknown), ConfigError);

    auto bad_kind = canonical();
    bad_kind["bath_kind"] = "drude";
    CHECK_THROWS_AS(config_from_json(bad_kind), ConfigError);

    auto complex_roots = canonical();
    complex_roots["relaxation_time"] = 0.5;
    CHECK_THROWS_AS(config_from_json(complex_roots), ConfigError);

    auto zero_regime = canonical();
    zero_regime["regime"] = "zero";
    CHECK_THROWS_AS(config_from_json(zero_regime), ConfigError);

    auto negative_mass = canonical();
    negative_mass["mass"] = -1.0;
    CHECK_THROWS_AS(config_from_json(negative_mass), ConfigError);

    auto ohmic_with_tau = canonical();
    ohmic_with_tau["bath_kind"] = "ohmic";
    CHECK_THROWS_AS(config_from_json(ohmic_with_tau), ConfigError);
}
