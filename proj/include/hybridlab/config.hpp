#ifndef HYBRIDLAB_CONFIG_HPP
#define HYBRIDLAB_CONFIG_HPP

#include <optional>
#include <string>

#include "hybridlab/scenario.hpp"

namespace hybridlab {

inline constexpr const char* kVersion = "0.1.0";

// Initial data for the evolve-classical command.
struct ClassicalRunConfig {
    PolynomialObservable H;
    std::string initial = "gaussian"; // gaussian | delta
    double center_q = 0.0, center_p = 0.0;
    double sigma_q = 0.5, sigma_p = 0.5;
    double t = 1.0;
    int steps = 1000;
};

// Flat key-value config with [scenario], [grid], [numerics] and an optional
// [classical] section.  Unknown sections and keys are rejected.
struct RunConfig {
    ScenarioConfig scenario;
    std::optional<ClassicalRunConfig> classical;

    static RunConfig parse(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    // Applies a dotted-key override, e.g. "numerics.dt" = "1e-3".
    void set(const std::string& key, const std::string& value);

    // Normalized text form; parse(serialize(x)) == serialize-stable.
    std::string serialize() const;
};

} // namespace hybridlab

#endif
