#pragma once

// Scenario files and machine-readable reports.
//
// Scenario JSON uses 1-based node indices in edges; everything is converted
// to the 0-based C++ model on parse and back on emit. Unknown keys are
// rejected with a JSON-pointer style location.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hiercon/dde_sim.hpp"
#include "hiercon/delay.hpp"
#include "hiercon/hierarchy.hpp"
#include "hiercon/powershare.hpp"
#include "hiercon/spectral.hpp"

namespace hiercon {

using Json = nlohmann::ordered_json;

/// Malformed document: wrong type, unknown key, missing field, bad index.
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& location, const std::string& message)
        : std::runtime_error(location + ": " + message), location_(location) {}
    [[nodiscard]] const std::string& location() const { return location_; }

private:
    std::string location_;
};

struct SimBlock {
    std::optional<double> step;
    std::optional<double> t_end;
    std::optional<double> tolerance;
    std::optional<std::size_t> sample_stride;
    std::optional<double> window_fraction;
    std::optional<bool> align_activation;
    std::optional<std::vector<double>> initial_state;

    friend bool operator==(const SimBlock&, const SimBlock&) = default;
};

struct OutputBlock {
    std::optional<std::string> csv;
    std::optional<std::string> report;

    friend bool operator==(const OutputBlock&, const OutputBlock&) = default;
};

struct Scenario {
    std::optional<std::string> name;
    std::optional<std::string> description;
    HierarchySpec spec;
    std::optional<GeneratorFleet> fleet;
    std::optional<SimBlock> sim;
    std::optional<OutputBlock> output;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Structural parse. Throws SchemaError. When `physical_weights` is absent
/// and generators are present, the weights are taken from p_max.
[[nodiscard]] Scenario parse_scenario(const Json& doc);
/// Reads and parses a file. Throws std::runtime_error on I/O or JSON syntax
/// errors and SchemaError on schema errors.
[[nodiscard]] Scenario load_scenario(const std::string& path);

[[nodiscard]] Json to_json(const Scenario& s);

/// Semantic checks of the spec, the fleet and the sim block.
[[nodiscard]] ValidationReport validate_scenario(const Scenario& s);

/// Initial state: sim.initial_state, else generator ratios, else the ramp
/// x_i = i / N. `source` receives a short description of which applied.
[[nodiscard]] Vector initial_state(const Scenario& s, std::string* source = nullptr);

/// SimOptions from the sim block, with unset fields at their defaults.
[[nodiscard]] SimOptions sim_options(const Scenario& s);

[[nodiscard]] Json to_json(const SpectralReport& r);
[[nodiscard]] Json to_json(const DelayStabilityReport& r);
[[nodiscard]] Json to_json(const Classification& c);
[[nodiscard]] Json to_json(const PowerReport& r);

/// Trajectory as CSV: header `t,x1..xN,conservation`, 12 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace hiercon
