#pragma once

// Power sharing on a hierarchy of dispatch organizations: each physical node
// is a generator whose state is its output ratio p_i / P_max_i, and whose
// physical weight is P_max_i, so p(t) = diag(P_max) x(t).

#include <optional>
#include <vector>

#include "hiercon/dde_sim.hpp"
#include "hiercon/hierarchy.hpp"

namespace hiercon {

struct Generator {
    double p_max = 1.0;   // MW
    double p_init = 0.0;  // MW

    friend bool operator==(const Generator&, const Generator&) = default;
};

struct GeneratorFleet {
    std::vector<Generator> generators;
    std::optional<double> demand;  // MW; defaults to the initial total output

    [[nodiscard]] double total_initial() const;
    [[nodiscard]] double total_demand() const { return demand.value_or(total_initial()); }

    friend bool operator==(const GeneratorFleet&, const GeneratorFleet&) = default;
};

inline constexpr double kBalanceTol = 1e-9;

/// Throws DomainError on nonpositive capacity, an out-of-range initial output,
/// or a supply-demand imbalance (the message names the deficit).
void validate_fleet(const GeneratorFleet& fleet);

struct PowerScenario {
    HierarchySpec spec;
    Vector x0;
};

/// Copies `topology`, sets its physical weights to the generator capacities
/// and derives the initial ratios.
[[nodiscard]] PowerScenario build_scenario(const GeneratorFleet& fleet, const HierarchySpec& topology);

struct PowerReport {
    Vector final_ratio;
    Vector final_powers;      // MW
    double balance_max_dev = 0.0;  // max_t |sum p(t) - P_D|, MW
    Classification classification;
};

[[nodiscard]] PowerReport power_report(const Trajectory& traj, const GeneratorFleet& fleet);

/// Generator data of the six-node example.
[[nodiscard]] GeneratorFleet fig1_fleet();

}  // namespace hiercon
