#include "hiercon/powershare.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace hiercon {

double GeneratorFleet::total_initial() const {
    double sum = 0.0;
    for (const auto& g : generators) {
        sum += g.p_init;
    }
    return sum;
}

void validate_fleet(const GeneratorFleet& fleet) {
    if (fleet.generators.empty()) {
        throw DomainError("fleet has no generators");
    }
    for (std::size_t i = 0; i < fleet.generators.size(); ++i) {
        const auto& g = fleet.generators[i];
        if (!(g.p_max > 0.0) || !std::isfinite(g.p_max)) {
            throw DomainError("generator " + std::to_string(i + 1) + ": p_max must be positive");
        }
        if (!(g.p_init >= 0.0) || !(g.p_init <= g.p_max)) {
            throw DomainError("generator " + std::to_string(i + 1) + ": p_init outside [0, p_max]");
        }
    }
    const double deficit = fleet.total_demand() - fleet.total_initial();
    if (!(std::abs(deficit) <= kBalanceTol)) {
        std::ostringstream os;
        os.precision(12);
        os << "fleet out of balance: demand exceeds initial output by " << deficit << " MW";
        throw DomainError(os.str());
    }
}

PowerScenario build_scenario(const GeneratorFleet& fleet, const HierarchySpec& topology) {
    validate_fleet(fleet);
    const auto n = fleet.generators.size();
    if (topology.physical_count() != n) {
        throw DomainError("topology has " + std::to_string(topology.physical_count()) + " physical nodes for " +
                          std::to_string(n) + " generators");
    }
    PowerScenario out;
    out.spec = topology;
    out.spec.physical_weights.clear();
    out.x0.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = fleet.generators[i];
        out.spec.physical_weights.push_back(g.p_max);
        out.x0(static_cast<Eigen::Index>(i)) = g.p_init / g.p_max;
    }
    return out;
}

PowerReport power_report(const Trajectory& traj, const GeneratorFleet& fleet) {
    const auto n = static_cast<Eigen::Index>(fleet.generators.size());
    Vector capacity(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        capacity(i) = fleet.generators[static_cast<std::size_t>(i)].p_max;
    }
    PowerReport r;
    r.classification = traj.classification;
    if (traj.states.empty()) {
        return r;
    }
    if (traj.states.back().size() != n) {
        throw DomainError("trajectory dimension does not match the fleet size");
    }
    r.final_ratio = traj.states.back();
    r.final_powers = capacity.cwiseProduct(r.final_ratio);
    const double demand = fleet.total_demand();
    for (const auto& x : traj.states) {
        r.balance_max_dev = std::max(r.balance_max_dev, std::abs(capacity.dot(x) - demand));
    }
    return r;
}

GeneratorFleet fig1_fleet() {
    GeneratorFleet f;
    f.generators = {{0.8, 0.24}, {0.7, 0.56}, {1.5, 0.9}, {1.0, 0.9}, {0.8, 0.56}, {1.2, 0.24}};
    f.demand = 3.4;
    return f;
}

}  // namespace hiercon
