#include "hiercon/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace hiercon {

namespace {

constexpr double kCollectingSumTol = 1e-12;

bool is_connected(const GroupSpec& g) {
    if (g.size <= 1) {
        return true;
    }
    // Union-find over valid edges only; invalid ones are reported separately.
    std::vector<std::size_t> parent(g.size);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::size_t components = g.size;
    for (const auto& e : g.edges) {
        if (e.a >= g.size || e.b >= g.size || e.a == e.b) {
            continue;
        }
        auto ra = find(e.a);
        auto rb = find(e.b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components == 1;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void validate_group(const GroupSpec& g, std::size_t layer, std::size_t group, ValidationReport& out) {
    auto add = [&](std::string field, std::string msg) {
        out.push_back({layer, group, std::move(field), std::move(msg)});
    };
    if (g.size == 0) {
        add("size", "group size must be positive");
        return;
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : g.edges) {
        if (e.a >= g.size || e.b >= g.size) {
            add("edges", "edge (" + std::to_string(e.a + 1) + "," + std::to_string(e.b + 1) +
                             ") out of range for group of size " + std::to_string(g.size));
            continue;
        }
        if (e.a == e.b) {
            add("edges", "self-loop at node " + std::to_string(e.a + 1));
            continue;
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            add("edge_weights", "edge weight " + fmt_double(e.weight) + " is not a positive finite number");
        }
        auto key = std::minmax(e.a, e.b);
        if (!seen.insert(key).second) {
            add("edges", "duplicate edge (" + std::to_string(key.first + 1) + "," +
                             std::to_string(key.second + 1) + ")");
        }
    }
    if (!is_connected(g)) {
        add("edges", "group disconnected");
    }
}

}  // namespace

std::size_t LayerSpec::node_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) {
        n += g.size;
    }
    return n;
}

std::size_t HierarchySpec::physical_count() const {
    return layers.empty() ? 0 : layers.front().node_count();
}

std::string Violation::describe() const {
    std::string s;
    if (layer) {
        s += "layer " + std::to_string(*layer + 1);
    }
    if (group) {
        s += (s.empty() ? "" : ", ") + std::string("group ") + std::to_string(*group + 1);
    }
    if (!s.empty()) {
        s += ": ";
    }
    s += field + ": " + message;
    return s;
}

ValidationReport validate(const HierarchySpec& spec) {
    ValidationReport out;
    const std::size_t M = spec.layers.size();
    if (M == 0) {
        out.push_back({std::nullopt, std::nullopt, "layers", "at least one layer is required"});
        return out;
    }

    for (std::size_t l = 0; l < M; ++l) {
        const auto& layer = spec.layers[l];
        if (layer.groups.empty()) {
            out.push_back({l, std::nullopt, "groups", "layer has no groups"});
        }
        for (std::size_t p = 0; p < layer.groups.size(); ++p) {
            validate_group(layer.groups[p], l, p, out);
        }
        if (l + 1 < M) {
            const std::size_t above = spec.layers[l + 1].node_count();
            if (layer.groups.size() != above) {
                out.push_back({l, std::nullopt, "groups",
                               std::to_string(layer.groups.size()) + " groups but layer " +
                                   std::to_string(l + 2) + " has " + std::to_string(above) + " nodes"});
            }
        } else if (layer.groups.size() != 1) {
            out.push_back({l, std::nullopt, "groups",
                           "top layer must have exactly one group, found " +
                               std::to_string(layer.groups.size())});
        }

        if (!layer.collecting) {
            continue;
        }
        if (l + 1 == M) {
            out.push_back({l, std::nullopt, "collecting", "top layer has no superior node to collect into"});
            continue;
        }
        const auto& rows = *layer.collecting;
        if (rows.size() != layer.groups.size()) {
            out.push_back({l, std::nullopt, "collecting",
                           std::to_string(rows.size()) + " collecting rows for " +
                               std::to_string(layer.groups.size()) + " groups"});
            continue;
        }
        for (std::size_t p = 0; p < rows.size(); ++p) {
            const auto& row = rows[p];
            if (row.size() != layer.groups[p].size) {
                out.push_back({l, p, "collecting",
                               "collecting row has " + std::to_string(row.size()) + " entries for group of size " +
                                   std::to_string(layer.groups[p].size)});
                continue;
            }
            double sum = 0.0;
            bool negative = false;
            for (double c : row) {
                negative = negative || !(c >= 0.0) || !std::isfinite(c);
                sum += c;
            }
            if (negative) {
                out.push_back({l, p, "collecting", "collecting entries must be finite and nonnegative"});
            }
            if (!(std::abs(sum - 1.0) <= kCollectingSumTol)) {
                out.push_back({l, p, "collecting", "collecting row sums to " + fmt_double(sum)});
            }
        }
    }

    const std::size_t n1 = spec.layers.front().node_count();
    if (spec.physical_weights.size() != n1) {
        out.push_back({std::nullopt, std::nullopt, "physical_weights",
                       std::to_string(spec.physical_weights.size()) + " weights for " + std::to_string(n1) +
                           " physical nodes"});
    }
    for (std::size_t i = 0; i < spec.physical_weights.size(); ++i) {
        const double a = spec.physical_weights[i];
        if (!(a > 0.0) || !std::isfinite(a)) {
            out.push_back({std::nullopt, std::nullopt, "physical_weights",
                           "weight " + std::to_string(i + 1) + " = " + fmt_double(a) + " is not positive"});
        }
    }

    if (spec.hop_delays.size() + 1 != M) {
        out.push_back({std::nullopt, std::nullopt, "hop_delays",
                       std::to_string(spec.hop_delays.size()) + " hop delays for " + std::to_string(M) +
                           " layers (expected " + std::to_string(M - 1) + ")"});
    }
    for (std::size_t i = 0; i < spec.hop_delays.size(); ++i) {
        const double d = spec.hop_delays[i];
        if (!(d >= 0.0) || !std::isfinite(d)) {
            out.push_back({std::nullopt, std::nullopt, "hop_delays",
                           "delay " + std::to_string(i + 1) + " = " + fmt_double(d) + " is not a nonnegative number"});
        }
    }
    return out;
}

void require_valid(const HierarchySpec& spec) {
    const auto report = validate(spec);
    if (report.empty()) {
        return;
    }
    std::string msg = "invalid hierarchy:";
    for (const auto& v : report) {
        msg += "\n  " + v.describe();
    }
    throw StructuralError(msg);
}

Matrix group_laplacian(const GroupSpec& group) {
    Matrix L = Matrix::Zero(static_cast<Eigen::Index>(group.size), static_cast<Eigen::Index>(group.size));
    for (const auto& e : group.edges) {
        if (e.a >= group.size || e.b >= group.size || e.a == e.b) {
            throw StructuralError("edge (" + std::to_string(e.a + 1) + "," + std::to_string(e.b + 1) +
                                  ") invalid for group of size " + std::to_string(group.size));
        }
        const auto a = static_cast<Eigen::Index>(e.a);
        const auto b = static_cast<Eigen::Index>(e.b);
        L(a, a) += e.weight;
        L(b, b) += e.weight;
        L(a, b) -= e.weight;
        L(b, a) -= e.weight;
    }
    return L;
}

std::vector<std::vector<std::size_t>> physical_numbers(const HierarchySpec& spec) {
    std::vector<std::vector<std::size_t>> out;
    if (spec.layers.empty()) {
        return out;
    }
    out.emplace_back(spec.layers.front().node_count(), std::size_t{1});
    for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
        const auto& below = out.back();
        std::vector<std::size_t> above;
        std::size_t i = 0;
        for (const auto& g : spec.layers[l].groups) {
            std::size_t n = 0;
            for (std::size_t q = 0; q < g.size; ++q) {
                n += below.at(i++);
            }
            above.push_back(n);
        }
        out.push_back(std::move(above));
    }
    return out;
}

std::vector<Vector> physical_weights_all(const HierarchySpec& spec) {
    for (double a : spec.physical_weights) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw DomainError("physical weight " + fmt_double(a) + " is not positive");
        }
    }
    std::vector<Vector> out;
    out.push_back(Eigen::Map<const Vector>(spec.physical_weights.data(),
                                           static_cast<Eigen::Index>(spec.physical_weights.size())));
    for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
        const auto& below = out.back();
        const auto& groups = spec.layers[l].groups;
        Vector above(static_cast<Eigen::Index>(groups.size()));
        Eigen::Index i = 0;
        for (std::size_t p = 0; p < groups.size(); ++p) {
            double sum = 0.0;
            for (std::size_t q = 0; q < groups[p].size; ++q) {
                if (i >= below.size()) {
                    throw StructuralError("layer " + std::to_string(l + 1) + " groups exceed node count");
                }
                sum += below(i++);
            }
            above(static_cast<Eigen::Index>(p)) = sum;
        }
        out.push_back(std::move(above));
    }
    return out;
}

std::vector<std::vector<double>> effective_collecting(const HierarchySpec& spec, std::size_t layer) {
    if (layer + 1 >= spec.layers.size()) {
        throw StructuralError("layer " + std::to_string(layer + 1) + " has no collecting vectors");
    }
    if (spec.layers[layer].collecting) {
        return *spec.layers[layer].collecting;
    }
    const auto weights = physical_weights_all(spec);
    const auto& a = weights[layer];
    const auto& a_up = weights[layer + 1];
    std::vector<std::vector<double>> rows;
    Eigen::Index i = 0;
    for (std::size_t p = 0; p < spec.layers[layer].groups.size(); ++p) {
        std::vector<double> row;
        for (std::size_t q = 0; q < spec.layers[layer].groups[p].size; ++q) {
            row.push_back(a(i++) / a_up(static_cast<Eigen::Index>(p)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

LayerMatrices assemble(const HierarchySpec& spec) {
    require_valid(spec);
    const std::size_t M = spec.layers.size();

    LayerMatrices m;
    m.physical_numbers = physical_numbers(spec);
    m.physical_weights = physical_weights_all(spec);
    m.layers.resize(M);

    for (std::size_t l = 0; l < M; ++l) {
        const auto& layer = spec.layers[l];
        auto& blk = m.layers[l];
        const auto n = static_cast<Eigen::Index>(layer.node_count());

        blk.laplacian = Matrix::Zero(n, n);
        blk.group_offsets.assign(1, 0);
        for (const auto& g : layer.groups) {
            const auto off = static_cast<Eigen::Index>(blk.group_offsets.back());
            const auto k = static_cast<Eigen::Index>(g.size);
            blk.laplacian.block(off, off, k, k) = group_laplacian(g);
            blk.group_offsets.push_back(blk.group_offsets.back() + g.size);
        }
        blk.inv_weights = m.physical_weights[l].cwiseInverse();

        if (l + 1 < M) {
            const auto groups = static_cast<Eigen::Index>(layer.groups.size());
            const auto rows = effective_collecting(spec, l);
            blk.broadcast = Matrix::Zero(n, groups);
            blk.collect = Matrix::Zero(groups, n);
            for (Eigen::Index p = 0; p < groups; ++p) {
                const auto first = static_cast<Eigen::Index>(blk.group_offsets[static_cast<std::size_t>(p)]);
                for (std::size_t q = 0; q < layer.groups[static_cast<std::size_t>(p)].size; ++q) {
                    const auto i = first + static_cast<Eigen::Index>(q);
                    blk.broadcast(i, p) = 1.0;
                    blk.collect(p, i) = rows[static_cast<std::size_t>(p)][q];
                }
            }
        }

        if (l == 0) {
            blk.broadcast_chain = Matrix::Identity(n, n);
            blk.collect_chain = Matrix::Identity(n, n);
        } else {
            const auto& prev = m.layers[l - 1];
            blk.broadcast_chain = prev.broadcast_chain * prev.broadcast;
            blk.collect_chain = prev.collect * prev.collect_chain;
        }
        blk.effective = blk.broadcast_chain * (blk.inv_weights.asDiagonal() * blk.laplacian) * blk.collect_chain;
    }

    const auto n1 = m.layers.front().effective.rows();
    m.total = Matrix::Zero(n1, n1);
    for (const auto& blk : m.layers) {
        m.total += blk.effective;
    }
    return m;
}

BlockReport block_structure_check(const LayerMatrices& m, double tol) {
    BlockReport report;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& L = m.layers[l].effective;
        const auto& counts = m.physical_numbers[l];
        std::vector<Eigen::Index> start{0};
        for (auto c : counts) {
            start.push_back(start.back() + static_cast<Eigen::Index>(c));
        }

        for (std::size_t i = 0; i < counts.size(); ++i) {
            for (std::size_t j = 0; j < counts.size(); ++j) {
                const auto rows = static_cast<Eigen::Index>(counts[i]);
                const auto cols = static_cast<Eigen::Index>(counts[j]);
                const auto block = L.block(start[i], start[j], rows, cols);
                double worst = 0.0;
                for (Eigen::Index r = 1; r < rows; ++r) {
                    worst = std::max(worst, (block.row(r) - block.row(0)).cwiseAbs().maxCoeff());
                }
                if (worst > tol) {
                    report.violations.push_back({l, i, j, BlockViolation::Kind::RowsDiffer, worst});
                }
            }
        }

        // Group super-blocks L^(l){p}: span the descendants of group p.
        const auto& offsets = m.layers[l].group_offsets;
        for (std::size_t p = 0; p + 1 < offsets.size(); ++p) {
            const auto first = start[offsets[p]];
            const auto last = start[offsets[p + 1]];
            const auto sums = L.block(first, first, last - first, last - first).rowwise().sum();
            const double worst = sums.size() > 0 ? sums.cwiseAbs().maxCoeff() : 0.0;
            if (worst > tol) {
                report.violations.push_back({l, p, p, BlockViolation::Kind::NonzeroRowSum, worst});
            }
        }
    }
    return report;
}

HierarchySpec fig1(std::vector<double> hop_delays) {
    HierarchySpec spec;
    LayerSpec physical;
    physical.groups = {
        GroupSpec{3, {{0, 1}, {1, 2}}},
        GroupSpec{1, {}},
        GroupSpec{2, {{0, 1}}},
    };
    LayerSpec regional;
    regional.groups = {
        GroupSpec{2, {{0, 1}}},
        GroupSpec{1, {}},
    };
    LayerSpec top;
    top.groups = {GroupSpec{2, {{0, 1}}}};
    spec.layers = {physical, regional, top};
    spec.physical_weights = {0.8, 0.7, 1.5, 1.0, 0.8, 1.2};
    spec.hop_delays = std::move(hop_delays);
    return spec;
}

}  // namespace hiercon
