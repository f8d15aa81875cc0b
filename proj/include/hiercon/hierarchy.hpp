#pragma once

// Data model of an M-layer hierarchy and assembly of its layer matrices.
//
// Layer and node indices are 0-based throughout the C++ API. Layer 0 is the
// physical layer; layer M-1 is the top layer and holds exactly one group.
// Scenario files and reports use 1-based numbering and convert at the edge.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiercon/errors.hpp"

namespace hiercon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Communication graph of one group: `size` nodes, undirected weighted edges.
struct GroupSpec {
    std::size_t size = 1;
    std::vector<Edge> edges;

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct LayerSpec {
    std::vector<GroupSpec> groups;
    /// One stochastic row per group. Absent: weight-proportional default.
    /// Always absent on the top layer, which has no superior node.
    std::optional<std::vector<std::vector<double>>> collecting;

    [[nodiscard]] std::size_t node_count() const;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct HierarchySpec {
    std::vector<LayerSpec> layers;
    std::vector<double> physical_weights;
    /// hop_delays[l] is the one-way delay between layer l and layer l+1 (seconds).
    std::vector<double> hop_delays;

    [[nodiscard]] std::size_t layer_count() const { return layers.size(); }
    [[nodiscard]] std::size_t physical_count() const;

    friend bool operator==(const HierarchySpec&, const HierarchySpec&) = default;
};

struct Violation {
    std::optional<std::size_t> layer;
    std::optional<std::size_t> group;
    std::string field;
    std::string message;

    /// "layer 2, group 1: edges: group disconnected" with 1-based numbering.
    [[nodiscard]] std::string describe() const;
};

using ValidationReport = std::vector<Violation>;

/// Collects every violated invariant; an empty report means the spec is valid.
[[nodiscard]] ValidationReport validate(const HierarchySpec& spec);

/// Throws StructuralError listing all violations when `spec` is invalid.
void require_valid(const HierarchySpec& spec);

/// D_out - A for one group. Throws StructuralError on bad edge indices.
[[nodiscard]] Matrix group_laplacian(const GroupSpec& group);

/// Leaf counts per layer: result[l][i] is the physical number of node i in layer l.
[[nodiscard]] std::vector<std::vector<std::size_t>> physical_numbers(const HierarchySpec& spec);

/// Aggregated physical weights per layer; result[0] equals spec.physical_weights.
[[nodiscard]] std::vector<Vector> physical_weights_all(const HierarchySpec& spec);

/// Collecting rows actually in force for layer l < M-1 (explicit or default).
[[nodiscard]] std::vector<std::vector<double>> effective_collecting(const HierarchySpec& spec,
                                                                    std::size_t layer);

struct LayerBlock {
    Matrix laplacian;      // L_D, block diagonal over groups, N_l x N_l
    Vector inv_weights;    // diagonal of K^(l)
    Matrix broadcast;      // B^(l), N_l x N_{l+1}; empty on the top layer
    Matrix collect;        // C^(l), N_{l+1} x N_l; empty on the top layer
    Matrix broadcast_chain;  // B^(0) ... B^(l-1), N_1 x N_l
    Matrix collect_chain;    // C^(l-1) ... C^(0), N_l x N_1
    Matrix effective;        // L^(l), N_1 x N_1
    std::vector<std::size_t> group_offsets;  // first node index of each group, plus N_l
};

struct LayerMatrices {
    std::vector<LayerBlock> layers;
    Matrix total;  // L = sum of effective layer matrices
    std::vector<std::vector<std::size_t>> physical_numbers;
    std::vector<Vector> physical_weights;

    [[nodiscard]] std::size_t layer_count() const { return layers.size(); }
    [[nodiscard]] std::size_t physical_count() const {
        return static_cast<std::size_t>(total.rows());
    }
    /// diag(a^(1)) as a vector: the conserved-quantity weights.
    [[nodiscard]] const Vector& conservation_weights() const { return physical_weights.front(); }
};

/// Assembles every layer matrix. Throws StructuralError for an invalid spec.
[[nodiscard]] LayerMatrices assemble(const HierarchySpec& spec);

struct BlockViolation {
    std::size_t layer = 0;
    std::size_t row_block = 0;
    std::size_t col_block = 0;
    enum class Kind { RowsDiffer, NonzeroRowSum } kind = Kind::RowsDiffer;
    double magnitude = 0.0;
};

struct BlockReport {
    std::vector<BlockViolation> violations;
    [[nodiscard]] bool passed() const { return violations.empty(); }
};

/// Checks that each node-pair block of L^(l) has identical rows and that each
/// group super-block has zero row sums.
[[nodiscard]] BlockReport block_structure_check(const LayerMatrices& m, double tol = 1e-12);

/// Three-layer hierarchy of six generators with groups {1,2,3},{4},{5,6},
/// layer-2 groups {1,2},{3} and a two-node top layer. Unit edge weights.
[[nodiscard]] HierarchySpec fig1(std::vector<double> hop_delays = {0.0, 0.0});

}  // namespace hiercon
