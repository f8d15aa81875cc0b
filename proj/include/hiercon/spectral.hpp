#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hiercon/eigen_solvers.hpp"
#include "hiercon/hierarchy.hpp"

namespace hiercon {

/// Eigenvalues with modulus below this count as zero.
inline constexpr double kZeroEigenvalueTol = 1e-9;

/// Ascending real eigenvalues of K^(l) L_D^(l), via the symmetric similarity
/// Z = K^{1/2} L_D K^{1/2}.
[[nodiscard]] Vector layer_spectrum(const LayerMatrices& m, std::size_t layer);

/// Complex eigenvalues of an arbitrary square matrix.
[[nodiscard]] std::vector<Complex> full_spectrum(const Matrix& a);

struct UnionCheck {
    bool passed = false;
    std::vector<Complex> predicted;  // {0} plus every layer's nonzero eigenvalues
    std::vector<Complex> actual;     // spectrum of the summed matrix
    std::size_t zero_count = 0;      // zeros in `actual`
    double tolerance = 0.0;
    double worst_distance = 0.0;
};

/// Checks that the spectrum of L is {0} joined with each layer's nonzero spectrum.
[[nodiscard]] UnionCheck union_check(const LayerMatrices& m);

/// Same check for sum_l s_l L^(l). Throws DomainError if any s_l is zero
/// or the count does not match the layer count.
[[nodiscard]] UnionCheck scaled_union_check(const LayerMatrices& m, const std::vector<Complex>& scales);

struct ConsensusPrediction {
    Vector weights;  // w = K 1 / (1' K 1)
    double value = 0.0;
};

/// Zero-delay limit c = w' x0. Throws DomainError on a length mismatch.
[[nodiscard]] ConsensusPrediction consensus_value(const LayerMatrices& m, const Vector& x0);

struct CInvarianceCheck {
    bool passed = false;
    std::size_t trials = 0;
    double worst_layer_deviation = 0.0;     // relative
    double worst_spectrum_deviation = 0.0;  // relative
    bool weights_identical = true;
};

/// Redraws every collecting row `trials` times and compares the nonzero
/// spectrum of each effective L^(l), the full spectrum of L, and the
/// consensus weights against the spec as given.
[[nodiscard]] CInvarianceCheck c_invariance_check(const HierarchySpec& spec, std::size_t trials,
                                                  std::uint64_t seed = 42, double rel_tol = 1e-8);

struct SpectralReport {
    std::vector<Vector> layer_eigenvalues;
    std::vector<double> lambda_max;
    std::vector<Complex> full_spectrum;
    std::size_t zero_count = 0;
    UnionCheck union_result;
    Vector consensus_weights;
    std::optional<double> consensus_value;
};

/// Runs every spectral analysis; `x0` is optional and only feeds the consensus value.
[[nodiscard]] SpectralReport analyze_spectrum(const LayerMatrices& m, const std::optional<Vector>& x0 = std::nullopt);

}  // namespace hiercon
