#pragma once

// Stability of the hierarchy under interlayer delays.
//
// Layer l >= 1 (0-based) feeds back through a round trip of every hop below
// it, so its term in the characteristic equation is s e^{D_l s} + lambda = 0
// with D_l = 2 (d_0 + ... + d_{l-1}). Each such quasi-polynomial has all
// roots in the open left half-plane iff D_l < pi / (2 lambda).

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "hiercon/hierarchy.hpp"
#include "hiercon/spectral.hpp"

namespace hiercon {

/// Margins within this distance of zero are treated as exactly critical.
inline constexpr double kCriticalMarginTol = 1e-12;

/// D_l for every layer; D_0 = 0 (the physical layer acts without delay).
[[nodiscard]] std::vector<double> effective_delays(const HierarchySpec& spec);

/// T* = pi / (2 lambda). Throws DomainError for lambda <= 0.
[[nodiscard]] double critical_delay(double lambda);

/// Root of s e^{T s} + lambda = 0 with the largest real part, W_0(-lambda T) / T.
/// T = 0 gives the delay-free pole -lambda. Throws DomainError for T < 0 or
/// lambda <= 0, NumericalError if Lambert W fails.
[[nodiscard]] std::complex<double> rightmost_root(double T, double lambda);

struct Residual {
    double real = 0.0;
    double imag = 0.0;
};

/// Real and imaginary parts of s e^{T s} + lambda at s = sigma + i omega.
[[nodiscard]] Residual residual_system(double sigma, double omega, double T, double lambda);

enum class Verdict { Stable, Critical, Unstable };

[[nodiscard]] const char* to_string(Verdict v);

struct LayerDelayBound {
    std::size_t layer = 0;         // 0-based; always >= 1
    double lambda_max = 0.0;
    double cumulative_delay = 0.0;  // d_0 + ... + d_{layer-1}
    double effective_delay = 0.0;   // 2 * cumulative_delay
    std::optional<double> bound;    // pi / (4 lambda_max); none when lambda_max = 0
    std::optional<double> margin;   // bound - cumulative_delay
    std::optional<std::complex<double>> rightmost_root;
};

struct DelayStabilityReport {
    std::vector<double> effective_delays;
    std::vector<LayerDelayBound> layers;
    Verdict verdict = Verdict::Stable;
    std::optional<std::size_t> binding_layer;  // smallest margin
    std::vector<std::size_t> binding_layers;   // all layers at the verdict's boundary
};

/// Checks every delayed layer against its bound and attaches the rightmost root.
[[nodiscard]] DelayStabilityReport stability_verdict(const HierarchySpec& spec, const SpectralReport& spectral);

/// Largest real part over the characteristic roots of every nonzero layer
/// eigenvalue, i.e. the slowest decay (or fastest growth) rate of the
/// consensus error. Layer 0 contributes -lambda.
[[nodiscard]] double dominant_rate(const SpectralReport& spectral, const std::vector<double>& delays);

}  // namespace hiercon
