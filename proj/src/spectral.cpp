#include "hiercon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hiercon/random_hierarchy.hpp"

namespace hiercon {

namespace {

constexpr double kUnionRelTol = 1e-7;

std::size_t count_zeros(const std::vector<Complex>& values) {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const Complex& v) {
        return std::abs(v) < kZeroEigenvalueTol;
    }));
}

double spectral_radius(const std::vector<Complex>& values) {
    double r = 0.0;
    for (const auto& v : values) {
        r = std::max(r, std::abs(v));
    }
    return r;
}

UnionCheck compare_union(std::vector<Complex> predicted, std::vector<Complex> actual) {
    UnionCheck out;
    out.predicted = std::move(predicted);
    out.actual = std::move(actual);
    out.zero_count = count_zeros(out.actual);
    out.tolerance = kUnionRelTol * std::max(1.0, spectral_radius(out.predicted));
    const auto match = match_multisets(out.predicted, out.actual, out.tolerance);
    out.worst_distance = match.worst_distance;
    out.passed = match.matched && out.zero_count == 1;
    return out;
}

std::vector<Complex> nonzero_sorted(const std::vector<Complex>& values) {
    std::vector<Complex> out;
    for (const auto& v : values) {
        if (std::abs(v) >= kZeroEigenvalueTol) {
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

// Largest relative distance between two equally long sorted lists; infinity on size mismatch.
double sorted_deviation(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    }
    return worst;
}

}  // namespace

Vector layer_spectrum(const LayerMatrices& m, std::size_t layer) {
    if (layer >= m.layers.size()) {
        throw DomainError("layer " + std::to_string(layer + 1) + " out of range");
    }
    const auto& blk = m.layers[layer];
    const Vector root_k = blk.inv_weights.cwiseSqrt();
    const Matrix z = root_k.asDiagonal() * blk.laplacian * root_k.asDiagonal();
    return jacobi_eigenvalues(z);
}

std::vector<Complex> full_spectrum(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DomainError("full_spectrum needs a square matrix");
    }
    return general_eigenvalues(a);
}

UnionCheck union_check(const LayerMatrices& m) {
    std::vector<Complex> predicted{Complex{0.0, 0.0}};
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        for (double v : layer_spectrum(m, l)) {
            if (std::abs(v) >= kZeroEigenvalueTol) {
                predicted.emplace_back(v, 0.0);
            }
        }
    }
    return compare_union(std::move(predicted), full_spectrum(m.total));
}

UnionCheck scaled_union_check(const LayerMatrices& m, const std::vector<Complex>& scales) {
    if (scales.size() != m.layers.size()) {
        throw DomainError("expected " + std::to_string(m.layers.size()) + " scale factors, got " +
                          std::to_string(scales.size()));
    }
    const auto n = m.total.rows();
    ComplexMatrix scaled = ComplexMatrix::Zero(n, n);
    std::vector<Complex> predicted{Complex{0.0, 0.0}};
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const Complex s = scales[l];
        if (s == Complex{0.0, 0.0}) {
            throw DomainError("scale factor for layer " + std::to_string(l + 1) + " is zero");
        }
        scaled += s * m.layers[l].effective.cast<Complex>();
        for (const auto& v : general_eigenvalues(m.layers[l].effective)) {
            if (std::abs(v) >= kZeroEigenvalueTol) {
                predicted.push_back(s * v);
            }
        }
    }
    return compare_union(std::move(predicted), general_eigenvalues(scaled));
}

ConsensusPrediction consensus_value(const LayerMatrices& m, const Vector& x0) {
    const Vector& a = m.conservation_weights();
    if (x0.size() != a.size()) {
        throw DomainError("initial state has " + std::to_string(x0.size()) + " entries, expected " +
                          std::to_string(a.size()));
    }
    ConsensusPrediction out;
    out.weights = a / a.sum();
    out.value = out.weights.dot(x0);
    return out;
}

CInvarianceCheck c_invariance_check(const HierarchySpec& spec, std::size_t trials, std::uint64_t seed,
                                    double rel_tol) {
    CInvarianceCheck out;
    out.trials = trials;

    const auto base = assemble(spec);
    auto layer_sets = [](const LayerMatrices& m) {
        std::vector<std::vector<Complex>> sets;
        for (const auto& blk : m.layers) {
            sets.push_back(nonzero_sorted(general_eigenvalues(blk.effective)));
        }
        return sets;
    };
    auto sorted_all = [](const LayerMatrices& m) {
        auto v = full_spectrum(m.total);
        std::sort(v.begin(), v.end(), [](const Complex& x, const Complex& y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        });
        return v;
    };

    // Reference per-layer spectra come from the symmetric route on K L_D.
    std::vector<std::vector<Complex>> reference;
    for (std::size_t l = 0; l < base.layers.size(); ++l) {
        std::vector<Complex> values;
        for (double v : layer_spectrum(base, l)) {
            if (std::abs(v) >= kZeroEigenvalueTol) {
                values.emplace_back(v, 0.0);
            }
        }
        reference.push_back(std::move(values));
    }
    const auto reference_all = sorted_all(base);
    const Vector reference_weights = base.conservation_weights() / base.conservation_weights().sum();

    auto absorb = [&](const LayerMatrices& m) {
        const auto sets = layer_sets(m);
        for (std::size_t l = 0; l < sets.size(); ++l) {
            out.worst_layer_deviation = std::max(out.worst_layer_deviation, sorted_deviation(sets[l], reference[l]));
        }
        out.worst_spectrum_deviation = std::max(out.worst_spectrum_deviation,
                                                sorted_deviation(sorted_all(m), reference_all));
        const Vector w = m.conservation_weights() / m.conservation_weights().sum();
        out.weights_identical = out.weights_identical && (w.array() == reference_weights.array()).all();
    };

    absorb(base);
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials && spec.layers.size() > 1; ++t) {
        auto redrawn = spec;
        redraw_collecting(rng, redrawn);
        absorb(assemble(redrawn));
    }
    out.passed = out.worst_layer_deviation <= rel_tol && out.worst_spectrum_deviation <= rel_tol &&
                 out.weights_identical;
    return out;
}

SpectralReport analyze_spectrum(const LayerMatrices& m, const std::optional<Vector>& x0) {
    SpectralReport r;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        r.layer_eigenvalues.push_back(layer_spectrum(m, l));
        const auto& ev = r.layer_eigenvalues.back();
        r.lambda_max.push_back(ev.size() > 0 ? std::max(ev.maxCoeff(), 0.0) : 0.0);
    }
    r.union_result = union_check(m);
    r.full_spectrum = r.union_result.actual;
    r.zero_count = r.union_result.zero_count;
    r.consensus_weights = m.conservation_weights() / m.conservation_weights().sum();
    if (x0) {
        r.consensus_value = consensus_value(m, *x0).value;
    }
    return r;
}

}  // namespace hiercon
