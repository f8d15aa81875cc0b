#include "hiercon/delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hiercon/errors.hpp"
#include "hiercon/lambert_w.hpp"

namespace hiercon {

std::vector<double> effective_delays(const HierarchySpec& spec) {
    std::vector<double> out(spec.layers.size(), 0.0);
    double cumulative = 0.0;
    for (std::size_t l = 1; l < out.size(); ++l) {
        cumulative += spec.hop_delays.at(l - 1);
        out[l] = 2.0 * cumulative;
    }
    return out;
}

double critical_delay(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("critical delay needs a positive eigenvalue, got " + std::to_string(lambda));
    }
    return std::numbers::pi / (2.0 * lambda);
}

std::complex<double> rightmost_root(double T, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("rightmost_root needs lambda > 0, got " + std::to_string(lambda));
    }
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw DomainError("rightmost_root needs T >= 0, got " + std::to_string(T));
    }
    if (T == 0.0) {
        return {-lambda, 0.0};
    }
    return lambert_w({-lambda * T, 0.0}, 0) / T;
}

Residual residual_system(double sigma, double omega, double T, double lambda) {
    const double g = std::exp(sigma * T);
    const double c = std::cos(omega * T);
    const double s = std::sin(omega * T);
    return {sigma * g * c - omega * g * s + lambda, sigma * g * s + omega * g * c};
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable:
            return "Stable";
        case Verdict::Critical:
            return "Critical";
        case Verdict::Unstable:
            return "Unstable";
    }
    return "Unknown";
}

DelayStabilityReport stability_verdict(const HierarchySpec& spec, const SpectralReport& spectral) {
    DelayStabilityReport report;
    report.effective_delays = effective_delays(spec);

    double cumulative = 0.0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t l = 1; l < spec.layers.size(); ++l) {
        cumulative += spec.hop_delays.at(l - 1);
        LayerDelayBound entry;
        entry.layer = l;
        entry.lambda_max = spectral.lambda_max.at(l);
        entry.cumulative_delay = cumulative;
        entry.effective_delay = report.effective_delays[l];
        if (entry.lambda_max >= kZeroEigenvalueTol) {
            entry.bound = std::numbers::pi / (4.0 * entry.lambda_max);
            entry.margin = *entry.bound - cumulative;
            entry.rightmost_root = rightmost_root(entry.effective_delay, entry.lambda_max);
            if (*entry.margin < min_margin) {
                min_margin = *entry.margin;
                report.binding_layer = l;
            }
        }
        report.layers.push_back(entry);
    }

    if (min_margin < -kCriticalMarginTol) {
        report.verdict = Verdict::Unstable;
        for (const auto& e : report.layers) {
            if (e.margin && *e.margin < -kCriticalMarginTol) {
                report.binding_layers.push_back(e.layer);
            }
        }
    } else if (min_margin <= kCriticalMarginTol) {
        report.verdict = Verdict::Critical;
        for (const auto& e : report.layers) {
            if (e.margin && std::abs(*e.margin) <= kCriticalMarginTol) {
                report.binding_layers.push_back(e.layer);
            }
        }
    } else {
        report.verdict = Verdict::Stable;
        if (report.binding_layer) {
            report.binding_layers.push_back(*report.binding_layer);
        }
    }
    return report;
}

double dominant_rate(const SpectralReport& spectral, const std::vector<double>& delays) {
    double rate = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < spectral.layer_eigenvalues.size(); ++l) {
        for (double lambda : spectral.layer_eigenvalues[l]) {
            if (lambda < kZeroEigenvalueTol) {
                continue;
            }
            const double T = l == 0 ? 0.0 : delays.at(l);
            rate = std::max(rate, rightmost_root(T, lambda).real());
        }
    }
    return rate;
}

}  // namespace hiercon
