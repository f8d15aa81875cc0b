#include "hiercon/dde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hiercon/spectral.hpp"

namespace hiercon {

namespace {

constexpr double kDefaultMaxStep = 1e-3;
constexpr double kStepsPerShortestDelay = 50.0;
constexpr double kDivergenceFactor = 10.0;
constexpr double kCriticalBandLow = 0.8;
constexpr double kCriticalBandHigh = 1.2;

bool all_finite(const Vector& v) { return v.allFinite(); }

struct WindowStats {
    double max_dev = 0.0;
    double min_dev = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    [[nodiscard]] double amplitude() const { return count == 0 ? 0.0 : max_dev - min_dev; }
};

}  // namespace

double resolve_step(const SimOptions& opts, const std::vector<double>& delays) {
    if (opts.step) {
        return *opts.step;
    }
    double h = kDefaultMaxStep;
    for (double d : delays) {
        if (d > 0.0) {
            h = std::min(h, d / kStepsPerShortestDelay);
        }
    }
    return h;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Converged:
            return "Converged";
        case Regime::CriticalOscillation:
            return "CriticalOscillation";
        case Regime::Diverging:
            return "Diverging";
        case Regime::Inconclusive:
            return "Inconclusive";
    }
    return "Unknown";
}

void StateHistory::push(HistoryPoint p) {
    if (!points_.empty() && !(p.t > points_.back().t)) {
        throw std::logic_error("history times must increase");
    }
    points_.push_back(std::move(p));
}

Vector StateHistory::at(double t) const {
    if (points_.empty() || t < points_.front().t || t > points_.back().t) {
        throw std::logic_error("history lookup at t = " + std::to_string(t) + " outside the stored range");
    }
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double value, const HistoryPoint& p) { return value < p.t; });
    const auto& p0 = *std::prev(it);
    if (p0.t == t || it == points_.end()) {
        return p0.x;
    }
    const auto& p1 = *it;
    const double dt = p1.t - p0.t;
    const double s = (t - p0.t) / dt;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * p0.x + (h10 * dt) * p0.d_right + h01 * p1.x + (h11 * dt) * p1.d_left;
}

void StateHistory::discard_before(double t) {
    while (points_.size() >= 2 && points_[1].t <= t) {
        points_.pop_front();
    }
}

DelayedSystem::DelayedSystem(const LayerMatrices& m, const std::vector<double>& delays) {
    if (delays.size() != m.layers.size()) {
        throw DomainError("expected " + std::to_string(m.layers.size()) + " layer delays, got " +
                          std::to_string(delays.size()));
    }
    const auto n = m.total.rows();
    instantaneous_ = Matrix::Zero(n, n);
    for (std::size_t l = 0; l < delays.size(); ++l) {
        if (!(delays[l] >= 0.0) || !std::isfinite(delays[l])) {
            throw DomainError("layer delay " + std::to_string(delays[l]) + " is not a nonnegative number");
        }
        if (delays[l] == 0.0) {
            instantaneous_ += m.layers[l].effective;
        } else {
            delayed_.push_back(m.layers[l].effective);
            activation_.push_back(delays[l]);
        }
    }
}

double DelayedSystem::max_delay() const {
    return activation_.empty() ? 0.0 : *std::max_element(activation_.begin(), activation_.end());
}

Vector DelayedSystem::derivative(double t, const Vector& x, const StateHistory& history, bool left_limit) const {
    Vector dx = -(instantaneous_ * x);
    for (std::size_t k = 0; k < delayed_.size(); ++k) {
        const double d = activation_[k];
        const bool active = left_limit ? t > d : t >= d;
        if (active) {
            dx.noalias() -= delayed_[k] * history.at(t - d);
        }
    }
    return dx;
}

Trajectory integrate(const LayerMatrices& m, const std::vector<double>& delays, const Vector& x0,
                     const SimOptions& opts) {
    const auto n = m.total.rows();
    if (x0.size() != n) {
        throw DomainError("initial state has " + std::to_string(x0.size()) + " entries, expected " +
                          std::to_string(n));
    }
    if (!(opts.t_end > 0.0) || !std::isfinite(opts.t_end)) {
        throw DomainError("t_end must be positive");
    }
    if (opts.sample_stride == 0) {
        throw DomainError("sample stride must be at least 1");
    }
    if (!(opts.window_fraction > 0.0 && opts.window_fraction <= 0.5)) {
        throw DomainError("window fraction must lie in (0, 0.5]");
    }

    const DelayedSystem system(m, delays);
    const double h_max = resolve_step(opts, delays);
    if (!(h_max > 0.0) || !std::isfinite(h_max)) {
        throw DomainError("step must be positive");
    }
    for (double d : system.activation_times()) {
        if (h_max > d) {
            throw DomainError("step " + std::to_string(h_max) + " exceeds the delay " + std::to_string(d));
        }
    }

    // Round the step count up to a whole number of sample strides so samples
    // sit on a uniform grid that ends exactly at t_end.
    const auto stride = opts.sample_stride;
    const auto blocks = static_cast<std::size_t>(std::ceil(opts.t_end / (h_max * static_cast<double>(stride)) - 1e-9));
    const std::size_t steps = std::max<std::size_t>(1, blocks) * stride;
    const double h = opts.t_end / static_cast<double>(steps);

    const Vector& a = m.conservation_weights();
    Trajectory traj;
    traj.step = h;
    auto record = [&](double t, const Vector& x) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.conservation.push_back(a.dot(x));
    };

    StateHistory history;
    {
        const Vector f0 = system.derivative(0.0, x0, history);
        history.push({0.0, x0, f0, f0});
    }
    record(0.0, x0);

    const double keep = system.max_delay() + 2.0 * h;
    std::vector<double> boundaries;
    if (opts.align_activation) {
        boundaries = system.activation_times();
        std::sort(boundaries.begin(), boundaries.end());
    }

    // One RK4 step from the newest history point to t1.
    auto advance = [&](double t1) -> bool {
        const auto& last = history.back();
        const double t0 = last.t;
        const double dt = t1 - t0;
        const Vector x = last.x;
        // A step ending on an activation instant integrates the dynamics in
        // force before it, so its last stage takes the left limit.
        const bool on_gate = std::find(boundaries.begin(), boundaries.end(), t1) != boundaries.end();
        const Vector& k1 = last.d_right;
        const Vector k2 = system.derivative(t0 + 0.5 * dt, x + 0.5 * dt * k1, history);
        const Vector k3 = system.derivative(t0 + 0.5 * dt, x + 0.5 * dt * k2, history);
        const Vector k4 = system.derivative(t1, x + dt * k3, history, on_gate);
        Vector x1 = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!all_finite(x1)) {
            return false;
        }
        Vector d_right = system.derivative(t1, x1, history);
        Vector d_left = on_gate ? system.derivative(t1, x1, history, true) : d_right;
        if (!all_finite(d_right)) {
            return false;
        }
        history.push({t1, std::move(x1), std::move(d_left), std::move(d_right)});
        return true;
    };

    for (std::size_t k = 0; k < steps && !traj.aborted; ++k) {
        const double t0 = static_cast<double>(k) * h;
        const double t1 = static_cast<double>(k + 1) * h;
        for (double b : boundaries) {
            if (b > t0 && b < t1 && !traj.aborted) {
                traj.aborted = !advance(b);
            }
        }
        if (!traj.aborted) {
            traj.aborted = !advance(t1);
        }
        if (traj.aborted) {
            break;
        }
        if ((k + 1) % stride == 0) {
            record(t1, history.back().x);
        }
        history.discard_before(t1 - keep);
    }

    const auto c = consensus_value(m, x0).value;
    // The longest oscillation any delayed layer can sustain at its boundary is 2 pi / lambda_max.
    double period = 0.0;
    for (std::size_t l = 1; l < m.layers.size(); ++l) {
        if (delays[l] > 0.0) {
            const auto ev = layer_spectrum(m, l);
            const double lmax = ev.size() ? ev.maxCoeff() : 0.0;
            if (lmax >= kZeroEigenvalueTol) {
                period = std::max(period, 2.0 * std::numbers::pi / lmax);
            }
        }
    }
    traj.classification = classify(traj, opts, c, period, system.max_delay());
    return traj;
}

Classification classify(const Trajectory& traj, const SimOptions& opts, double c, double period, double max_delay) {
    Classification out;
    out.consensus = c;
    if (traj.aborted) {
        out.regime = Regime::Diverging;
        out.note = "non-finite state; trajectory truncated at t = " +
                   std::to_string(traj.times.empty() ? 0.0 : traj.times.back());
        return out;
    }
    if (traj.times.size() < 3) {
        out.note = "too few samples";
        return out;
    }

    const double t_end = traj.times.back();
    const double window = opts.window_fraction * t_end;
    const double last_start = t_end - window;
    const double prev_start = t_end - 2.0 * window;
    WindowStats last;
    WindowStats prev;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < prev_start) {
            continue;
        }
        const double dev = (traj.states[i].array() - c).abs().maxCoeff();
        auto& w = t >= last_start ? last : prev;
        w.max_dev = std::max(w.max_dev, dev);
        w.min_dev = std::min(w.min_dev, dev);
        ++w.count;
    }
    out.last_window_max_deviation = last.max_dev;
    out.previous_window_max_deviation = prev.max_dev;
    out.last_window_amplitude = last.amplitude();
    out.previous_window_amplitude = prev.amplitude();

    if (t_end < 4.0 * max_delay) {
        out.note = "horizon shorter than four times the largest delay";
        return out;
    }
    if (period > 0.0 && window < period) {
        out.note = "window shorter than one oscillation period (" + std::to_string(period) + " s)";
        return out;
    }
    if (last.max_dev <= opts.convergence_tol) {
        out.regime = Regime::Converged;
        return out;
    }
    if (last.max_dev > kDivergenceFactor * prev.max_dev) {
        out.regime = Regime::Diverging;
        return out;
    }
    if (prev.amplitude() > 0.0) {
        const double ratio = last.amplitude() / prev.amplitude();
        if (ratio >= kCriticalBandLow && ratio <= kCriticalBandHigh && last.amplitude() > opts.convergence_tol) {
            out.regime = Regime::CriticalOscillation;
            return out;
        }
    }
    out.note = "neither settled, sustained, nor exploding";
    return out;
}

double conservation_series(const Trajectory& traj, const Vector& weights) {
    if (traj.states.empty()) {
        return 0.0;
    }
    const double initial = weights.dot(traj.states.front());
    double worst = 0.0;
    for (const auto& x : traj.states) {
        worst = std::max(worst, std::abs(weights.dot(x) - initial));
    }
    return worst;
}

}  // namespace hiercon
