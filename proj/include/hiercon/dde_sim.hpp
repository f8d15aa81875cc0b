#pragma once

// Fixed-step integration of the delayed closed loop
//
//   x'(t) = -L^(0) x(t) - sum_{l>=1} g_l(t) L^(l) x(t - D_l),
//
// where the gate g_l(t) is 0 before the layer's round trip completes
// (t < D_l) and 1 afterwards. Delayed states come from a history buffer by
// cubic Hermite interpolation of stored states and derivatives.

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "hiercon/hierarchy.hpp"

namespace hiercon {

struct SimOptions {
    std::optional<double> step;  // default: min(1e-3, smallest positive D_l / 50)
    double t_end = 60.0;
    std::size_t sample_stride = 10;
    double convergence_tol = 1e-4;
    double window_fraction = 0.2;
    /// Split steps at activation instants D_l so no step straddles a gate switch.
    bool align_activation = false;
};

/// Step actually used for the given delays and options.
[[nodiscard]] double resolve_step(const SimOptions& opts, const std::vector<double>& delays);

enum class Regime { Converged, CriticalOscillation, Diverging, Inconclusive };

[[nodiscard]] const char* to_string(Regime r);

struct Classification {
    Regime regime = Regime::Inconclusive;
    double consensus = 0.0;                  // predicted limit c
    double last_window_max_deviation = 0.0;  // max_t max_i |x_i - c| over the last window
    double previous_window_max_deviation = 0.0;
    double last_window_amplitude = 0.0;      // peak-to-peak of max_i |x_i - c|
    double previous_window_amplitude = 0.0;
    std::string note;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> conservation;  // a' x(t)
    double step = 0.0;
    bool aborted = false;  // non-finite state encountered
    Classification classification;
};

struct HistoryPoint {
    double t = 0.0;
    Vector x;
    Vector d_left;   // derivative limit from the left
    Vector d_right;  // derivative limit from the right
};

/// Past states of one integration, interpolated with cubic Hermite splines.
class StateHistory {
public:
    void push(HistoryPoint p);
    [[nodiscard]] Vector at(double t) const;
    /// Drops points no longer needed to interpolate at times >= t.
    void discard_before(double t);
    [[nodiscard]] const HistoryPoint& back() const { return points_.back(); }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] double earliest() const { return points_.front().t; }

private:
    std::deque<HistoryPoint> points_;
};

/// Right-hand side of the gated delayed system.
class DelayedSystem {
public:
    /// `delays[l]` is D_l for layer l; layers with D_l = 0 act instantaneously.
    DelayedSystem(const LayerMatrices& m, const std::vector<double>& delays);

    /// x'(t). With `left_limit` a layer activates only for t > D_l, giving
    /// the derivative just before an activation instant.
    [[nodiscard]] Vector derivative(double t, const Vector& x, const StateHistory& history,
                                    bool left_limit = false) const;

    [[nodiscard]] const std::vector<double>& activation_times() const { return activation_; }
    [[nodiscard]] double max_delay() const;

private:
    Matrix instantaneous_;
    std::vector<Matrix> delayed_;
    std::vector<double> activation_;
};

/// Integrates with classical RK4 from x0 at t = 0 and classifies the result.
/// Throws DomainError on a bad x0 length or invalid options.
[[nodiscard]] Trajectory integrate(const LayerMatrices& m, const std::vector<double>& delays, const Vector& x0,
                                   const SimOptions& opts = {});

/// Windowed regime classification against the predicted consensus `c`.
/// `period` is the longest oscillation period expected (0 disables the check);
/// `max_delay` is the largest D_l.
[[nodiscard]] Classification classify(const Trajectory& traj, const SimOptions& opts, double c, double period,
                                      double max_delay);

/// max_t |a' x(t) - a' x(0)| for weights `a`.
[[nodiscard]] double conservation_series(const Trajectory& traj, const Vector& weights);

}  // namespace hiercon
