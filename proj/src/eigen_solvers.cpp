#include "hiercon/eigen_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hiercon/errors.hpp"

namespace hiercon {

namespace {

// Parlett-Reinsch diagonal balancing with power-of-two scalings. Similarity
// transform, so the spectrum is untouched while the norm usually shrinks.
template <typename MatrixT>
void balance(MatrixT& a) {
    constexpr double kRadix = 2.0;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            }
            if (c == 0.0 || r == 0.0) {
                continue;
            }
            double g = r / kRadix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= kRadix;
                c *= kRadix * kRadix;
            }
            g = r * kRadix;
            while (c > g) {
                f /= kRadix;
                c /= kRadix * kRadix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

std::vector<Complex> sorted(std::vector<Complex> v) {
    std::sort(v.begin(), v.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return v;
}

}  // namespace

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& symmetric, int max_sweeps) {
    const Eigen::Index n = symmetric.rows();
    Eigen::MatrixXd a = symmetric.triangularView<Eigen::Upper>();
    a = a.selfadjointView<Eigen::Upper>();

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                s += 2.0 * a(p, q) * a(p, q);
            }
        }
        return std::sqrt(s);
    };

    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
    const double target = std::numeric_limits<double>::epsilon() * scale;
    int sweep = 0;
    while (off_norm() > target) {
        if (++sweep > max_sweeps) {
            throw NumericalError("Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) +
                                 " sweeps (off-diagonal norm " + std::to_string(off_norm()) + ")");
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Rotation angle zeroing a(p,q), in the stable small-angle form.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::hypot(t, 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }
    Eigen::VectorXd d = a.diagonal();
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<Complex> general_eigenvalues(const Eigen::MatrixXd& input) {
    Eigen::MatrixXd a = input;
    balance(a);
    Eigen::EigenSolver<Eigen::MatrixXd> solver;
    const auto n = static_cast<int>(a.rows());
    solver.setMaxIterations(30 * std::max(n, 1) * std::max(n, 1));
    solver.compute(a, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("QR iteration did not converge for " + std::to_string(n) + "x" + std::to_string(n) +
                             " matrix with Frobenius norm " + std::to_string(input.norm()));
    }
    const auto& ev = solver.eigenvalues();
    return {ev.begin(), ev.end()};
}

std::vector<Complex> general_eigenvalues(const ComplexMatrix& input) {
    ComplexMatrix a = input;
    balance(a);
    Eigen::ComplexEigenSolver<ComplexMatrix> solver;
    const auto n = static_cast<int>(a.rows());
    solver.setMaxIterations(30 * std::max(n, 1) * std::max(n, 1));
    solver.compute(a, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("complex QR iteration did not converge for " + std::to_string(n) + "x" +
                             std::to_string(n) + " matrix with Frobenius norm " + std::to_string(input.norm()));
    }
    const auto& ev = solver.eigenvalues();
    return {ev.begin(), ev.end()};
}

MultisetMatch match_multisets(std::vector<Complex> a, std::vector<Complex> b, double tol) {
    MultisetMatch result;
    if (a.size() != b.size()) {
        result.unmatched = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
        return result;
    }
    a = sorted(std::move(a));
    b = sorted(std::move(b));
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        std::size_t best = b.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && std::abs(x - b[j]) < best_dist) {
                best_dist = std::abs(x - b[j]);
                best = j;
            }
        }
        used[best] = true;
        result.worst_distance = std::max(result.worst_distance, best_dist);
        if (best_dist > tol) {
            ++result.unmatched;
        }
    }
    result.matched = result.unmatched == 0;
    return result;
}

}  // namespace hiercon
