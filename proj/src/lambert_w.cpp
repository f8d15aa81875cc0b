#include "hiercon/lambert_w.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "hiercon/errors.hpp"

namespace hiercon {

namespace {

using cd = std::complex<double>;

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kBranchPointRadius = 0.25;
constexpr double kSmallZRadius = 0.25;

cd initial_guess(cd z, int branch) {
    if ((branch == 0 || branch == -1) && std::abs(z + kInvE) < kBranchPointRadius) {
        // Expansion in p = sqrt(2(ez + 1)); branch -1 takes the other root.
        cd p = std::sqrt(2.0 * (std::numbers::e * z + 1.0));
        if (branch == -1) {
            p = -p;
        }
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    if (branch == 0 && std::abs(z) < kSmallZRadius) {
        return z * (1.0 + z * (-1.0 + z * (1.5 - 8.0 / 3.0 * z)));
    }
    if (branch == 0 && z.real() >= 0.0 && std::abs(z) < 3.0) {
        return std::log(1.0 + z);
    }
    const cd l1 = std::log(z) + cd{0.0, 2.0 * std::numbers::pi * branch};
    const cd l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
}

}  // namespace

std::complex<double> lambert_w(std::complex<double> z, int branch, int max_iterations) {
    if (z == cd{0.0, 0.0}) {
        if (branch == 0) {
            return {0.0, 0.0};
        }
        throw DomainError("Lambert W branch " + std::to_string(branch) + " is singular at z = 0");
    }
    if ((branch == 0 || branch == -1) && std::abs(z + kInvE) < 1e-300) {
        return {-1.0, 0.0};
    }

    cd w = initial_guess(z, branch);
    constexpr double kTol = 1e-14;
    bool polished = false;
    for (int it = 0; it < max_iterations; ++it) {
        const cd ew = std::exp(w);
        const cd f = w * ew - z;
        const cd wp1 = w + 1.0;
        const cd denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const cd step = f / denom;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
            break;
        }
        w -= step;
        if (std::abs(step) <= kTol * (1.0 + std::abs(w))) {
            if (polished) {
                return w;
            }
            polished = true;  // one more cubically convergent step
        }
    }
    std::ostringstream os;
    os.precision(17);
    os << "Lambert W (branch " << branch << ") did not converge for z = " << z << " after " << max_iterations
       << " Halley iterations (last iterate " << w << ")";
    throw NumericalError(os.str());
}

}  // namespace hiercon
