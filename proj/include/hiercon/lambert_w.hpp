#pragma once

#include <complex>

namespace hiercon {

/// Branch `branch` of the complex Lambert W function, i.e. a solution w of
/// w e^w = z, computed by Halley iteration.
///
/// Initial guesses: power series near z = 0 (principal branch), the
/// branch-point expansion near z = -1/e (branches 0 and -1), and the
/// asymptotic log form elsewhere. Throws NumericalError if the iteration does
/// not settle within `max_iterations`.
[[nodiscard]] std::complex<double> lambert_w(std::complex<double> z, int branch = 0, int max_iterations = 100);

}  // namespace hiercon
