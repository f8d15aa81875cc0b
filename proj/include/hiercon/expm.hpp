#pragma once

#include "hiercon/hierarchy.hpp"

namespace hiercon {

/// e^A by scaling and squaring with the degree-13 Pade approximant.
[[nodiscard]] Matrix matrix_exponential(const Matrix& a);

/// Delay-free reference solution e^{-L t} x0. Throws DomainError for t < 0.
[[nodiscard]] Vector expm_oracle(const Matrix& laplacian, const Vector& x0, double t);

}  // namespace hiercon
