#include "hiercon/expm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace hiercon {

namespace {

constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0, 129060195264000.0,
    10559470521600.0,    670442572800.0,      33522128640.0,      1323241920.0,       40840800.0,
    960960.0,            16380.0,             182.0,              1.0};

// Largest 1-norm for which the degree-13 approximant is accurate to unit roundoff.
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix matrix_exponential(const Matrix& a) {
    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

    int squarings = 0;
    if (norm1 > kTheta13) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
    }
    const Matrix as = a / std::ldexp(1.0, squarings);

    const auto& b = kPade13;
    const Matrix a2 = as * as;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    const Matrix u = as * u_inner;
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) {
        r = r * r;
    }
    return r;
}

Vector expm_oracle(const Matrix& laplacian, const Vector& x0, double t) {
    if (!(t >= 0.0)) {
        throw DomainError("expm_oracle needs t >= 0, got " + std::to_string(t));
    }
    if (t == 0.0) {
        return x0;
    }
    return matrix_exponential(-t * laplacian) * x0;
}

}  // namespace hiercon
