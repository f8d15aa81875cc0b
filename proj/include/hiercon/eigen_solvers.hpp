#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hiercon {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
/// Only the upper triangle is read. Throws NumericalError after `max_sweeps`.
[[nodiscard]] Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& symmetric, int max_sweeps = 100);

/// All eigenvalues of a general real matrix (balanced, then Hessenberg + shifted QR).
/// Throws NumericalError if QR fails within 30 iterations per eigenvalue.
[[nodiscard]] std::vector<Complex> general_eigenvalues(const Eigen::MatrixXd& a);
[[nodiscard]] std::vector<Complex> general_eigenvalues(const ComplexMatrix& a);

/// Result of pairing two multisets of complex numbers.
struct MultisetMatch {
    bool matched = false;
    double worst_distance = 0.0;
    std::size_t unmatched = 0;
};

/// Sorts both sides by (real, imag) and greedily pairs each element of `a`
/// with its nearest unused element of `b`; fails on size mismatch or on any
/// pairing farther than `tol`.
[[nodiscard]] MultisetMatch match_multisets(std::vector<Complex> a, std::vector<Complex> b, double tol);

}  // namespace hiercon
