#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "hiercon/hierarchy.hpp"

namespace test_support {

inline std::string scenario_path(const std::string& name) { return std::string(HIERCON_SCENARIO_DIR) + "/" + name; }

inline double max_abs(const hiercon::Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Count of singular values above rel_tol * sigma_max.
inline std::size_t numeric_rank(const hiercon::Matrix& m, double rel_tol = 1e-9) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<hiercon::Matrix>(m).singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>((sv.array() > rel_tol * sv(0)).count());
}

inline std::vector<double> sorted_real(std::vector<std::complex<double>> v) {
    std::vector<double> out;
    for (auto z : v) {
        out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace test_support
