#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qsig/errors.hpp"
#include "qsig/rng.hpp"

namespace qsig {

/// Simulated sup |B| draws of the distribution-free limit, scaled by
/// sqrt(tau (1 - tau)).
struct LimitSample {
    std::vector<double> draws;
    int grid_m = 0;
    double tau = 0.5;
};

/// One sheet of the Kiefer-Mueller process on the grid
/// (s, t) in {1/m, ..., 1}^2, row-major in s. Brownian motion in s of
/// Brownian bridges in t; matches the covariance
/// (s1 ^ s2)(t1 ^ t2 - t1 t2) exactly on the grid.
inline std::vector<double> kiefer_mueller_sheet(int grid_m, RngStream& rng) {
    const int m = grid_m;
    const double sqinc = std::sqrt(1.0 / m);
    std::vector<double> sheet(static_cast<std::size_t>(m) * m);
    std::vector<double> running(m, 0.0), walk(m);
    for (int js = 0; js < m; ++js) {
        double w = 0.0;
        for (int jt = 0; jt < m; ++jt) {
            w += rng.normal() * sqinc;
            walk[jt] = w;
        }
        double w1 = walk[m - 1];
        for (int jt = 0; jt < m; ++jt) {
            double t = static_cast<double>(jt + 1) / m;
            running[jt] += (walk[jt] - t * w1) * sqinc;
            sheet[static_cast<std::size_t>(js) * m + jt] = running[jt];
        }
    }
    return sheet;
}

inline LimitSample kiefer_mueller_sup(int grid_m, int n_paths, double tau, std::uint64_t seed) {
    if (grid_m < 2) throw config_error("grid_m must be >= 2");
    if (n_paths < 1) throw config_error("n_paths must be >= 1");
    if (!(tau > 0.0 && tau < 1.0)) throw invalid_level_error("tau must be in (0,1)");
    LimitSample out;
    out.grid_m = grid_m;
    out.tau = tau;
    out.draws.resize(n_paths);
    const double scale = std::sqrt(tau * (1.0 - tau));
    for (int p = 0; p < n_paths; ++p) {
        RngStream rng = RngStream::derive(seed, {static_cast<std::uint64_t>(p)});
        auto sheet = kiefer_mueller_sheet(grid_m, rng);
        double sup = 0.0;
        for (double v : sheet) sup = std::max(sup, std::fabs(v));
        out.draws[p] = scale * sup;
    }
    return out;
}

}  // namespace qsig
