#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qsig/cdf_estimator.hpp"
#include "qsig/dataset.hpp"
#include "qsig/errors.hpp"
#include "qsig/kernels.hpp"
#include "qsig/math.hpp"

namespace qsig {

/// Reference distribution G: a normal matched to the 5%/95% empirical
/// quantiles of Y, used as the coordinate system of the rearrangement.
struct GSpec {
    double mu_g = 0.0;
    double sigma_g = 1.0;

    double cdf(double y) const { return normal_cdf((y - mu_g) / sigma_g); }
    double inv(double u) const { return mu_g + sigma_g * normal_quantile(u); }
};

struct RearrangeConfig {
    double b = 0.0;  // rearrangement bandwidth
    KernelSpec kappa{KernelFamily::epanechnikov};
    int u_grid = 256;

    void validate() const {
        if (!(b > 0.0 && b < 0.5)) throw invalid_bandwidth_error("rearrangement bandwidth must be in (0, 1/2)");
        if (u_grid < 16) throw config_error("u_grid must be >= 16");
    }
};

inline GSpec select_g(const Dataset& data) {
    std::vector<double> sorted(data.y);
    std::sort(sorted.begin(), sorted.end());
    double q05 = quantile_type7_sorted(sorted, 0.05);
    double q95 = quantile_type7_sorted(sorted, 0.95);
    if (!(q95 > q05))
        throw degenerate_sample_error("select_g: 5% and 95% quantiles of Y coincide");
    double z95 = normal_quantile(0.95);
    return GSpec{0.5 * (q05 + q95), (q95 - q05) / (2.0 * z95)};
}

/// Midpoint u-grid nodes (j + 1/2)/m for the outer integral of H.
inline std::vector<double> u_grid_nodes(int m) {
    std::vector<double> u(m);
    for (int j = 0; j < m; ++j) u[j] = (j + 0.5) / m;
    return u;
}

/// The rearrangement functional H evaluated on a precomputed profile
/// F(G^{-1}(u_j)) over the midpoint u-grid. The inner v-integral of the
/// kernel is exact: (1/b) int_{-inf}^{tau} kappa((F - v)/b) dv
///   = 1 - CDF_kappa((F - tau)/b).
inline double h_functional(std::span<const double> f_on_g_grid, double tau,
                           const RearrangeConfig& cfg) {
    cfg.validate();
    if (!(tau > 0.0 && tau < 1.0)) throw invalid_level_error("tau must be in (0,1)");
    double acc = 0.0;
    for (double f : f_on_g_grid)
        acc += 1.0 - eval_cdf(cfg.kappa, (f - tau) / cfg.b);
    return acc / static_cast<double>(f_on_g_grid.size());
}

/// Non-crossing quantile estimator: G^{-1}(H(F_hat(.|x))).
inline double quantile_estimate(const Dataset& data, std::span<const double> x, double tau,
                                const EstimatorConfig& cfg, const RearrangeConfig& rcfg,
                                const GSpec& g) {
    LocalCdfFit fit(data, x, cfg);
    auto u = u_grid_nodes(rcfg.u_grid);
    std::vector<double> profile(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) profile[j] = fit.eval(g.inv(u[j]));
    double hval = h_functional(profile, tau, rcfg);
    hval = std::clamp(hval, 1e-9, 1.0 - 1e-9);
    return g.inv(hval);
}

}  // namespace qsig
