#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qsig/bandwidth.hpp"
#include "qsig/dataset.hpp"
#include "qsig/errors.hpp"
#include "qsig/kernels.hpp"
#include "qsig/rng.hpp"
#include "qsig/test_process.hpp"

namespace qsig {

struct BootstrapConfig {
    int n_reps = 300;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    BandwidthSet bandwidths{};
    KernelBundle kernels{};

    void validate() const {
        if (n_reps < 1) throw config_error("bootstrap replications must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_level_error("alpha must be in (0,1)");
    }
};

struct TestOutcome {
    double k_stat = 0.0;
    double boot_quantile = 0.0;
    double p_value = 1.0;
    bool reject = false;
    std::vector<double> boot_draws;
    std::vector<double> argmax_x;  // threshold coordinates of the maximising cell
    std::vector<double> argmax_z;
};

/// Kernel estimate of F_{Z|X,eps}(z | x, y): Gaussian product weights in X
/// and the residual, weighted empirical CDF of Z.
inline double cond_dist_z(const Dataset& data, const QuantileFit& fit, std::span<const double> z,
                          std::span<const double> x, const BandwidthSet& bw, double y = 0.0,
                          const KernelBundle& kernels = {}) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < data.n; ++j) {
        double w = 1.0;
        for (int k = 0; k < data.d; ++k)
            w *= eval_density(kernels.l_boot, (data.x_at(j, k) - x[k]) / bw.a);
        w *= eval_density(kernels.n_boot, (fit.resid[j] - y) / bw.e);
        den += w;
        bool leq = true;
        for (int k = 0; k < data.q && leq; ++k)
            if (data.z_at(j, k) > z[k]) leq = false;
        if (leq) num += w;
    }
    if (!(den > 0.0)) throw empty_window_error("cond_dist_z: empty kernel window");
    return num / den;
}

namespace detail {

/// C(i, z-node) = I{Z_i <= z} - F_hat_{Z|X,eps}(z | X_i, 0), precomputed
/// once per dataset; bootstrap replicates only swap the multipliers.
inline std::vector<double> centering_matrix(const Dataset& data, const QuantileFit& fit,
                                            const EvalGrid& grid, const BandwidthSet& bw,
                                            const KernelBundle& kernels) {
    const int n = data.n;
    // pairwise weights w(i, j) = L((X_j - X_i)/a) N(eps_j / e)
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = 1.0;
            for (int k = 0; k < data.d; ++k)
                v *= eval_density(kernels.l_boot, (data.x_at(j, k) - data.x_at(i, k)) / bw.a);
            v *= eval_density(kernels.n_boot, fit.resid[j] / bw.e);
            w[static_cast<std::size_t>(i) * n + j] = v;
        }

    std::vector<double> c(static_cast<std::size_t>(n) * grid.gz);
    std::vector<char> leq(n);
    for (int iz = 0; iz < grid.gz; ++iz) {
        auto znode = grid.z_node(iz);
        for (int j = 0; j < n; ++j) leq[j] = leq_all(data, j, znode, true) ? 1 : 0;
        for (int i = 0; i < n; ++i) {
            const double* wi = &w[static_cast<std::size_t>(i) * n];
            double num = 0.0, den = 0.0;
            for (int j = 0; j < n; ++j) {
                den += wi[j];
                if (leq[j]) num += wi[j];
            }
            if (!(den > 0.0)) throw empty_window_error("bootstrap centering: empty kernel window");
            double ind = leq[i] ? 1.0 : 0.0;
            c[static_cast<std::size_t>(i) * grid.gz + iz] = ind - num / den;
        }
    }
    return c;
}

}  // namespace detail

/// Bootstrap process surface for explicit multipliers B (test hook and
/// building block of bootstrap_ks):
///   T*_n(x,z) = (1/n) sum_i (B_i - tau_hat) I{X_i <= x} C(i, z).
inline ProcessSurface t_star_surface(const Dataset& data, const QuantileFit& fit,
                                     std::span<const int> b_draws, const BandwidthSet& bw,
                                     const KernelBundle& kernels = {}) {
    ProcessSurface s;
    s.grid = make_eval_grid(data);
    const auto& grid = s.grid;
    auto cmat = detail::centering_matrix(data, fit, grid, bw, kernels);
    s.values.assign(static_cast<std::size_t>(grid.gx) * grid.gz, 0.0);
    detail::XAccumulator acc(data, grid);
    std::vector<double> c(data.n), col(grid.gx);
    for (int iz = 0; iz < grid.gz; ++iz) {
        for (int i = 0; i < data.n; ++i)
            c[i] = (b_draws[i] - fit.tau_hat) * cmat[static_cast<std::size_t>(i) * grid.gz + iz];
        acc.accumulate(c, col);
        for (int ix = 0; ix < grid.gx; ++ix)
            s.values[static_cast<std::size_t>(ix) * grid.gz + iz] = col[ix] / data.n;
    }
    detail::finalize_surface(s);
    return s;
}

/// Order-statistic quantile of the bootstrap draws: the ceil((1-alpha)*R)-th
/// smallest value.
inline double bootstrap_quantile(std::vector<double> draws, double alpha) {
    std::sort(draws.begin(), draws.end());
    std::size_t r = draws.size();
    std::size_t k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(r)));
    k = std::min(std::max<std::size_t>(k, 1), r);
    return draws[k - 1];
}

/// Raw bootstrap run: the observed statistic, its argmax and the K* draws.
/// Decisions at any alpha can be derived without re-running.
struct BootstrapRun {
    double k_stat = 0.0;
    std::vector<double> draws;
    std::vector<double> argmax_x;
    std::vector<double> argmax_z;
};

inline BootstrapRun bootstrap_draws(const Dataset& data, const QuantileFit& fit,
                                    const BootstrapConfig& cfg) {
    cfg.validate();
    BootstrapRun run;

    ProcessSurface observed = t_tilde_surface(data, fit);
    run.k_stat = observed.sup_abs;
    auto ax = observed.grid.x_node(observed.argmax_x);
    auto az = observed.grid.z_node(observed.argmax_z);
    run.argmax_x.assign(ax.begin(), ax.end());
    run.argmax_z.assign(az.begin(), az.end());

    const auto& grid = observed.grid;
    auto cmat = detail::centering_matrix(data, fit, grid, cfg.bandwidths, cfg.kernels);
    detail::XAccumulator acc(data, grid);

    run.draws.resize(cfg.n_reps);
    std::vector<double> c(data.n), col(grid.gx);
    std::vector<int> b(data.n);
    for (int r = 0; r < cfg.n_reps; ++r) {
        RngStream rng = RngStream::derive(cfg.seed, {static_cast<std::uint64_t>(r)});
        for (int i = 0; i < data.n; ++i) b[i] = rng.bernoulli(fit.tau_hat) ? 1 : 0;
        double sup = 0.0;
        for (int iz = 0; iz < grid.gz; ++iz) {
            for (int i = 0; i < data.n; ++i)
                c[i] = (b[i] - fit.tau_hat) * cmat[static_cast<std::size_t>(i) * grid.gz + iz];
            acc.accumulate(c, col);
            for (int ix = 0; ix < grid.gx; ++ix) sup = std::max(sup, std::fabs(col[ix]));
        }
        run.draws[r] = sup / data.n;
    }
    return run;
}

inline TestOutcome outcome_at_level(const BootstrapRun& run, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_level_error("alpha must be in (0,1)");
    TestOutcome out;
    out.k_stat = run.k_stat;
    out.boot_draws = run.draws;
    out.argmax_x = run.argmax_x;
    out.argmax_z = run.argmax_z;
    out.boot_quantile = bootstrap_quantile(run.draws, alpha);
    int ge = 0;
    for (double v : run.draws)
        if (v >= run.k_stat) ++ge;
    out.p_value = (1.0 + ge) / (1.0 + static_cast<double>(run.draws.size()));
    out.reject = run.k_stat > out.boot_quantile;
    return out;
}

/// Full wild-bootstrap KS test.
inline TestOutcome bootstrap_ks(const Dataset& data, const QuantileFit& fit,
                                const BootstrapConfig& cfg) {
    return outcome_at_level(bootstrap_draws(data, fit, cfg), cfg.alpha);
}

}  // namespace qsig
