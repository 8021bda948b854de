#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qsig/bandwidth.hpp"
#include "qsig/bootstrap.hpp"
#include "qsig/dataset.hpp"
#include "qsig/errors.hpp"
#include "qsig/math.hpp"
#include "qsig/rearrangement.hpp"
#include "qsig/rng.hpp"
#include "qsig/test_process.hpp"

namespace qsig {

/// Location-scale simulation model Y = q_j(X,Z) + s_k(X,Z) eps with
/// X, Z ~ U[0,1] independent and eps standard normal. The 2D variants use
/// Z = (Z1, Z2) and a constant scale of 0.5.
struct Scenario {
    enum class Loc { q1, q2, q3, q4, q1_2d, q2_2d };
    enum class Scale { s1, s2, s3, s4, const_half };

    Loc loc = Loc::q1;
    Scale scale = Scale::s1;
    double tau = 0.5;
    int n = 50;

    int q_dim() const { return (loc == Loc::q1_2d || loc == Loc::q2_2d) ? 2 : 1; }

    static Scenario from_indices(int j, int k, double tau, int n) {
        if (j < 1 || j > 4 || k < 1 || k > 4) throw config_error("scenario indices must be in 1..4");
        Scenario sc;
        sc.loc = static_cast<Loc>(j - 1);
        sc.scale = static_cast<Scale>(k - 1);
        sc.tau = tau;
        sc.n = n;
        return sc;
    }

    static Scenario from_2d(int j, double tau, int n) {
        if (j < 1 || j > 2) throw config_error("2D scenario index must be 1 or 2");
        Scenario sc;
        sc.loc = (j == 1) ? Loc::q1_2d : Loc::q2_2d;
        sc.scale = Scale::const_half;
        sc.tau = tau;
        sc.n = n;
        return sc;
    }

    std::string label() const {
        switch (loc) {
            case Loc::q1_2d: return "2d-q1";
            case Loc::q2_2d: return "2d-q2";
            default: break;
        }
        return "(" + std::to_string(static_cast<int>(loc) + 1) + "," +
               std::to_string(static_cast<int>(scale) + 1) + ")";
    }

    std::uint64_t id() const {
        return (static_cast<std::uint64_t>(loc) << 8) | static_cast<std::uint64_t>(scale);
    }

    double location(double x, const double* z) const {
        switch (loc) {
            case Loc::q1: return std::exp(2.0 * x * x);
            case Loc::q2: return (x - 0.5) * (x - 0.5);
            case Loc::q3: return std::exp(2.0 * x * x) * z[0] * z[0];
            case Loc::q4: return std::sin(2.0 * pi * (x + z[0]));
            case Loc::q1_2d: return x;
            case Loc::q2_2d: return z[1] * x + z[0] * z[0];
        }
        return 0.0;
    }

    double scale_at(double x, const double* z) const {
        switch (scale) {
            case Scale::s1: return 0.5 * (x + 0.2);
            case Scale::s2: return 0.5 * (std::sin(x) + 1.2);
            case Scale::s3: return 0.5 * (z[0] + 0.2);
            case Scale::s4: return 0.5 * std::sqrt((x + 0.2) * (z[0] + 0.2));
            case Scale::const_half: return 0.5;
        }
        return 0.0;
    }
};

inline Dataset generate_dataset(const Scenario& sc, RngStream& rng) {
    Dataset data;
    data.n = sc.n;
    data.d = 1;
    data.q = sc.q_dim();
    data.x.resize(sc.n);
    data.z.resize(static_cast<std::size_t>(sc.n) * data.q);
    data.y.resize(sc.n);
    for (int i = 0; i < sc.n; ++i) {
        data.x[i] = rng.uniform();
        for (int j = 0; j < data.q; ++j) data.z[static_cast<std::size_t>(i) * data.q + j] = rng.uniform();
        double eps = rng.normal();
        const double* z = &data.z[static_cast<std::size_t>(i) * data.q];
        data.y[i] = sc.location(data.x[i], z) + sc.scale_at(data.x[i], z) * eps;
    }
    return data;
}

/// Ground-truth conditional tau-quantile of the location-scale model.
inline double true_quantile(const Scenario& sc, double tau, double x, const double* z) {
    return sc.location(x, z) + sc.scale_at(x, z) * normal_quantile(tau);
}

/// A scenario is null when the true quantile surface does not depend on z
/// (checked on a grid).
inline bool scenario_is_null(const Scenario& sc, double tau) {
    const int g = 9;
    for (int ix = 0; ix < g; ++ix) {
        double x = (ix + 0.5) / g;
        double z0[2] = {0.5 / g, 0.5 / g};
        double ref = true_quantile(sc, tau, x, z0);
        for (int iz = 0; iz < g; ++iz)
            for (int iz2 = 0; iz2 < (sc.q_dim() == 2 ? g : 1); ++iz2) {
                double z[2] = {(iz + 0.5) / g, (iz2 + 0.5) / g};
                if (std::fabs(true_quantile(sc, tau, x, z) - ref) > 1e-12) return false;
            }
    }
    return true;
}

struct RejectionRow {
    std::string scenario;
    double tau = 0.0;
    int n = 0;
    double alpha = 0.0;
    double rate = 0.0;
    int runs = 0;
    int failed = 0;
    double se = 0.0;
    double wall_seconds = 0.0;
    bool flagged = false;  // > 1% failed runs
};

struct RejectionTable {
    std::vector<RejectionRow> rows;
};

struct PowerStudyConfig {
    int runs = 200;
    int boot_reps = 300;
    std::vector<double> alphas{0.05};
    std::uint64_t seed = 0;
    int workers = 1;
    double h_override = 0.0;  // 0 = automatic Rice-rule bandwidths
};

/// One simulated test: generate, fit, bootstrap, decide at each alpha.
/// Streams are keyed on (seed, scenario id, run index); the bootstrap
/// stream nests inside the run stream.
inline std::vector<char> simulate_one_run(const Scenario& sc, int run_idx,
                                          const PowerStudyConfig& cfg) {
    RngStream rng = RngStream::derive(cfg.seed, {sc.id(), static_cast<std::uint64_t>(run_idx), 0});
    Dataset data = generate_dataset(sc, rng);

    BandwidthSet bw = bandwidths_for(data, cfg.h_override);
    GSpec g = select_g(data);
    EstimatorConfig ecfg;
    ecfg.h = bw.h;
    ecfg.d_smooth = bw.d_smooth;
    RearrangeConfig rcfg;
    rcfg.b = bw.b;

    QuantileFit fit = fit_quantile_curve(data, sc.tau, ecfg, rcfg, g);

    BootstrapConfig bcfg;
    bcfg.n_reps = cfg.boot_reps;
    bcfg.alpha = cfg.alphas.front();
    bcfg.bandwidths = bw;
    RngStream brng = RngStream::derive(cfg.seed, {sc.id(), static_cast<std::uint64_t>(run_idx), 1});
    bcfg.seed = brng.next();

    BootstrapRun run = bootstrap_draws(data, fit, bcfg);
    std::vector<char> decisions(cfg.alphas.size());
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a)
        decisions[a] = run.k_stat > bootstrap_quantile(run.draws, cfg.alphas[a]) ? 1 : 0;
    return decisions;
}

inline RejectionTable run_power_study(const std::vector<Scenario>& scenarios,
                                      const PowerStudyConfig& cfg) {
    if (cfg.runs < 1) throw config_error("runs must be >= 1");
    if (cfg.alphas.empty()) throw config_error("need at least one alpha");

    RejectionTable table;
    for (const auto& sc : scenarios) {
        auto t0 = std::chrono::steady_clock::now();
        const int runs = cfg.runs;
        const int na = static_cast<int>(cfg.alphas.size());
        // decision[r * na + a] in {0, 1}, -1 = failed run
        std::vector<signed char> decision(static_cast<std::size_t>(runs) * na, 0);
        std::atomic<int> next{0};

        auto worker = [&]() {
            for (;;) {
                int r = next.fetch_add(1);
                if (r >= runs) break;
                try {
                    auto dec = simulate_one_run(sc, r, cfg);
                    for (int a = 0; a < na; ++a)
                        decision[static_cast<std::size_t>(r) * na + a] = dec[a];
                } catch (const std::exception&) {
                    for (int a = 0; a < na; ++a)
                        decision[static_cast<std::size_t>(r) * na + a] = -1;
                }
            }
        };
        int nworkers = std::max(1, cfg.workers);
        std::vector<std::thread> pool;
        for (int w = 1; w < nworkers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();

        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (int a = 0; a < na; ++a) {
            int rej = 0, failed = 0;
            for (int r = 0; r < runs; ++r) {
                signed char v = decision[static_cast<std::size_t>(r) * na + a];
                if (v < 0)
                    ++failed;
                else
                    rej += v;
            }
            RejectionRow row;
            row.scenario = sc.label();
            row.tau = sc.tau;
            row.n = sc.n;
            row.alpha = cfg.alphas[a];
            row.runs = runs - failed;
            row.failed = failed;
            row.rate = row.runs > 0 ? static_cast<double>(rej) / row.runs : 0.0;
            row.se = row.runs > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / row.runs) : 0.0;
            row.wall_seconds = wall;
            row.flagged = failed > runs / 100;
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace qsig
