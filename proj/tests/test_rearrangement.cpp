#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsig/rearrangement.hpp"
#include "qsig/rng.hpp"

using namespace qsig;

namespace {

Dataset model_dataset(int n, RngStream& rng) {
    Dataset data;
    data.n = n;
    data.d = 1;
    data.q = 1;
    data.x.resize(n);
    data.y.resize(n);
    data.z.resize(n);
    for (int i = 0; i < n; ++i) {
        data.x[i] = rng.uniform();
        data.z[i] = rng.uniform();
        data.y[i] = data.x[i] + 0.5 * rng.normal();
    }
    return data;
}

// Brute-force oracle: isotonize the CDF profile by running maximum and
// invert at tau by bisection over the y-grid, independent of H.
double isotonize_invert_oracle(const Dataset& data, double x, double tau,
                               const EstimatorConfig& cfg, const GSpec& g) {
    auto u = u_grid_nodes(256);
    std::vector<double> ys(u.size()), f(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) ys[j] = g.inv(u[j]);
    auto prof = estimate_cdf_profile(data, std::vector<double>{x}, ys, cfg);
    double run = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
        run = std::max(run, prof[j]);
        f[j] = run;
    }
    for (std::size_t j = 0; j < f.size(); ++j)
        if (f[j] >= tau) return ys[j];
    return ys.back();
}

RearrangeConfig rcfg_with(double b) {
    RearrangeConfig cfg;
    cfg.b = b;
    return cfg;
}

}  // namespace

TEST_CASE("select_g matches the empirical 5/95 quantiles") {
    SUBCASE("standard normal sample") {
        RngStream rng(5);
        Dataset data;
        data.n = 100000;
        data.d = data.q = 1;
        data.x.assign(data.n, 0.0);
        data.z.assign(data.n, 0.0);
        data.y.resize(data.n);
        for (auto& v : data.y) v = rng.normal();
        GSpec g = select_g(data);
        CHECK(g.mu_g == doctest::Approx(0.0).epsilon(1.0).scale(0.02));
        CHECK(std::fabs(g.mu_g) < 0.02);
        CHECK(std::fabs(g.sigma_g - 1.0) < 0.02);
    }
    SUBCASE("sample symmetric about 3") {
        Dataset data;
        data.n = 41;
        data.d = data.q = 1;
        data.x.assign(data.n, 0.0);
        data.z.assign(data.n, 0.0);
        for (int i = 0; i < data.n; ++i) data.y.push_back(3.0 + (i - 20) * 0.1);
        GSpec g = select_g(data);
        CHECK(g.mu_g == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("evenly spaced 1..100") {
        Dataset data;
        data.n = 100;
        data.d = data.q = 1;
        data.x.assign(data.n, 0.0);
        data.z.assign(data.n, 0.0);
        for (int i = 1; i <= 100; ++i) data.y.push_back(i);
        std::vector<double> sorted(data.y);
        double q05 = quantile_type7_sorted(sorted, 0.05);
        double q95 = quantile_type7_sorted(sorted, 0.95);
        GSpec g = select_g(data);
        CHECK(g.mu_g == doctest::Approx(0.5 * (q05 + q95)).epsilon(1e-12));
        CHECK(g.sigma_g ==
              doctest::Approx((q95 - q05) / (2.0 * normal_quantile(0.95))).epsilon(1e-12));
    }
    SUBCASE("degenerate Y") {
        Dataset data;
        data.n = 50;
        data.d = data.q = 1;
        data.x.assign(data.n, 0.0);
        data.z.assign(data.n, 0.0);
        data.y.assign(data.n, 2.0);
        CHECK_THROWS_AS(select_g(data), degenerate_sample_error);
    }
}

TEST_CASE("GSpec round-trips") {
    GSpec g{1.5, 2.5};
    for (double u : {0.001, 0.01, 0.25, 0.5, 0.9, 0.999})
        CHECK(g.cdf(g.inv(u)) == doctest::Approx(u).epsilon(1e-12));
}

TEST_CASE("H of the identity profile is tau") {
    auto u = u_grid_nodes(256);
    for (double tau : {0.1, 0.25, 0.5, 0.8, 0.9}) {
        double h = h_functional(u, tau, rcfg_with(0.05));
        CHECK(std::fabs(h - tau) < 1e-6);
        // smaller b means the kink of the inner integral is less resolved;
        // the outer-quadrature error stays tiny but grows
        CHECK(std::fabs(h_functional(u, tau, rcfg_with(0.02)) - tau) < 1e-5);
    }
}

TEST_CASE("H at the constant extremes") {
    std::vector<double> zeros(256, 0.0), ones(256, 1.0);
    CHECK(h_functional(zeros, 0.3, rcfg_with(0.05)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h_functional(ones, 0.7, rcfg_with(0.05)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(h_functional(zeros, 0.0, rcfg_with(0.05)), invalid_level_error);
    CHECK_THROWS_AS(h_functional(zeros, 1.2, rcfg_with(0.05)), invalid_level_error);
}

TEST_CASE("H is monotone in the profile") {
    RngStream rng(3);
    auto u = u_grid_nodes(128);
    std::vector<double> f1(u.size()), f2(u.size());
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        a1 = std::min(1.0, a1 + 0.02 * rng.uniform());
        a2 = std::min(1.0, a2 + 0.02 * rng.uniform());
        f1[j] = std::min(a1, a2);
        f2[j] = std::max(a1, a2);
    }
    RearrangeConfig cfg = rcfg_with(0.05);
    for (double tau : {0.25, 0.5, 0.75})
        CHECK(h_functional(f1, tau, cfg) >= h_functional(f2, tau, cfg));
}

TEST_CASE("rearranged quantile of a degenerate response stays near it") {
    Dataset data;
    data.n = 30;
    data.d = data.q = 1;
    RngStream rng(17);
    const double c = 0.8;
    for (int i = 0; i < data.n; ++i) {
        data.x.push_back(rng.uniform());
        data.z.push_back(0.0);
        data.y.push_back(c);
    }
    EstimatorConfig cfg;
    cfg.h = 0.3;
    cfg.d_smooth = 0.1;
    GSpec g{c, 0.5};
    RearrangeConfig rcfg = rcfg_with(0.02);
    for (double tau : {0.25, 0.5, 0.75}) {
        double qhat = quantile_estimate(data, std::vector<double>{0.5}, tau, cfg, rcfg, g);
        CHECK(std::fabs(qhat - c) <= cfg.d_smooth + 10.0 * rcfg.b * g.sigma_g);
    }
}

TEST_CASE("median curve of the location model is recovered") {
    RngStream rng(23);
    Dataset data = model_dataset(2000, rng);
    EstimatorConfig cfg;
    cfg.h = 0.15;
    cfg.d_smooth = 0.15;
    GSpec g = select_g(data);
    RearrangeConfig rcfg = rcfg_with(std::max(0.15 * 0.15 * 0.15, 1e-4));
    double qhat = quantile_estimate(data, std::vector<double>{0.5}, 0.5, cfg, rcfg, g);
    CHECK(qhat == doctest::Approx(0.5).epsilon(1.0).scale(1.0));
    CHECK(std::fabs(qhat - 0.5) < 0.05);

    double oracle = isotonize_invert_oracle(data, 0.5, 0.5, cfg, g);
    CHECK(std::fabs(qhat - oracle) <= 2.0 * rcfg.b * g.sigma_g + 0.02);
}

TEST_CASE("quantile curves never cross") {
    RngStream rng(29);
    Dataset data = model_dataset(300, rng);
    EstimatorConfig cfg;
    cfg.h = 0.2;
    cfg.d_smooth = 0.2;
    GSpec g = select_g(data);
    RearrangeConfig rcfg = rcfg_with(0.01);
    std::vector<double> taus;
    for (int t = 1; t <= 9; ++t) taus.push_back(t / 10.0);
    for (int ix = 0; ix < 50; ++ix) {
        double x = (ix + 0.5) / 50.0;
        double prev = -HUGE_VAL;
        for (double tau : taus) {
            double qv = quantile_estimate(data, std::vector<double>{x}, tau, cfg, rcfg, g);
            CHECK(qv >= prev);
            prev = qv;
        }
    }
}

TEST_CASE("rearrangement bias vanishes at least quadratically in b") {
    // F = G = standard normal makes F(G^{-1}(u)) the identity, for which
    // the operator is exact; halving b must not grow the error.
    GSpec g{0.0, 1.0};
    auto u = u_grid_nodes(256);
    std::vector<double> profile(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) profile[j] = normal_cdf(g.inv(u[j]));
    for (double tau : {0.25, 0.5, 0.75}) {
        std::vector<double> errs;
        for (double b : {0.1, 0.05, 0.025}) {
            double h = std::clamp(h_functional(profile, tau, rcfg_with(b)), 1e-9, 1.0 - 1e-9);
            errs.push_back(std::fabs(g.inv(h) - normal_quantile(tau)));
        }
        for (std::size_t k = 1; k < errs.size(); ++k) CHECK(3.0 * errs[k] <= errs[k - 1] + 1e-12);
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(rcfg_with(0.0).validate(), invalid_bandwidth_error);
    CHECK_THROWS_AS(rcfg_with(0.6).validate(), invalid_bandwidth_error);
    RearrangeConfig cfg = rcfg_with(0.05);
    cfg.u_grid = 4;
    CHECK_THROWS_AS(cfg.validate(), config_error);
}
