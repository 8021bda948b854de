#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qsig/bootstrap.hpp"
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

QuantileFit noise_fit(const Dataset& data, RngStream& rng) {
    QuantileFit fit;
    fit.tau = 0.5;
    fit.qhat.assign(data.n, 0.0);
    fit.resid.resize(data.n);
    for (int i = 0; i < data.n; ++i) fit.resid[i] = rng.normal();
    int nonpos = 0;
    for (double r : fit.resid)
        if (r <= 0) ++nonpos;
    fit.tau_hat = static_cast<double>(nonpos) / data.n;
    return fit;
}

BandwidthSet hand_bw(double h) {
    BandwidthSet bw;
    bw.h = bw.d_smooth = bw.a = bw.e = h;
    bw.b = h * h * h;
    return bw;
}

// Direct enumeration of the weighted conditional CDF of Z, independent of
// cond_dist_z.
double cond_dist_brute(const Dataset& data, const QuantileFit& fit, double z, double x,
                       const BandwidthSet& bw) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < data.n; ++j) {
        double w = normal_pdf((data.x[j] - x) / bw.a) * normal_pdf(fit.resid[j] / bw.e);
        den += w;
        if (data.z[j] <= z) num += w;
    }
    return num / den;
}

}  // namespace

TEST_CASE("conditional distribution of Z at the edges") {
    RngStream rng(3);
    Dataset data = model_dataset(25, rng);
    QuantileFit fit = noise_fit(data, rng);
    BandwidthSet bw = hand_bw(0.25);
    double zmax = *std::max_element(data.z.begin(), data.z.end());
    double zmin = *std::min_element(data.z.begin(), data.z.end());
    CHECK(cond_dist_z(data, fit, std::vector<double>{zmax}, std::vector<double>{0.4}, bw) == 1.0);
    CHECK(cond_dist_z(data, fit, std::vector<double>{zmin - 0.01}, std::vector<double>{0.4}, bw) ==
          0.0);
}

TEST_CASE("two point conditional distribution by hand") {
    Dataset data;
    data.n = 2;
    data.d = data.q = 1;
    data.x = {0.2, 0.7};
    data.z = {0.3, 0.9};
    data.y = {0.0, 0.0};
    QuantileFit fit;
    fit.tau = fit.tau_hat = 0.5;
    fit.qhat = {0.1, -0.2};
    fit.resid = {-0.1, 0.2};
    BandwidthSet bw = hand_bw(0.3);
    double x = 0.5;
    double w1 = normal_pdf((0.2 - x) / 0.3) * normal_pdf(-0.1 / 0.3);
    double w2 = normal_pdf((0.7 - x) / 0.3) * normal_pdf(0.2 / 0.3);
    // only Z_1 <= 0.5
    CHECK(cond_dist_z(data, fit, std::vector<double>{0.5}, std::vector<double>{x}, bw) ==
          doctest::Approx(w1 / (w1 + w2)).epsilon(1e-14));
}

TEST_CASE("conditional distribution is monotone in z and matches brute force") {
    RngStream rng(5);
    Dataset data = model_dataset(30, rng);
    QuantileFit fit = noise_fit(data, rng);
    BandwidthSet bw = hand_bw(0.2);
    double prev = -1.0;
    for (int k = 0; k <= 40; ++k) {
        double z = -0.1 + k * 0.03;
        double v = cond_dist_z(data, fit, std::vector<double>{z}, std::vector<double>{0.5}, bw);
        CHECK(v >= prev);
        CHECK(v == doctest::Approx(cond_dist_brute(data, fit, z, 0.5, bw)).epsilon(1e-12));
        prev = v;
    }
}

TEST_CASE("empty window raises for compact-support bootstrap kernels") {
    RngStream rng(6);
    Dataset data = model_dataset(20, rng);
    QuantileFit fit = noise_fit(data, rng);
    BandwidthSet bw = hand_bw(0.05);
    KernelBundle kernels;
    kernels.l_boot = KernelSpec{KernelFamily::epanechnikov};
    CHECK_THROWS_AS(cond_dist_z(data, fit, std::vector<double>{0.5}, std::vector<double>{9.0}, bw,
                                0.0, kernels),
                    empty_window_error);
}

TEST_CASE("hand 3-point bootstrap surface matches enumeration") {
    Dataset data;
    data.n = 3;
    data.d = data.q = 1;
    data.x = {1.0, 2.0, 3.0};
    data.z = {3.0, 1.0, 2.0};
    data.y = {0.0, 0.0, 0.0};
    QuantileFit fit;
    fit.tau = 0.5;
    fit.tau_hat = 2.0 / 3.0;
    fit.qhat = {0.0, 0.0, 0.0};
    fit.resid = {-0.5, -0.25, 0.75};
    BandwidthSet bw = hand_bw(0.5);
    std::vector<int> b{1, 0, 1};

    ProcessSurface s = t_star_surface(data, fit, b, bw);
    REQUIRE(s.grid.gx == 3);
    REQUIRE(s.grid.gz == 3);
    for (int ix = 0; ix < 3; ++ix)
        for (int iz = 0; iz < 3; ++iz) {
            double acc = 0.0;
            for (int i = 0; i < 3; ++i) {
                if (data.x[i] > s.grid.xs[ix]) continue;
                double ind = data.z[i] <= s.grid.zs[iz] ? 1.0 : 0.0;
                double chat = cond_dist_brute(data, fit, s.grid.zs[iz], data.x[i], bw);
                acc += (b[i] - fit.tau_hat) * (ind - chat);
            }
            CHECK(s.at(ix, iz) == doctest::Approx(acc / 3.0).scale(1.0).epsilon(1e-13));
        }
}

TEST_CASE("bootstrap with tau_hat zero is degenerate") {
    RngStream rng(9);
    Dataset data = model_dataset(20, rng);
    QuantileFit fit;
    fit.tau = 0.5;
    fit.qhat.assign(data.n, 0.0);
    fit.resid.assign(data.n, 1.0);  // all positive: tau_hat = 0
    fit.tau_hat = 0.0;
    BootstrapConfig cfg;
    cfg.n_reps = 50;
    cfg.alpha = 0.05;
    cfg.bandwidths = hand_bw(0.3);
    TestOutcome out = bootstrap_ks(data, fit, cfg);
    CHECK(out.boot_quantile == 0.0);
    for (double v : out.boot_draws) CHECK(v == 0.0);
    CHECK(out.reject == (out.k_stat > 0.0));
}

TEST_CASE("bootstrap draws live in [0,1] and the quantile is monotone in alpha") {
    RngStream rng(10);
    Dataset data = model_dataset(40, rng);
    QuantileFit fit = noise_fit(data, rng);
    BootstrapConfig cfg;
    cfg.n_reps = 200;
    cfg.alpha = 0.05;
    cfg.seed = 77;
    cfg.bandwidths = hand_bw(0.25);
    BootstrapRun run = bootstrap_draws(data, fit, cfg);
    for (double v : run.draws) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    double prev = HUGE_VAL;
    for (double a : {0.01, 0.05, 0.1, 0.25, 0.5}) {
        double q = bootstrap_quantile(run.draws, a);
        CHECK(q <= prev);
        prev = q;
    }
}

TEST_CASE("bootstrap quantile order-statistic convention") {
    std::vector<double> draws;
    for (int i = 1; i <= 300; ++i) draws.push_back(i / 300.0);
    // ceil(0.95 * 300) = 285
    CHECK(bootstrap_quantile(draws, 0.05) == doctest::Approx(285.0 / 300.0).epsilon(1e-14));
    // and the p-value convention (1 + #{K* >= k}) / (1 + R)
    BootstrapRun run;
    run.k_stat = 0.5;
    run.draws = draws;
    TestOutcome out = outcome_at_level(run, 0.05);
    CHECK(out.p_value == doctest::Approx((1.0 + 151.0) / 301.0).epsilon(1e-14));
}

TEST_CASE("identical configuration gives bit-identical outcomes") {
    RngStream rng(11);
    Dataset data = model_dataset(35, rng);
    QuantileFit fit = noise_fit(data, rng);
    BootstrapConfig cfg;
    cfg.n_reps = 120;
    cfg.alpha = 0.1;
    cfg.seed = 99;
    cfg.bandwidths = hand_bw(0.3);
    TestOutcome a = bootstrap_ks(data, fit, cfg);
    TestOutcome b = bootstrap_ks(data, fit, cfg);
    CHECK(a.k_stat == b.k_stat);
    CHECK(a.boot_quantile == b.boot_quantile);
    CHECK(a.p_value == b.p_value);
    CHECK(a.boot_draws == b.boot_draws);
}

TEST_CASE("replicate mean of the bootstrap process is centered") {
    RngStream rng(13);
    Dataset data = model_dataset(15, rng);
    QuantileFit fit = noise_fit(data, rng);
    BandwidthSet bw = hand_bw(0.3);
    const int reps = 2000;
    // fixed (x, z): middle thresholds
    ProcessSurface probe = t_star_surface(data, fit, std::vector<int>(data.n, 0), bw);
    int ix = probe.grid.gx / 2, iz = probe.grid.gz / 2;
    double mean = 0.0, m2 = 0.0;
    std::vector<double> vals(reps);
    RngStream brng(555);
    std::vector<int> b(data.n);
    for (int r = 0; r < reps; ++r) {
        for (int i = 0; i < data.n; ++i) b[i] = brng.bernoulli(fit.tau_hat) ? 1 : 0;
        vals[r] = t_star_surface(data, fit, b, bw).at(ix, iz);
        mean += vals[r];
    }
    mean /= reps;
    for (double v : vals) m2 += (v - mean) * (v - mean);
    double sd = std::sqrt(m2 / (reps - 1));
    CHECK(std::fabs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(reps)) + 1e-12);
}

TEST_CASE("config validation") {
    BootstrapConfig cfg;
    cfg.n_reps = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg.n_reps = 10;
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), invalid_level_error);
    CHECK_THROWS_AS(outcome_at_level(BootstrapRun{}, 1.5), invalid_level_error);
}
