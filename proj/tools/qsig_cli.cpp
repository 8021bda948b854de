// Command-line front end: `test` runs the bootstrap significance test on a
// CSV file, `simulate` reproduces the Monte Carlo rejection tables,
// `limit` samples the distribution-free limit.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsig/qsig.hpp"

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json bandwidths_json(const qsig::BandwidthSet& bw) {
    return ordered_json{{"h", bw.h}, {"d_smooth", bw.d_smooth}, {"b", bw.b}, {"a", bw.a}, {"e", bw.e}};
}

struct TestOptions {
    std::string data_path;
    std::string y_col = "y";
    std::vector<std::string> x_cols{"x"};
    std::vector<std::string> z_cols{"z"};
    double tau = 0.5;
    double alpha = 0.05;
    int bootstrap = 300;
    std::uint64_t seed = 0;
    double bandwidth_h = 0.0;
    std::string format = "table";
    bool trim_boundary = false;
};

int cmd_test(const TestOptions& opt) {
    if (!(opt.tau > 0.0 && opt.tau < 1.0)) throw qsig::invalid_level_error("tau must be in (0,1)");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0))
        throw qsig::invalid_level_error("alpha must be in (0,1)");

    std::string warning;
    qsig::Dataset data =
        qsig::load_csv(opt.data_path, {opt.y_col, opt.x_cols, opt.z_cols}, &warning);
    if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
    if (data.n < 10)
        throw qsig::sample_too_small_error("the test needs at least 10 rows, got " +
                                           std::to_string(data.n));

    qsig::BandwidthSet bw = qsig::bandwidths_for(data, opt.bandwidth_h);
    qsig::GSpec g = qsig::select_g(data);
    qsig::EstimatorConfig ecfg;
    ecfg.h = bw.h;
    ecfg.d_smooth = bw.d_smooth;
    qsig::RearrangeConfig rcfg;
    rcfg.b = bw.b;

    qsig::QuantileFit fit = qsig::fit_quantile_curve(data, opt.tau, ecfg, rcfg, g);

    qsig::BootstrapConfig bcfg;
    bcfg.n_reps = opt.bootstrap;
    bcfg.alpha = opt.alpha;
    bcfg.seed = opt.seed;
    bcfg.bandwidths = bw;
    qsig::TestOutcome out = qsig::bootstrap_ks(data, fit, bcfg);

    ordered_json report{{"k_stat", out.k_stat},
                        {"boot_quantile", out.boot_quantile},
                        {"p_value", out.p_value},
                        {"reject", out.reject},
                        {"tau_hat", fit.tau_hat},
                        {"bandwidths", bandwidths_json(bw)},
                        {"argmax", ordered_json{{"x", out.argmax_x}, {"z", out.argmax_z}}},
                        {"n_reps", opt.bootstrap},
                        {"seed", opt.seed}};
    if (opt.trim_boundary) {
        qsig::RegionSpec region;
        region.trim_boundary = true;
        region.h = bw.h;
        auto orig = qsig::t_original_surface(data, fit, region);
        report["k_stat_original_trimmed"] = orig.sup_abs;
    }

    if (opt.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "K~_n          = " << out.k_stat << "\n"
                  << "boot quantile = " << out.boot_quantile << " (alpha = " << opt.alpha << ")\n"
                  << "p-value       = " << out.p_value << "\n"
                  << "decision      = " << (out.reject ? "reject" : "fail to reject") << "\n"
                  << "tau_hat       = " << fit.tau_hat << "\n"
                  << "bandwidth h   = " << bw.h << " (d=a=e=h, b=" << bw.b << ")\n";
        std::cout << "argmax x      =";
        for (double v : out.argmax_x) std::cout << " " << v;
        std::cout << "\nargmax z      =";
        for (double v : out.argmax_z) std::cout << " " << v;
        std::cout << "\n";
        if (opt.trim_boundary)
            std::cout << "trimmed K_n   = " << report["k_stat_original_trimmed"].get<double>()
                      << "\n";
    }
    return 0;
}

struct SimulateOptions {
    std::vector<std::string> scenarios;
    double tau = 0.5;
    int n = 50;
    int runs = 200;
    int bootstrap = 300;
    std::vector<double> alphas{0.025, 0.05, 0.1};
    std::uint64_t seed = 0;
    int workers = 1;
    double bandwidth_h = 0.0;
    std::string format = "table";
    bool full_scale = false;
};

qsig::Scenario parse_scenario(const std::string& s, double tau, int n) {
    if (s == "q1" || s == "2d-q1") return qsig::Scenario::from_2d(1, tau, n);
    if (s == "q2" || s == "2d-q2") return qsig::Scenario::from_2d(2, tau, n);
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw qsig::config_error("scenario must be 'j,k' (indices 1..4) or 'q1'/'q2': " + s);
    try {
        int j = std::stoi(s.substr(0, comma));
        int k = std::stoi(s.substr(comma + 1));
        return qsig::Scenario::from_indices(j, k, tau, n);
    } catch (const std::invalid_argument&) {
        throw qsig::config_error("scenario must be 'j,k' (indices 1..4) or 'q1'/'q2': " + s);
    }
}

ordered_json table_json(const qsig::RejectionTable& table) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows)
        rows.push_back(ordered_json{{"scenario", r.scenario},
                                    {"tau", r.tau},
                                    {"n", r.n},
                                    {"alpha", r.alpha},
                                    {"rate", r.rate},
                                    {"runs", r.runs},
                                    {"failed", r.failed},
                                    {"se", r.se},
                                    {"flagged", r.flagged}});
    return ordered_json{{"rows", rows}};
}

void print_table_text(const qsig::RejectionTable& table, const std::vector<double>& alphas) {
    // row layout of the simulation tables: one row per scenario, one
    // column per alpha
    std::printf("%-8s %-6s %-6s", "(k,l)", "tau", "n");
    for (double a : alphas) std::printf("  alpha=%-6g", a);
    std::printf("\n");
    for (std::size_t i = 0; i < table.rows.size(); i += alphas.size()) {
        const auto& first = table.rows[i];
        std::printf("%-8s %-6g %-6d", first.scenario.c_str(), first.tau, first.n);
        for (std::size_t a = 0; a < alphas.size(); ++a)
            std::printf("  %-12.3f", table.rows[i + a].rate);
        if (first.failed > 0) std::printf("  (%d failed)", first.failed);
        std::printf("\n");
    }
}

int cmd_simulate(const SimulateOptions& opt) {
    if (opt.scenarios.empty()) throw qsig::config_error("at least one --scenario is required");
    std::vector<qsig::Scenario> scenarios;
    for (const auto& s : opt.scenarios) scenarios.push_back(parse_scenario(s, opt.tau, opt.n));

    qsig::PowerStudyConfig cfg;
    cfg.runs = opt.full_scale ? 1000 : opt.runs;
    cfg.boot_reps = opt.bootstrap;
    cfg.alphas = opt.alphas;
    cfg.seed = opt.seed;
    cfg.workers = opt.workers;
    cfg.h_override = opt.bandwidth_h;

    qsig::RejectionTable table = qsig::run_power_study(scenarios, cfg);
    if (opt.format == "json")
        std::cout << table_json(table).dump(2) << "\n";
    else
        print_table_text(table, opt.alphas);
    return 0;
}

struct LimitOptions {
    double tau = 0.5;
    int paths = 10000;
    int grid = 64;
    std::uint64_t seed = 0;
    std::string format = "table";
};

int cmd_limit(const LimitOptions& opt) {
    if (!(opt.tau > 0.0 && opt.tau < 1.0)) throw qsig::invalid_level_error("tau must be in (0,1)");
    qsig::LimitSample sample = qsig::kiefer_mueller_sup(opt.grid, opt.paths, opt.tau, opt.seed);
    std::sort(sample.draws.begin(), sample.draws.end());
    const std::vector<double> probs{0.5, 0.8, 0.9, 0.95, 0.975, 0.99};
    ordered_json quants = ordered_json::array();
    for (double p : probs)
        quants.push_back(ordered_json{{"prob", p},
                                      {"value", qsig::quantile_type7_sorted(sample.draws, p)}});
    ordered_json report{{"tau", opt.tau},
                        {"grid_m", opt.grid},
                        {"paths", opt.paths},
                        {"seed", opt.seed},
                        {"quantiles", quants}};
    if (opt.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::printf("%-8s %s\n", "prob", "quantile of sqrt(tau(1-tau)) sup|B|");
        for (double p : probs)
            std::printf("%-8g %.6f\n", p, qsig::quantile_type7_sorted(sample.draws, p));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bootstrap significance test for covariates in nonparametric quantile regression"};
    app.require_subcommand(1);

    TestOptions topt;
    auto* test = app.add_subcommand("test", "run the significance test on a CSV file");
    test->add_option("--data", topt.data_path, "input CSV file (header required)")->required();
    test->add_option("--y-col", topt.y_col, "response column name");
    test->add_option("--x-cols", topt.x_cols, "conditioning covariate columns")->delimiter(',');
    test->add_option("--z-cols", topt.z_cols, "tested covariate columns")->delimiter(',');
    test->add_option("--tau", topt.tau, "quantile level");
    test->add_option("--alpha", topt.alpha, "test level");
    test->add_option("--bootstrap", topt.bootstrap, "bootstrap replications");
    test->add_option("--seed", topt.seed, "RNG seed");
    test->add_option("--bandwidth-h", topt.bandwidth_h, "override the automatic bandwidth h");
    test->add_option("--format", topt.format, "output format: table | json")
        ->check(CLI::IsMember({"table", "json"}));
    test->add_flag("--trim-boundary", topt.trim_boundary,
                   "also report the boundary-trimmed uncentered statistic");

    SimulateOptions sopt;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection-probability study");
    sim->add_option("--scenario", sopt.scenarios, "scenario 'j,k' (1..4) or 'q1'/'q2' (2D)")
        ->required();
    sim->add_option("--tau", sopt.tau, "quantile level");
    sim->add_option("--n", sopt.n, "sample size per run");
    sim->add_option("--runs", sopt.runs, "simulation runs per scenario");
    sim->add_option("--bootstrap", sopt.bootstrap, "bootstrap replications per run");
    sim->add_option("--alpha", sopt.alphas, "test levels")->delimiter(',');
    sim->add_option("--seed", sopt.seed, "RNG seed");
    sim->add_option("--workers", sopt.workers, "worker threads");
    sim->add_option("--bandwidth-h", sopt.bandwidth_h, "fixed bandwidth h for all runs");
    sim->add_option("--format", sopt.format, "output format: table | json")
        ->check(CLI::IsMember({"table", "json"}));
    sim->add_flag("--full-scale", sopt.full_scale, "use 1000 runs");

    LimitOptions lopt;
    auto* limit = app.add_subcommand("limit", "simulate the distribution-free limit");
    limit->add_option("--tau", lopt.tau, "quantile level");
    limit->add_option("--paths", lopt.paths, "number of simulated paths");
    limit->add_option("--grid", lopt.grid, "grid resolution m");
    limit->add_option("--seed", lopt.seed, "RNG seed");
    limit->add_option("--format", lopt.format, "output format: table | json")
        ->check(CLI::IsMember({"table", "json"}));

    try {
        app.parse(argc, argv);
        if (test->parsed()) return cmd_test(topt);
        if (sim->parsed()) return cmd_simulate(sopt);
        if (limit->parsed()) return cmd_limit(lopt);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const qsig::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qsig::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const qsig::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
