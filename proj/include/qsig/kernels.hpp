#pragma once

#include <cmath>
#include <span>
#include <string>

#include "qsig/errors.hpp"
#include "qsig/math.hpp"

namespace qsig {

enum class KernelFamily { gaussian, epanechnikov, quartic_order4 };

/// One-dimensional kernel with a closed-form CDF.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;

    static KernelSpec from_name(const std::string& name) {
        if (name == "gaussian") return {KernelFamily::gaussian};
        if (name == "epanechnikov") return {KernelFamily::epanechnikov};
        if (name == "quartic4") return {KernelFamily::quartic_order4};
        throw config_error("unknown kernel family: " + name);
    }

    const char* name() const {
        switch (family) {
            case KernelFamily::gaussian: return "gaussian";
            case KernelFamily::epanechnikov: return "epanechnikov";
            case KernelFamily::quartic_order4: return "quartic4";
        }
        return "?";
    }

    bool compact_support() const { return family != KernelFamily::gaussian; }
};

inline double eval_density(KernelSpec spec, double u) {
    switch (spec.family) {
        case KernelFamily::gaussian:
            return normal_pdf(u);
        case KernelFamily::epanechnikov:
            if (u < -1.0 || u > 1.0) return 0.0;
            return 0.75 * (1.0 - u * u);
        case KernelFamily::quartic_order4:
            // (15/32)(3 - 10u^2 + 7u^4) on [-1,1]; an order-4 kernel, takes
            // negative values near the support edges.
            if (u < -1.0 || u > 1.0) return 0.0;
            return (15.0 / 32.0) * (3.0 - 10.0 * u * u + 7.0 * u * u * u * u);
    }
    return 0.0;
}

/// Exact antiderivative of the density from the left support edge.
inline double eval_cdf(KernelSpec spec, double u) {
    switch (spec.family) {
        case KernelFamily::gaussian:
            return normal_cdf(u);
        case KernelFamily::epanechnikov:
            if (u <= -1.0) return 0.0;
            if (u >= 1.0) return 1.0;
            return 0.5 + 0.75 * u - 0.25 * u * u * u;
        case KernelFamily::quartic_order4: {
            if (u <= -1.0) return 0.0;
            if (u >= 1.0) return 1.0;
            double u3 = u * u * u;
            double u5 = u3 * u * u;
            return 0.5 + (15.0 / 32.0) * (3.0 * u - (10.0 / 3.0) * u3 + (7.0 / 5.0) * u5);
        }
    }
    return 0.0;
}

/// Smoothed indicator Omega: the CDF of the quartic kernel clamped to [0,1].
/// The raw antiderivative overshoots [0,1] near the support edges (the
/// kernel is negative there); clamping restores monotonicity.
inline double omega_smoothed_indicator(double v) {
    return clamp01(eval_cdf(KernelSpec{KernelFamily::quartic_order4}, v));
}

/// Product kernel with monomial weight:
///   prod_j K(x_diff_j / h) * prod_j (x_diff_j / h)^{multi_index_j}.
inline double product_kernel(KernelSpec spec, std::span<const double> x_diff, double h,
                             std::span<const int> multi_index) {
    if (!(h > 0.0)) throw invalid_bandwidth_error("product_kernel: bandwidth must be positive");
    double out = 1.0;
    for (std::size_t j = 0; j < x_diff.size(); ++j) {
        double u = x_diff[j] / h;
        out *= eval_density(spec, u);
        int m = multi_index.empty() ? 0 : multi_index[j];
        for (int r = 0; r < m; ++r) out *= u;
    }
    return out;
}

/// The kernel roles of the estimator and bootstrap:
///   k_smooth: local-polynomial weights, omega: y-smoothing,
///   kappa: rearrangement, l_boot/n_boot: conditional-CDF weights.
struct KernelBundle {
    KernelSpec k_smooth{KernelFamily::gaussian};
    KernelSpec omega{KernelFamily::quartic_order4};
    KernelSpec kappa{KernelFamily::epanechnikov};
    KernelSpec l_boot{KernelFamily::gaussian};
    KernelSpec n_boot{KernelFamily::gaussian};
};

}  // namespace qsig
