#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qsig/dataset.hpp"
#include "qsig/errors.hpp"

namespace qsig {

/// The bandwidth recipe ties every smoothing parameter to h:
/// d_smooth = a = e = h and b = h^3.
struct BandwidthSet {
    double h = 0.0;
    double d_smooth = 0.0;
    double b = 0.0;
    double a = 0.0;
    double e = 0.0;
};

/// Difference-based residual variance estimate: sort by X, average squared
/// successive Y-differences / 2. For d > 1 the ordering is a greedy
/// nearest-neighbor path in X started at the smallest first coordinate.
inline double rice_variance(const Dataset& data) {
    const int n = data.n;
    if (n < 3) throw sample_too_small_error("rice_variance needs n >= 3");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (data.d == 1) {
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            if (data.x[i] != data.x[j]) return data.x[i] < data.x[j];
            return data.y[i] < data.y[j];
        });
    } else {
        int start = 0;
        for (int i = 1; i < n; ++i)
            if (data.x_at(i, 0) < data.x_at(start, 0)) start = i;
        std::vector<char> used(n, 0);
        order.clear();
        order.push_back(start);
        used[start] = 1;
        for (int step = 1; step < n; ++step) {
            int prev = order.back(), best = -1;
            double best_d2 = 0.0;
            for (int i = 0; i < n; ++i) {
                if (used[i]) continue;
                double d2 = 0.0;
                for (int j = 0; j < data.d; ++j) {
                    double diff = data.x_at(i, j) - data.x_at(prev, j);
                    d2 += diff * diff;
                }
                if (best < 0 || d2 < best_d2) {
                    best = i;
                    best_d2 = d2;
                }
            }
            order.push_back(best);
            used[best] = 1;
        }
    }

    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        double diff = data.y[order[i + 1]] - data.y[order[i]];
        acc += diff * diff;
    }
    return acc / (2.0 * (n - 1));
}

inline BandwidthSet default_bandwidths(double sigma2, int n) {
    if (!(sigma2 > 0.0)) throw invalid_variance_error("variance estimate must be positive");
    if (n < 3) throw sample_too_small_error("default_bandwidths needs n >= 3");
    double h = std::pow(sigma2 / (2.0 * n), 13.0 / 50.0);
    BandwidthSet bw;
    bw.h = h;
    bw.d_smooth = bw.a = bw.e = h;
    bw.b = std::max(h * h * h, 1e-4);
    return bw;
}

/// Convenience: Rice variance + power rule, with an optional user override
/// of h (the tied bandwidths follow the override).
inline BandwidthSet bandwidths_for(const Dataset& data, double h_override = 0.0) {
    if (h_override > 0.0) {
        BandwidthSet bw;
        bw.h = h_override;
        bw.d_smooth = bw.a = bw.e = h_override;
        bw.b = std::max(h_override * h_override * h_override, 1e-4);
        return bw;
    }
    double s2 = rice_variance(data);
    if (!(s2 > 0.0)) throw invalid_variance_error("Rice variance is zero (degenerate Y)");
    return default_bandwidths(s2, data.n);
}

}  // namespace qsig
