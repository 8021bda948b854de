#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qsig/errors.hpp"

namespace qsig {

/// Observed triples (Y_i, X_i, Z_i), X_i in R^d, Z_i in R^q; row-major.
struct Dataset {
    std::vector<double> y;  // n
    std::vector<double> x;  // n * d
    std::vector<double> z;  // n * q
    int n = 0;
    int d = 0;
    int q = 0;

    double x_at(int i, int j) const { return x[static_cast<std::size_t>(i) * d + j]; }
    double z_at(int i, int j) const { return z[static_cast<std::size_t>(i) * q + j]; }

    void validate() const {
        if (n < 2) throw sample_too_small_error("dataset needs n >= 2");
        if (d < 1 || q < 1) throw data_error("dataset needs d >= 1 and q >= 1");
        if (y.size() != static_cast<std::size_t>(n) ||
            x.size() != static_cast<std::size_t>(n) * d ||
            z.size() != static_cast<std::size_t>(n) * q)
            throw data_error("dataset dimensions inconsistent");
        for (double v : y)
            if (!std::isfinite(v)) throw data_error("non-finite value in y");
        for (double v : x)
            if (!std::isfinite(v)) throw data_error("non-finite value in x");
        for (double v : z)
            if (!std::isfinite(v)) throw data_error("non-finite value in z");
    }
};

}  // namespace qsig
