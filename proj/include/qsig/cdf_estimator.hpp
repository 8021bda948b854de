#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qsig/dataset.hpp"
#include "qsig/errors.hpp"
#include "qsig/kernels.hpp"
#include "qsig/math.hpp"

namespace qsig {

/// Configuration of the smoothed local-polynomial conditional CDF estimator.
struct EstimatorConfig {
    int p = 2;             // polynomial order
    double h = 0.0;        // x-bandwidth
    double d_smooth = 0.0; // y-smoothing bandwidth
    KernelBundle kernels{};
    double ridge_eps = 0.0;
    int quadrature_points = 256;  // outer u-grid of the rearrangement operator

    void validate() const {
        if (p < 0) throw config_error("polynomial order must be >= 0");
        if (!(h > 0.0)) throw invalid_bandwidth_error("x-bandwidth must be positive");
        if (!(d_smooth > 0.0)) throw invalid_bandwidth_error("y-bandwidth must be positive");
        if (ridge_eps < 0.0) throw config_error("ridge_eps must be >= 0");
        if (quadrature_points < 16) throw config_error("quadrature_points must be >= 16");
    }
};

/// All multi-indices k in N_0^d with 0 <= |k| <= p, ordered by total degree,
/// ties broken so that (1,0) precedes (0,1).
inline std::vector<std::vector<int>> monomial_basis(int d, int p) {
    std::vector<std::vector<int>> out;
    std::vector<std::vector<int>> degree_set{std::vector<int>(d, 0)};
    out.push_back(degree_set[0]);
    for (int deg = 1; deg <= p; ++deg) {
        std::vector<std::vector<int>> next;
        // enumerate compositions of `deg` into d parts, first coordinate largest first
        std::vector<int> idx(d, 0);
        std::function<void(int, int)> rec = [&](int pos, int remaining) {
            if (pos == d - 1) {
                idx[pos] = remaining;
                next.push_back(idx);
                return;
            }
            for (int v = remaining; v >= 0; --v) {
                idx[pos] = v;
                rec(pos + 1, remaining - v);
            }
        };
        rec(0, deg);
        for (auto& k : next) out.push_back(std::move(k));
    }
    return out;
}

namespace detail {

/// In-place Cholesky of a symmetric positive definite matrix (row-major n*n).
/// Returns false on a non-positive pivot.
inline bool cholesky(std::vector<double>& a, int n) {
    for (int j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (int k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > 0.0)) return false;
        double l = std::sqrt(diag);
        a[j * n + j] = l;
        for (int i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / l;
        }
    }
    return true;
}

inline void cholesky_solve(const std::vector<double>& l, int n, std::vector<double>& b) {
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
        b[i] = s / l[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
        b[i] = s / l[i * n + i];
    }
}

}  // namespace detail

/// Per-x factorization of the weighted least-squares design: the normal
/// matrix X^t W X is factorized once and reused for every response vector
/// (i.e. every y at which the conditional CDF is evaluated).
class LocalCdfFit {
public:
    LocalCdfFit(const Dataset& data, std::span<const double> x, const EstimatorConfig& cfg)
        : data_(&data), cfg_(&cfg) {
        cfg.validate();
        const int n = data.n, d = data.d;
        weights_.resize(n);
        double hd = std::pow(cfg.h, d);
        double wsum = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = 1.0;
            for (int j = 0; j < d; ++j)
                w *= eval_density(cfg.kernels.k_smooth, (x[j] - data.x_at(i, j)) / cfg.h);
            w /= (n * hd);
            weights_[i] = w;
            wsum += w;
        }
        if (!(wsum > 0.0))
            throw empty_window_error("local fit: all kernel weights are zero at this x");

        basis_ = monomial_basis(d, cfg.p);
        nb_ = static_cast<int>(basis_.size());
        rows_.resize(static_cast<std::size_t>(n) * nb_);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < nb_; ++c) {
                double m = 1.0;
                for (int j = 0; j < d; ++j) {
                    double diff = x[j] - data.x_at(i, j);
                    for (int r = 0; r < basis_[c][j]; ++r) m *= diff;
                }
                rows_[static_cast<std::size_t>(i) * nb_ + c] = m;
            }
        }
        factorize();
    }

    /// Conditional-CDF value at y, clamped to [0,1].
    double eval(double y) const {
        const int n = data_->n;
        if (local_constant_) {
            double num = 0.0, den = 0.0;
            for (int i = 0; i < n; ++i) {
                double om = omega_smoothed_indicator((y - data_->y[i]) / cfg_->d_smooth);
                num += weights_[i] * om;
                den += weights_[i];
            }
            return clamp01(num / den);
        }
        std::vector<double> rhs(nb_, 0.0);
        for (int i = 0; i < n; ++i) {
            double om = omega_smoothed_indicator((y - data_->y[i]) / cfg_->d_smooth);
            double wo = weights_[i] * om;
            const double* row = &rows_[static_cast<std::size_t>(i) * nb_];
            for (int c = 0; c < nb_; ++c) rhs[c] += wo * row[c];
        }
        detail::cholesky_solve(chol_, nb_, rhs);
        if (!std::isfinite(rhs[0]))
            throw singular_design_error("local fit: non-finite solve");
        return clamp01(rhs[0]);
    }

private:
    void factorize() {
        const int n = data_->n;
        std::vector<double> a(static_cast<std::size_t>(nb_) * nb_, 0.0);
        for (int i = 0; i < n; ++i) {
            const double* row = &rows_[static_cast<std::size_t>(i) * nb_];
            double w = weights_[i];
            for (int c1 = 0; c1 < nb_; ++c1)
                for (int c2 = 0; c2 <= c1; ++c2) a[c1 * nb_ + c2] += w * row[c1] * row[c2];
        }
        for (int c1 = 0; c1 < nb_; ++c1)
            for (int c2 = c1 + 1; c2 < nb_; ++c2) a[c1 * nb_ + c2] = a[c2 * nb_ + c1];

        double trace = 0.0;
        for (int c = 0; c < nb_; ++c) trace += a[c * nb_ + c];

        chol_ = a;
        bool ok = detail::cholesky(chol_, nb_) && condition_ok();
        if (!ok) {
            // retry with a ridge, then fall back to the local-constant fit
            double ridge = std::max(cfg_->ridge_eps, 1e-9 * trace);
            chol_ = a;
            for (int c = 0; c < nb_; ++c) chol_[c * nb_ + c] += ridge;
            ok = detail::cholesky(chol_, nb_);
            if (!ok) local_constant_ = true;
        }
    }

    bool condition_ok() const {
        double lo = HUGE_VAL, hi = 0.0;
        for (int c = 0; c < nb_; ++c) {
            double l = chol_[c * nb_ + c];
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
        double cond = (hi / lo) * (hi / lo);
        return std::isfinite(cond) && cond <= 1e12;
    }

    const Dataset* data_;
    const EstimatorConfig* cfg_;
    std::vector<double> weights_;
    std::vector<std::vector<int>> basis_;
    std::vector<double> rows_;
    std::vector<double> chol_;
    int nb_ = 0;
    bool local_constant_ = false;
};

inline double estimate_cdf(const Dataset& data, std::span<const double> x, double y,
                           const EstimatorConfig& cfg) {
    return LocalCdfFit(data, x, cfg).eval(y);
}

/// Batched evaluation sharing one factorization per x; agrees with the
/// scalar operation bit for bit.
inline std::vector<double> estimate_cdf_profile(const Dataset& data, std::span<const double> x,
                                                std::span<const double> y_values,
                                                const EstimatorConfig& cfg) {
    LocalCdfFit fit(data, x, cfg);
    std::vector<double> out;
    out.reserve(y_values.size());
    for (double y : y_values) out.push_back(fit.eval(y));
    return out;
}

}  // namespace qsig
