#pragma once

// Per-coordinate Gaussian gradient statistics and the analytic moments of the
// sign of a mini-batch gradient. The central quantity is
//   E_i(B) = erf(sqrt(B/2) * mu_i / sigma_i),
// the expected sign of the batch-mean gradient of coordinate i at batch size
// B, which saturates to sign(mu_i) as B grows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "surge/special.hpp"

namespace surge {

/// Per-coordinate mean and per-sample standard deviation of the gradient.
struct GradientStats {
    std::vector<double> mu;
    std::vector<double> sigma;

    std::size_t dim() const { return mu.size(); }
};

/// Checks the invariants needed by the law evaluations: matching lengths,
/// finite values, every sigma_i > 0. Degenerate (sigma = 0) stats are legal
/// only on the deterministic harness path, never here.
inline void validate(const GradientStats& s) {
    if (s.mu.size() != s.sigma.size() || s.mu.empty())
        throw std::invalid_argument("GradientStats: mu/sigma length mismatch or empty");
    for (std::size_t i = 0; i < s.mu.size(); ++i) {
        if (!std::isfinite(s.mu[i]) || !std::isfinite(s.sigma[i]))
            throw std::invalid_argument("GradientStats: non-finite entry at coordinate " + std::to_string(i));
        if (s.sigma[i] <= 0.0)
            throw std::invalid_argument("GradientStats: sigma must be > 0 at coordinate " + std::to_string(i));
    }
}

/// True when any sigma_i is exactly zero (deterministic workload estimate).
inline bool degenerate_sigma(const GradientStats& s) {
    return std::any_of(s.sigma.begin(), s.sigma.end(), [](double v) { return v == 0.0; });
}

/// E[sign(x)] for x ~ Normal(mu, sigma^2): erf(mu / (sqrt(2) sigma)).
inline double sign_mean(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sign_mean: sigma must be > 0");
    return surge::erf(mu / (std::numbers::sqrt2 * sigma));
}

/// var(sign(x)) = 1 - E[sign(x)]^2; always in [0, 1].
inline double sign_variance(double mu, double sigma) {
    const double m = sign_mean(mu, sigma);
    return 1.0 - m * m;
}

namespace detail {
// erf saturates below double resolution beyond |t| = 6; return exact +-1 there
// so the large-batch laws see exact sign vectors.
inline double saturating_erf(double t) {
    if (t >= 6.0) return 1.0;
    if (t <= -6.0) return -1.0;
    return surge::erf(t);
}
}  // namespace detail

/// Expected sign of the batch-mean gradient, erf(sqrt(B/2) mu/sigma).
/// B is a positive real: the harness only realizes integer batch sizes but the
/// law curves are smooth in B.
inline double e_exact(double mu, double sigma, double batch) {
    if (!(sigma > 0.0)) throw std::invalid_argument("e_exact: sigma must be > 0");
    if (!(batch > 0.0)) throw std::invalid_argument("e_exact: batch size must be > 0");
    return detail::saturating_erf(std::sqrt(batch / 2.0) * mu / sigma);
}

/// Sigmoid-like closed form (mu/sigma) / sqrt(pi/(2B) + (mu/sigma)^2):
/// same sign, monotonicity, and limits as e_exact; kept behind an explicit
/// choice for reproducing the analytic simplifications.
inline double e_approx(double mu, double sigma, double batch) {
    if (!(sigma > 0.0)) throw std::invalid_argument("e_approx: sigma must be > 0");
    if (!(batch > 0.0)) throw std::invalid_argument("e_approx: batch size must be > 0");
    const double r = mu / sigma;
    return r / std::sqrt(std::numbers::pi / (2.0 * batch) + r * r);
}

/// Mean vector and diagonal covariance of sign(batch-mean gradient).
/// Cross-coordinate covariance is zero under the independent-coordinate model.
struct SignMoments {
    std::vector<double> mean;
    std::vector<double> var_diag;
};

inline SignMoments sign_batch_moments(const GradientStats& stats, double batch, bool use_approx = false) {
    validate(stats);
    SignMoments m;
    m.mean.resize(stats.dim());
    m.var_diag.resize(stats.dim());
    for (std::size_t i = 0; i < stats.dim(); ++i) {
        const double e = use_approx ? e_approx(stats.mu[i], stats.sigma[i], batch)
                                    : e_exact(stats.mu[i], stats.sigma[i], batch);
        m.mean[i] = e;
        m.var_diag[i] = 1.0 - e * e;
    }
    return m;
}

/// Per-coordinate validity bound pi sigma_i^2 / (2 mu_i^2) separating the
/// small-batch (surge) regime from sign saturation. mu_i = 0 yields +infinity,
/// which is a legal output.
inline std::vector<double> batch_size_bound(const GradientStats& stats) {
    if (stats.mu.size() != stats.sigma.size() || stats.mu.empty())
        throw std::invalid_argument("batch_size_bound: mu/sigma length mismatch or empty");
    std::vector<double> bound(stats.dim());
    for (std::size_t i = 0; i < stats.dim(); ++i) {
        if (stats.mu[i] == 0.0) {
            bound[i] = std::numeric_limits<double>::infinity();
        } else {
            const double r = stats.sigma[i] / stats.mu[i];
            bound[i] = 0.5 * std::numbers::pi * r * r;
        }
    }
    return bound;
}

/// Linear-interpolation quantile (q in [0,1]) of a copy of v; infinities sort
/// to the top, so e.g. the median bound is robust to a few mu_i = 0 markers.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile: empty input");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0,1]");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return v[lo];
    if (std::isinf(v[lo + 1])) return v[lo + 1];
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

}  // namespace surge
