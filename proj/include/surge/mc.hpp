#pragma once

// Brute-force Monte Carlo oracles. These validate the closed forms by
// simulation and deliberately avoid the analytic path: they only draw batch
// gradients, take signs, and evaluate the workload's loss. Deterministic
// given (inputs, stream).

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "surge/gradient_stats.hpp"
#include "surge/rng.hpp"
#include "surge/workload.hpp"

namespace surge {

struct McMoments {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> stderr_mean;
};

/// Empirical mean/variance of sign(batch-mean Gaussian gradient) per
/// coordinate, with standard errors of the mean.
inline McMoments mc_sign_moments(const GradientStats& stats, double batch, std::int64_t trials,
                                 RandomStream& rng) {
    validate(stats);
    if (!(batch > 0.0)) throw std::invalid_argument("mc_sign_moments: batch must be > 0");
    if (trials < 1000) throw std::invalid_argument("mc_sign_moments: need at least 1000 trials");
    const std::size_t d = stats.dim();
    std::vector<double> sum(d, 0.0);
    const double inv_sqrt_b = 1.0 / std::sqrt(batch);
    for (std::int64_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < d; ++i) {
            const double g = stats.mu[i] + stats.sigma[i] * inv_sqrt_b * rng.normal();
            sum[i] += (g > 0.0) ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
        }
    }
    McMoments m;
    m.mean.resize(d);
    m.variance.resize(d);
    m.stderr_mean.resize(d);
    const double n = static_cast<double>(trials);
    for (std::size_t i = 0; i < d; ++i) {
        m.mean[i] = sum[i] / n;
        m.variance[i] = 1.0 - m.mean[i] * m.mean[i];  // sign^2 == 1
        m.stderr_mean[i] = std::sqrt(std::max(m.variance[i], 0.0) / n);
    }
    return m;
}

struct McLrPoint {
    double lr;
    double mean_improvement;
    double stderr_improvement;
};

struct McLrCurve {
    double lr_star = 0.0;  // argmax of mean improvement, ties toward smaller lr
    std::vector<McLrPoint> points;
};

/// One-step expected loss improvement E[L(theta) - L(theta - lr sign(G_est))]
/// estimated per lr by common batch-gradient draws across the grid.
inline McLrCurve mc_optimal_lr_onestep(const Workload& w, std::span<const double> theta,
                                       std::int64_t batch, std::span<const double> lr_grid,
                                       std::int64_t trials, RandomStream& rng) {
    if (lr_grid.empty()) throw std::invalid_argument("mc_optimal_lr_onestep: empty lr grid");
    for (std::size_t i = 0; i + 1 < lr_grid.size(); ++i)
        if (!(lr_grid[i] < lr_grid[i + 1]))
            throw std::invalid_argument("mc_optimal_lr_onestep: lr grid must be strictly increasing");
    if (trials < 1000) throw std::invalid_argument("mc_optimal_lr_onestep: need at least 1000 trials");

    const std::size_t d = dim(w);
    const double base = loss(w, theta);
    std::vector<double> sum(lr_grid.size(), 0.0), sumsq(lr_grid.size(), 0.0);
    std::vector<double> candidate(d);
    for (std::int64_t t = 0; t < trials; ++t) {
        const std::vector<double> g = sample_batch_gradient(w, theta, batch, rng);
        std::vector<double> s(d);
        for (std::size_t i = 0; i < d; ++i) s[i] = (g[i] > 0.0) ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
        for (std::size_t k = 0; k < lr_grid.size(); ++k) {
            for (std::size_t i = 0; i < d; ++i) candidate[i] = theta[i] - lr_grid[k] * s[i];
            const double dl = base - loss(w, candidate);
            sum[k] += dl;
            sumsq[k] += dl * dl;
        }
    }
    McLrCurve curve;
    curve.points.resize(lr_grid.size());
    const double n = static_cast<double>(trials);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lr_grid.size(); ++k) {
        const double mean = sum[k] / n;
        const double var = std::max(sumsq[k] / n - mean * mean, 0.0);
        curve.points[k] = {lr_grid[k], mean, std::sqrt(var / n)};
        if (mean > best) {  // strict >: ties keep the smaller lr
            best = mean;
            curve.lr_star = lr_grid[k];
        }
    }
    return curve;
}

/// Single-lr variant: (mean improvement, standard error).
inline std::pair<double, double> mc_loss_improvement(const Workload& w, std::span<const double> theta,
                                                     std::int64_t batch, double lr,
                                                     std::int64_t trials, RandomStream& rng) {
    if (!(lr >= 0.0)) throw std::invalid_argument("mc_loss_improvement: lr must be >= 0");
    if (trials < 1000) throw std::invalid_argument("mc_loss_improvement: need at least 1000 trials");
    const std::size_t d = dim(w);
    const double base = loss(w, theta);
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> candidate(d);
    for (std::int64_t t = 0; t < trials; ++t) {
        const std::vector<double> g = sample_batch_gradient(w, theta, batch, rng);
        for (std::size_t i = 0; i < d; ++i) {
            const double s = (g[i] > 0.0) ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
            candidate[i] = theta[i] - lr * s;
        }
        const double dl = base - loss(w, candidate);
        sum += dl;
        sumsq += dl * dl;
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = std::max(sumsq / n - mean * mean, 0.0);
    return {mean, std::sqrt(var / n)};
}

}  // namespace surge
