#pragma once

// Workload = quadratic | MLP, plus the shared operations the harness and the
// oracles need. Workloads are immutable after construction; sampling takes a
// caller-owned RandomStream, so concurrent runs with distinct streams are
// race-free and reproducible.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "surge/gradient_stats.hpp"
#include "surge/mlp.hpp"
#include "surge/quadratic.hpp"
#include "surge/rng.hpp"

namespace surge {

using Workload = std::variant<QuadraticWorkload, MlpWorkload>;

inline std::size_t dim(const Workload& w) {
    return std::visit([](const auto& v) { return v.dim(); }, w);
}

inline double loss(const Workload& w, std::span<const double> theta) {
    return std::visit([&](const auto& v) { return v.loss(theta); }, w);
}

inline std::vector<double> true_gradient(const Workload& w, std::span<const double> theta) {
    return std::visit([&](const auto& v) { return v.true_gradient(theta); }, w);
}

inline std::vector<double> sample_batch_gradient(const Workload& w, std::span<const double> theta,
                                                 std::int64_t batch, RandomStream& rng) {
    return std::visit([&](const auto& v) { return v.sample_batch_gradient(theta, batch, rng); }, w);
}

/// Empirical per-coordinate mean and standard deviation (unbiased) of
/// per-sample gradients. Converges to the analytic (H(theta-theta*),
/// noise_sigma) on the quadratic. A zero noise_sigma quadratic produces
/// sigma = 0 estimates; callers detect that with degenerate_sigma().
inline GradientStats estimate_gradient_stats(const Workload& w, std::span<const double> theta,
                                             std::int64_t n_samples, RandomStream& rng) {
    if (n_samples < 2) throw std::invalid_argument("estimate_gradient_stats: need n_samples >= 2");
    const std::size_t d = dim(w);
    std::vector<double> mean(d, 0.0), m2(d, 0.0);
    for (std::int64_t n = 0; n < n_samples; ++n) {
        std::vector<double> g = std::visit(
            [&](const auto& v) -> std::vector<double> {
                if constexpr (std::is_same_v<std::decay_t<decltype(v)>, QuadraticWorkload>) {
                    return v.per_sample_gradient(theta, rng);
                } else {
                    const std::size_t idx = static_cast<std::size_t>(rng.uniform_index(v.dataset().size()));
                    return v.per_sample_gradient(theta, idx);
                }
            },
            w);
        // Welford update
        const double inv = 1.0 / static_cast<double>(n + 1);
        for (std::size_t i = 0; i < d; ++i) {
            const double delta = g[i] - mean[i];
            mean[i] += delta * inv;
            m2[i] += delta * (g[i] - mean[i]);
        }
    }
    GradientStats stats;
    stats.mu = std::move(mean);
    stats.sigma.resize(d);
    const double inv_nm1 = 1.0 / static_cast<double>(n_samples - 1);
    for (std::size_t i = 0; i < d; ++i) stats.sigma[i] = std::sqrt(m2[i] * inv_nm1);
    return stats;
}

}  // namespace surge
