#pragma once

// Step rules: SGD, sign descent, and full Adam with bias correction. With
// beta1 = beta2 = 0 and eps_adam = 0 the Adam update reduces elementwise to
// the sign update (for nonzero gradients), which is the approximation the
// scaling laws are built on. sign(0) := 0; Adam's 0/0 case is defined to 0 to
// keep the reduction consistent.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace surge {

enum class OptKind { sgd, sign, adam };

struct OptimizerConfig {
    OptKind kind = OptKind::sign;
    double lr = 0.1;
    double beta1 = 0.9;    // adam only
    double beta2 = 0.999;  // adam only
    double eps_adam = 1e-8;
};

inline void validate(const OptimizerConfig& c) {
    if (!(c.lr > 0.0)) throw std::invalid_argument("OptimizerConfig: lr must be > 0");
    if (c.kind == OptKind::adam) {
        if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0))
            throw std::invalid_argument("OptimizerConfig: betas must lie in [0, 1)");
        if (!(c.eps_adam >= 0.0)) throw std::invalid_argument("OptimizerConfig: eps_adam must be >= 0");
    }
}

/// First/second moment accumulators; m = v = 0 at t = 0, t increments by
/// exactly one per step.
struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;

    explicit OptimizerState(std::size_t d = 0) : m(d, 0.0), v(d, 0.0) {}
};

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// One optimizer step; theta and state are updated in place. Deterministic
/// function of (config, state, theta, g).
inline void optimizer_step(const OptimizerConfig& cfg, OptimizerState& st, std::span<double> theta,
                           std::span<const double> g) {
    if (theta.size() != g.size()) throw std::invalid_argument("optimizer_step: dimension mismatch");
    switch (cfg.kind) {
        case OptKind::sgd:
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg.lr * g[i];
            ++st.t;
            return;
        case OptKind::sign:
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg.lr * sign(g[i]);
            ++st.t;
            return;
        case OptKind::adam: {
            if (st.m.size() != theta.size() || st.v.size() != theta.size())
                throw std::invalid_argument("optimizer_step: state dimension mismatch");
            ++st.t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
            for (std::size_t i = 0; i < theta.size(); ++i) {
                st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * g[i];
                st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                const double mhat = st.m[i] / bc1;
                // beta2 == 0 makes v_hat = g^2 exactly; take |g| instead of
                // sqrt(g*g) so the sign-update reduction holds bitwise
                const double root_vhat =
                    cfg.beta2 == 0.0 ? std::fabs(g[i]) : std::sqrt(st.v[i] / bc2);
                const double den = root_vhat + cfg.eps_adam;
                if (den > 0.0) theta[i] -= cfg.lr * (mhat / den);
                // den == 0 implies mhat == 0: no movement, matching sign(0) = 0
            }
            return;
        }
    }
}

/// Diagnostic for the sign approximation: feeds a gradient stream through the
/// Adam moments and returns the max over steps and coordinates of
/// |m_hat/(sqrt(v_hat)+eps) - sign(m_hat)|, i.e. how far the realized update
/// direction is from the sign of the running (bias-corrected) gradient mean.
inline double adam_sign_deviation(const OptimizerConfig& cfg,
                                  std::span<const std::vector<double>> gradient_stream) {
    if (gradient_stream.empty()) throw std::invalid_argument("adam_sign_deviation: empty stream");
    const std::size_t d = gradient_stream.front().size();
    OptimizerState st(d);
    double worst = 0.0;
    for (const auto& g : gradient_stream) {
        if (g.size() != d) throw std::invalid_argument("adam_sign_deviation: ragged stream");
        ++st.t;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
        for (std::size_t i = 0; i < d; ++i) {
            st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * g[i];
            st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = st.m[i] / bc1;
            const double root_vhat =
                cfg.beta2 == 0.0 ? std::fabs(g[i]) : std::sqrt(st.v[i] / bc2);
            const double den = root_vhat + cfg.eps_adam;
            const double update = den > 0.0 ? mhat / den : 0.0;
            worst = std::max(worst, std::fabs(update - sign(mhat)));
        }
    }
    return worst;
}

}  // namespace surge
