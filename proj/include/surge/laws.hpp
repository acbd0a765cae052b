#pragma once

// Closed-form scaling laws for sign-based (Adam-style) updates.
//
// The chain is: a quadratic expansion gives the optimal learning rate for an
// arbitrary stochastic update direction V,
//     eps_opt = G^T E[V] / (tr[H cov(V)] + E[V]^T H E[V]),
// specializing V = sign(batch gradient) under the Gaussian model turns this
// into sums over E_i(B) = erf(sqrt(B/2) mu_i/sigma_i); in the small-batch
// regime those sums collapse to the surge law
//     eps_opt(B) = eps_max / (0.5 (sqrt(Bn/B) + sqrt(B/Bn))),
// which peaks at B = B_noise, and in the large-batch regime the rate
// saturates at a non-zero plateau determined by the signs of mu alone.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "surge/errors.hpp"
#include "surge/gradient_stats.hpp"
#include "surge/hessian.hpp"

namespace surge {

/// Everything the sign-update laws need: gradient statistics plus curvature.
struct LawInputs {
    GradientStats stats;
    HessianSpec hessian;
};

namespace detail {

inline std::vector<double> mu_over_sigma(const GradientStats& s) {
    std::vector<double> r(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) r[i] = s.mu[i] / s.sigma[i];
    return r;
}

inline double cross_sum_of(const LawInputs& in) {
    return in.hessian.cross_sum(mu_over_sigma(in.stats));
}

}  // namespace detail

/// Checks dimension agreement and the positivity conditions (trace > 0 and
/// cross sum > 0) required for B_noise / eps_max to exist. Violations raise
/// law_violation_error carrying the offending sums.
inline void validate_law_inputs(const LawInputs& in) {
    validate(in.stats);
    if (in.stats.dim() != in.hessian.dim())
        throw std::invalid_argument("LawInputs: stats/hessian dimension mismatch");
    const double tr = in.hessian.trace();
    const double cross = detail::cross_sum_of(in);
    if (!(tr > 0.0) || !(cross > 0.0))
        throw law_violation_error("LawInputs: positivity conditions violated", tr, cross);
}

/// Optimal LR for an arbitrary update direction V with mean EV and diagonal
/// covariance cov_diag: G^T EV / (sum_i H_ii cov_i + EV^T H EV).
inline double optimal_lr_general(std::span<const double> g, std::span<const double> ev,
                                 std::span<const double> cov_diag, const HessianSpec& h) {
    if (g.size() != ev.size() || g.size() != cov_diag.size() || g.size() != h.dim())
        throw std::invalid_argument("optimal_lr_general: dimension mismatch");
    double num = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) num += g[i] * ev[i];
    const double diag_term = h.weighted_diag_sum(cov_diag);
    const double quad_term = h.quad_form(ev);
    const double den = diag_term + quad_term;
    if (!(den > 0.0))
        throw law_violation_error("optimal_lr_general: non-positive denominator", diag_term, quad_term);
    return num / den;
}

/// Expected loss improvement at the optimal LR: (G^T EV / 2) * eps_opt.
inline double loss_improvement_general(std::span<const double> g, std::span<const double> ev,
                                       double lr_opt) {
    if (g.size() != ev.size())
        throw std::invalid_argument("loss_improvement_general: dimension mismatch");
    double num = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) num += g[i] * ev[i];
    return 0.5 * num * lr_opt;
}

namespace detail {

struct SignLawTerms {
    double num;   // sum_i E_i mu_i
    double diag;  // sum_i (1 - E_i^2) H_ii
    double quad;  // sum_ij E_i E_j H_ij
};

inline SignLawTerms sign_law_terms(const LawInputs& in, double batch, bool use_approx) {
    validate(in.stats);
    if (in.stats.dim() != in.hessian.dim())
        throw std::invalid_argument("law inputs: stats/hessian dimension mismatch");
    const std::size_t d = in.stats.dim();
    std::vector<double> e(d), one_minus_e2(d);
    double num = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        e[i] = use_approx ? e_approx(in.stats.mu[i], in.stats.sigma[i], batch)
                          : e_exact(in.stats.mu[i], in.stats.sigma[i], batch);
        one_minus_e2[i] = 1.0 - e[i] * e[i];
        num += e[i] * in.stats.mu[i];
    }
    return {num, in.hessian.weighted_diag_sum(one_minus_e2), in.hessian.quad_form(e)};
}

}  // namespace detail

/// Exact optimal LR for sign updates at batch size B (reference form; the
/// sigmoid-like approximation of E_i is available behind use_approx).
inline double optimal_lr_sign_exact(const LawInputs& in, double batch, bool use_approx = false) {
    const auto t = detail::sign_law_terms(in, batch, use_approx);
    const double den = t.diag + t.quad;
    if (!(den > 0.0))
        throw law_violation_error("optimal_lr_sign_exact: non-positive denominator", t.diag, t.quad);
    return t.num / den;
}

/// Exact expected one-step loss improvement for sign updates at batch size B.
inline double loss_improvement_sign_exact(const LawInputs& in, double batch, bool use_approx = false) {
    const auto t = detail::sign_law_terms(in, batch, use_approx);
    const double den = t.diag + t.quad;
    if (!(den > 0.0))
        throw law_violation_error("loss_improvement_sign_exact: non-positive denominator", t.diag, t.quad);
    return 0.5 * t.num * t.num / den;
}

/// Gradient noise scale: pi sum_i H_ii / (2 sum_{i!=j} (mu_i mu_j / sigma_i sigma_j) H_ij).
/// Equals the batch size at which the optimal LR peaks.
inline double b_noise(const LawInputs& in) {
    validate(in.stats);
    if (in.stats.dim() != in.hessian.dim())
        throw std::invalid_argument("b_noise: stats/hessian dimension mismatch");
    const double tr = in.hessian.trace();
    const double cross = detail::cross_sum_of(in);
    if (!(cross > 0.0) || !(tr > 0.0))
        throw law_violation_error("b_noise: positivity conditions violated", tr, cross);
    return std::numbers::pi * tr / (2.0 * cross);
}

/// Peak optimal LR, sqrt(B_noise / 2 pi) sum_i (mu_i^2 / sigma_i) / sum_i H_ii.
/// Also evaluates the algebraically equivalent B_noise-free form and insists
/// they agree.
inline double eps_max(const LawInputs& in) {
    const double bn = b_noise(in);
    double s = 0.0;
    for (std::size_t i = 0; i < in.stats.dim(); ++i)
        s += in.stats.mu[i] * in.stats.mu[i] / in.stats.sigma[i];
    const double tr = in.hessian.trace();
    const double value = std::sqrt(bn / (2.0 * std::numbers::pi)) * s / tr;
    const double cross = detail::cross_sum_of(in);
    const double equivalent = s / (2.0 * std::sqrt(cross) * std::sqrt(tr));
    if (std::fabs(value - equivalent) > 1e-9 * std::max(1.0, std::fabs(value)))
        throw law_violation_error("eps_max: equivalent forms disagree", value, equivalent);
    return value;
}

/// AM-GM lower bound on eps_max: sum(mu^2/sigma) / (cross sum + trace).
inline double eps_max_lower_bound(const LawInputs& in) {
    validate_law_inputs(in);
    double s = 0.0;
    for (std::size_t i = 0; i < in.stats.dim(); ++i)
        s += in.stats.mu[i] * in.stats.mu[i] / in.stats.sigma[i];
    return s / (detail::cross_sum_of(in) + in.hessian.trace());
}

/// Peak loss improvement (sum_ij mu_i^2 mu_j^2 / sigma_i sigma_j) / (2 cross sum).
inline double dl_max(const LawInputs& in) {
    validate(in.stats);
    if (in.stats.dim() != in.hessian.dim())
        throw std::invalid_argument("dl_max: stats/hessian dimension mismatch");
    const double cross = detail::cross_sum_of(in);
    const double tr = in.hessian.trace();
    if (!(cross > 0.0)) throw law_violation_error("dl_max: non-positive cross sum", tr, cross);
    double s = 0.0;
    for (std::size_t i = 0; i < in.stats.dim(); ++i)
        s += in.stats.mu[i] * in.stats.mu[i] / in.stats.sigma[i];
    return s * s / (2.0 * cross);
}

/// Large-batch plateau of the optimal LR: sum |mu_i| / sum_ij sign(mu_i) sign(mu_j) H_ij.
inline double large_batch_lr(const LawInputs& in) {
    validate(in.stats);
    if (in.stats.dim() != in.hessian.dim())
        throw std::invalid_argument("large_batch_lr: stats/hessian dimension mismatch");
    const std::size_t d = in.stats.dim();
    std::vector<double> signs(d);
    double num = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        signs[i] = (in.stats.mu[i] > 0.0) ? 1.0 : (in.stats.mu[i] < 0.0 ? -1.0 : 0.0);
        num += std::fabs(in.stats.mu[i]);
    }
    const double den = in.hessian.quad_form(signs);
    if (!(den > 0.0))
        throw law_violation_error("large_batch_lr: non-positive denominator", in.hessian.trace(), den);
    return num / den;
}

/// Surge law: eps_max / (0.5 (sqrt(Bn/B) + sqrt(B/Bn))). Max at B = B_noise.
inline double surge_lr(double batch, double bn, double em) {
    if (!(batch > 0.0) || !(bn > 0.0) || !(em > 0.0))
        throw std::invalid_argument("surge_lr: arguments must be positive");
    return em / (0.5 * (std::sqrt(bn / batch) + std::sqrt(batch / bn)));
}

/// SGD-family law eps_max / (1 + Bn/B)^alpha; monotone increasing in B.
inline double sgd_lr(double batch, double bn, double em, double alpha) {
    if (!(batch > 0.0) || !(bn > 0.0) || !(em > 0.0))
        throw std::invalid_argument("sgd_lr: arguments must be positive");
    return em / std::pow(1.0 + bn / batch, alpha);
}

/// Small-batch limits: linear scaling (SGD) and square-root scaling (sign).
struct SmallBatchApprox {
    double linear;       // eps_max * B / Bn
    double square_root;  // 2 eps_max sqrt(B / Bn)
};

inline SmallBatchApprox small_batch_approximations(double batch, double bn, double em) {
    if (!(batch > 0.0) || !(bn > 0.0) || !(em > 0.0))
        throw std::invalid_argument("small_batch_approximations: arguments must be positive");
    return {em * batch / bn, 2.0 * em * std::sqrt(batch / bn)};
}

/// Loss-improvement law dl_max / (1 + Bn/B).
inline double loss_improvement_law(double batch, double bn, double dlm) {
    if (!(batch > 0.0) || !(bn > 0.0) || !(dlm > 0.0))
        throw std::invalid_argument("loss_improvement_law: arguments must be positive");
    return dlm / (1.0 + bn / batch);
}

/// One point of the steps/examples trade-off hyperbola.
struct TradeoffPoint {
    double steps;
    double examples;
};

struct TradeoffCurve {
    std::vector<TradeoffPoint> points;
    double b_crit;  // E_min / S_min
};

/// Samples (S/S_min - 1)(E/E_min - 1) = 1 symmetrically around the balance
/// point; an odd n_points includes (2 S_min, 2 E_min) exactly.
inline TradeoffCurve tradeoff_curve(double s_min, double e_min, int n_points, double span = 10.0) {
    if (!(s_min > 0.0) || !(e_min > 0.0))
        throw std::invalid_argument("tradeoff_curve: s_min and e_min must be positive");
    if (n_points < 2) throw std::invalid_argument("tradeoff_curve: need at least 2 points");
    if (!(span > 1.0)) throw std::invalid_argument("tradeoff_curve: span must exceed 1");
    TradeoffCurve curve;
    curve.b_crit = e_min / s_min;
    curve.points.reserve(static_cast<std::size_t>(n_points));
    const double log_lo = -std::log(span), log_hi = std::log(span);
    for (int k = 0; k < n_points; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(n_points - 1);
        const double u = std::exp(log_lo + f * (log_hi - log_lo));
        curve.points.push_back({s_min * (1.0 + 1.0 / u), e_min * (1.0 + u)});
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Bulk curve evaluation
// ---------------------------------------------------------------------------

enum class LawVariant {
    exact,             // Eq-9-style optimal LR from full inputs
    surge,             // surge law from (b_noise, eps_max)
    sgd_alpha,         // SGD-family law, needs alpha
    linear,            // small-batch linear scaling
    square_root,       // small-batch square-root scaling
    large_batch,       // constant plateau
    loss_improvement,  // loss-improvement law from (b_noise, dl_max)
};

inline const char* to_string(LawVariant v) {
    switch (v) {
        case LawVariant::exact: return "exact";
        case LawVariant::surge: return "surge";
        case LawVariant::sgd_alpha: return "sgd_alpha";
        case LawVariant::linear: return "linear";
        case LawVariant::square_root: return "sqrt";
        case LawVariant::large_batch: return "large_batch";
        case LawVariant::loss_improvement: return "loss_improvement";
    }
    return "unknown";
}

struct LawCurve {
    LawVariant variant = LawVariant::surge;
    double alpha = 1.0;  // meaningful for sgd_alpha only
    std::vector<std::pair<double, double>> points;  // (B, value), B strictly increasing
};

/// Fitted or analytic law parameters, enough to evaluate the closed-form
/// variants without full LawInputs.
struct LawParams {
    double b_noise = 0.0;
    double eps_max = 0.0;
    double dl_max = 0.0;  // needed for loss_improvement only
};

namespace detail {
inline void require_increasing(std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("curve: empty batch grid");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("curve: batch grid must be strictly increasing");
}
}  // namespace detail

/// Evaluates a closed-form variant from law parameters.
inline LawCurve curve(const LawParams& p, LawVariant variant, std::span<const double> batch_grid,
                      double alpha = 1.0) {
    detail::require_increasing(batch_grid);
    LawCurve c;
    c.variant = variant;
    c.alpha = alpha;
    c.points.reserve(batch_grid.size());
    for (double b : batch_grid) {
        double v;
        switch (variant) {
            case LawVariant::surge: v = surge_lr(b, p.b_noise, p.eps_max); break;
            case LawVariant::sgd_alpha: v = sgd_lr(b, p.b_noise, p.eps_max, alpha); break;
            case LawVariant::linear: v = small_batch_approximations(b, p.b_noise, p.eps_max).linear; break;
            case LawVariant::square_root:
                v = small_batch_approximations(b, p.b_noise, p.eps_max).square_root;
                break;
            case LawVariant::loss_improvement: v = loss_improvement_law(b, p.b_noise, p.dl_max); break;
            default:
                throw std::invalid_argument("curve: variant requires full LawInputs, not parameters");
        }
        c.points.emplace_back(b, v);
    }
    return c;
}

/// Evaluates any variant from full inputs (closed-form variants derive their
/// parameters from the inputs first).
inline LawCurve curve(const LawInputs& in, LawVariant variant, std::span<const double> batch_grid,
                      double alpha = 1.0) {
    detail::require_increasing(batch_grid);
    if (variant == LawVariant::exact || variant == LawVariant::large_batch) {
        LawCurve c;
        c.variant = variant;
        c.alpha = alpha;
        c.points.reserve(batch_grid.size());
        const double plateau = (variant == LawVariant::large_batch) ? large_batch_lr(in) : 0.0;
        for (double b : batch_grid)
            c.points.emplace_back(b, variant == LawVariant::exact ? optimal_lr_sign_exact(in, b)
                                                                  : plateau);
        return c;
    }
    LawParams p;
    p.b_noise = b_noise(in);
    p.eps_max = eps_max(in);
    if (variant == LawVariant::loss_improvement) p.dl_max = dl_max(in);
    return curve(p, variant, batch_grid, alpha);
}

/// Convenience: geometric batch grid.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_spaced: bad range");
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

}  // namespace surge
