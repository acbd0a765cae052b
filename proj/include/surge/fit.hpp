#pragma once

// Estimation of B_noise, S_min, and eps_max from grid observations.
// The hyperbola (S/S_min - 1)(E/E_min - 1) = 1 linearizes to
//     1/S = -B_noise * (1/E) + 1/S_min,
// so an ordinary least-squares line in (1/E, 1/S) space recovers
// b_noise = -slope and s_min = 1/intercept. eps_max estimators invert the
// surge / SGD laws pointwise at each (B, eps_opt) observation and average.

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "surge/errors.hpp"
#include "surge/harness.hpp"
#include "surge/laws.hpp"

namespace surge {

struct BnoiseFit {
    double b_noise = 0.0;
    double s_min = 0.0;
    double residual_rms = 0.0;  // RMS of residuals in 1/S space
};

/// OLS of inv_S on inv_E over (inv_E, inv_S) pairs. Degenerate designs,
/// non-negative slopes, and non-positive intercepts are fit failures: they
/// mean the data violate the trade-off model, and are reported, not clamped.
inline BnoiseFit fit_bnoise(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw fit_failure_error("fit_bnoise: need at least 2 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw fit_failure_error("fit_bnoise: points must be positive");
        sx += x;
        sy += y;
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 0.0)) throw fit_failure_error("fit_bnoise: degenerate design (identical 1/E values)");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    if (!(intercept > 0.0))
        throw fit_failure_error("fit_bnoise: non-positive intercept (s_min undefined)");
    if (!(slope < 0.0))
        throw fit_failure_error("fit_bnoise: non-negative slope (data violate the trade-off model)");
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - (slope * x + intercept);
        ss_res += r * r;
    }
    return {-slope, 1.0 / intercept, std::sqrt(ss_res / n)};
}

/// Eq-24-style estimator: mean over (B, eps_opt) pairs of
/// (eps_opt / 2)(sqrt(Bn/B) + sqrt(B/Bn)). Permutation-invariant.
inline double estimate_eps_max_adam(std::span<const std::pair<double, double>> pairs,
                                    double b_noise_value) {
    if (pairs.empty()) throw std::invalid_argument("estimate_eps_max_adam: empty input");
    if (!(b_noise_value > 0.0)) throw std::invalid_argument("estimate_eps_max_adam: b_noise must be > 0");
    double sum = 0.0;
    for (const auto& [b, eps] : pairs) {
        if (!(b > 0.0) || !(eps > 0.0))
            throw std::invalid_argument("estimate_eps_max_adam: pairs must be positive");
        sum += 0.5 * eps * (std::sqrt(b_noise_value / b) + std::sqrt(b / b_noise_value));
    }
    return sum / static_cast<double>(pairs.size());
}

/// SGD-family estimator: mean of eps_opt (1 + Bn/B)^alpha.
inline double estimate_eps_max_sgd(std::span<const std::pair<double, double>> pairs,
                                   double b_noise_value, double alpha) {
    if (pairs.empty()) throw std::invalid_argument("estimate_eps_max_sgd: empty input");
    if (!(b_noise_value > 0.0)) throw std::invalid_argument("estimate_eps_max_sgd: b_noise must be > 0");
    double sum = 0.0;
    for (const auto& [b, eps] : pairs) {
        if (!(b > 0.0) || !(eps > 0.0))
            throw std::invalid_argument("estimate_eps_max_sgd: pairs must be positive");
        sum += eps * std::pow(1.0 + b_noise_value / b, alpha);
    }
    return sum / static_cast<double>(pairs.size());
}

/// Full estimation result for one grid.
struct ScalingFit {
    double b_noise = 0.0;
    double s_min = 0.0;
    double e_min = 0.0;  // = b_noise * s_min
    double eps_max_adam = 0.0;
    std::map<double, double> eps_max_sgd;  // alpha in {0.5, 1.0} -> estimate
    double residual_rms = 0.0;
};

/// The two-stage pipeline over harness records: per-B optimal lrs and
/// seed-median S feed the line fit; the same (B, eps_opt) pairs feed the
/// eps_max estimators with the fitted B_noise.
inline ScalingFit fit_scaling(std::span<const RunRecord> records) {
    const std::vector<SePoint> pts = extract_se_points(records);
    std::vector<std::pair<double, double>> se, be;
    se.reserve(pts.size());
    be.reserve(pts.size());
    for (const SePoint& p : pts) {
        se.emplace_back(p.inv_examples, p.inv_steps);
        be.emplace_back(static_cast<double>(p.batch_size), p.optimal_lr);
    }
    const BnoiseFit line = fit_bnoise(se);
    ScalingFit fit;
    fit.b_noise = line.b_noise;
    fit.s_min = line.s_min;
    fit.e_min = line.b_noise * line.s_min;
    fit.residual_rms = line.residual_rms;
    fit.eps_max_adam = estimate_eps_max_adam(be, line.b_noise);
    fit.eps_max_sgd[0.5] = estimate_eps_max_sgd(be, line.b_noise, 0.5);
    fit.eps_max_sgd[1.0] = estimate_eps_max_sgd(be, line.b_noise, 1.0);
    return fit;
}

}  // namespace surge
