#pragma once

// Oracle-agreement suite behind `surge verify`: brute-force Monte Carlo
// results against the closed forms, plus the cheap algebraic identities.
// The law evaluation is injectable so a corrupted law can be used as a
// negative control in tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "surge/laws.hpp"
#include "surge/mc.hpp"
#include "surge/quadratic.hpp"
#include "surge/rng.hpp"

namespace surge {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    std::string text() const {
        std::ostringstream out;
        for (const auto& c : checks)
            out << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  " << c.detail << "\n";
        out << (all_pass() ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
        return out.str();
    }
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    int n_models = 4;
    std::int64_t trials = 20000;
    double rel_tolerance = 0.15;  // on top of grid quantization
};

using LawFn = std::function<double(const LawInputs&, double)>;

namespace detail {

/// Random valid law inputs: positive means, positive-coupling Hessian.
inline LawInputs random_verify_model(RandomStream& rng, std::size_t d) {
    std::vector<double> mu(d), sigma(d), v(d);
    for (std::size_t i = 0; i < d; ++i) {
        mu[i] = 0.2 + 1.3 * rng.uniform();
        sigma[i] = 0.5 + 1.5 * rng.uniform();
        v[i] = 0.3 + rng.uniform();
    }
    const double beta = 0.2 + 0.5 * rng.uniform();
    std::vector<double> h(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            h[i * d + j] = beta * v[i] * v[j];
            if (i == j) h[i * d + j] += 0.5 + rng.uniform();
        }
    return {GradientStats{std::move(mu), std::move(sigma)}, HessianSpec::Dense(std::move(h), d)};
}

/// Places theta so that the quadratic's exact stats equal the model's.
inline std::vector<double> theta_for_stats(const LawInputs& in) {
    // solve H x = mu by conjugate-ish direct elimination on the dense matrix
    const std::size_t d = in.stats.dim();
    std::vector<double> a = in.hessian.to_dense();
    std::vector<double> b = in.stats.mu;
    // Gaussian elimination with partial pivoting
    std::vector<std::size_t> piv(d);
    for (std::size_t i = 0; i < d; ++i) piv[i] = i;
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < d; ++i)
            if (std::fabs(a[i * d + k]) > std::fabs(a[p * d + k])) p = i;
        if (p != k) {
            for (std::size_t j = 0; j < d; ++j) std::swap(a[k * d + j], a[p * d + j]);
            std::swap(b[k], b[p]);
        }
        const double pivval = a[k * d + k];
        for (std::size_t i = k + 1; i < d; ++i) {
            const double f = a[i * d + k] / pivval;
            for (std::size_t j = k; j < d; ++j) a[i * d + j] -= f * a[k * d + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(d);
    for (std::size_t i = d; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < d; ++j) s -= a[i * d + j] * x[j];
        x[i] = s / a[i * d + i];
    }
    return x;
}

}  // namespace detail

/// Runs the oracle-vs-law agreement suite. `law` defaults to the exact
/// optimal-LR evaluation; substituting a corrupted function must fail.
inline VerifyReport verify_laws(const VerifyOptions& opt = {}, LawFn law = nullptr) {
    if (!law) law = [](const LawInputs& in, double b) { return optimal_lr_sign_exact(in, b); };
    VerifyReport report;

    // 1) MC one-step argmax agrees with the law on random models
    for (int m = 0; m < opt.n_models; ++m) {
        RandomStream model_rng(derive_seed(opt.seed, {tag_word("verify-model"),
                                                      static_cast<std::uint64_t>(m)}));
        const std::size_t d = 2 + (m % 7);
        const LawInputs in = detail::random_verify_model(model_rng, d);
        const std::vector<double> theta = detail::theta_for_stats(in);
        const QuadraticWorkload w(in.hessian, std::vector<double>(d, 0.0), in.stats.sigma);
        for (double batch : {1.0, 4.0, 16.0, 64.0}) {
            const double predicted = law(in, batch);
            VerifyCheck check;
            std::ostringstream name;
            name << "mc-vs-law model=" << m << " d=" << d << " B=" << batch;
            check.name = name.str();
            if (!(predicted > 0.0)) {
                check.pass = false;
                check.detail = "law returned non-positive lr";
                report.checks.push_back(check);
                continue;
            }
            const auto grid = log_spaced(predicted / 10.0, predicted * 10.0, 60);
            RandomStream mc_rng(derive_seed(opt.seed, {tag_word("verify-mc"),
                                                       static_cast<std::uint64_t>(m),
                                                       static_cast<std::uint64_t>(batch)}));
            const auto mc = mc_optimal_lr_onestep(w, theta, static_cast<std::int64_t>(batch), grid,
                                                  opt.trials, mc_rng);
            const double grid_step = std::log(grid[1] / grid[0]);
            const double tol = std::max(std::log(1.0 + opt.rel_tolerance), 2.5 * grid_step);
            const double err = std::fabs(std::log(mc.lr_star / predicted));
            check.pass = err <= tol;
            std::ostringstream detail;
            detail << "law=" << predicted << " mc=" << mc.lr_star << " |log ratio|=" << err
                   << " tol=" << tol;
            check.detail = detail.str();
            report.checks.push_back(check);
        }
    }

    // 2) MC sign moments agree with the analytic moments
    {
        RandomStream rng(derive_seed(opt.seed, {tag_word("verify-moments")}));
        const LawInputs in = detail::random_verify_model(rng, 5);
        const auto analytic = sign_batch_moments(in.stats, 8.0);
        const auto mc = mc_sign_moments(in.stats, 8.0, std::max<std::int64_t>(opt.trials, 10000), rng);
        bool ok = true;
        double worst = 0.0;
        const double n = static_cast<double>(std::max<std::int64_t>(opt.trials, 10000));
        for (std::size_t i = 0; i < in.stats.dim(); ++i) {
            const double dev = std::fabs(mc.mean[i] - analytic.mean[i]);
            // near saturation the empirical variance collapses to zero; use
            // the analytic variance for the error budget instead
            const double se = std::sqrt(std::max(analytic.var_diag[i], 1e-12) / n);
            const double allowed = 5.0 * std::max(mc.stderr_mean[i], se);
            worst = std::max(worst, dev / allowed);
            if (dev > allowed) ok = false;
        }
        std::ostringstream detail;
        detail << "worst deviation " << worst << " of 5-sigma budget";
        report.checks.push_back({"mc-sign-moments", ok, detail.str()});
    }

    // 3) surge symmetry (algebraic)
    {
        bool ok = true;
        for (double k : {2.0, 5.0, 10.0, 100.0}) {
            const double a = surge_lr(k * 37.0, 37.0, 0.02);
            const double b = surge_lr(37.0 / k, 37.0, 0.02);
            if (std::fabs(a - b) > 1e-12 * 0.02) ok = false;
        }
        report.checks.push_back({"surge-symmetry", ok, "surge(k Bn) == surge(Bn / k)"});
    }

    // 4) trade-off hyperbola identity
    {
        const auto c = tradeoff_curve(123.0, 4567.0, 33);
        bool ok = true;
        for (const auto& p : c.points) {
            const double lhs = (p.steps / 123.0 - 1.0) * (p.examples / 4567.0 - 1.0);
            if (std::fabs(lhs - 1.0) > 1e-12) ok = false;
        }
        report.checks.push_back({"tradeoff-identity", ok, "(S/Smin-1)(E/Emin-1) == 1"});
    }

    return report;
}

}  // namespace surge
