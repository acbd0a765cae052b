#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "surge/fit.hpp"
#include "surge/laws.hpp"
#include "surge/rng.hpp"

namespace {

// Points on 1/S = -b_noise (1/E) + 1/s_min for batch sizes b, using
// S = s_min (1 + b_noise / B), E = S B.
std::vector<std::pair<double, double>> exact_line_points(double bn, double smin,
                                                         const std::vector<double>& batches) {
    std::vector<std::pair<double, double>> pts;
    for (double b : batches) {
        const double steps = smin * (1.0 + bn / b);
        pts.emplace_back(1.0 / (steps * b), 1.0 / steps);
    }
    return pts;
}

TEST(FitBnoise, NoiselessRecoveryIsExact) {
    // recovered pair (b_noise = 500, s_min = 100) to relative error <= 1e-9
    const auto pts = exact_line_points(500.0, 100.0, {4, 16, 64, 256, 1024});
    const auto fit = surge::fit_bnoise(pts);
    EXPECT_NEAR(fit.b_noise / 500.0, 1.0, 1e-9);
    EXPECT_NEAR(fit.s_min / 100.0, 1.0, 1e-9);
    EXPECT_LE(fit.residual_rms, 1e-15);
}

TEST(FitBnoise, NoisyRecoveryMostlyWithinTenPercent) {
    // 5% multiplicative noise on 1/S, 20 points: within 10% in >= 90% of 100 trials
    std::vector<double> batches;
    for (int i = 0; i < 20; ++i) batches.push_back(4.0 * std::pow(1.44, i));
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        surge::RandomStream rng(surge::derive_seed(7, {surge::tag_word("fit-noise"),
                                                       static_cast<std::uint64_t>(trial)}));
        auto pts = exact_line_points(500.0, 100.0, batches);
        for (auto& [x, y] : pts) y *= 1.0 + 0.05 * rng.normal();
        const auto fit = surge::fit_bnoise(pts);
        if (std::fabs(fit.b_noise / 500.0 - 1.0) <= 0.10) ++hits;
    }
    EXPECT_GE(hits, 90);
}

TEST(FitBnoise, DegenerateAndInvalidDesigns) {
    using P = std::pair<double, double>;
    EXPECT_THROW(surge::fit_bnoise(std::vector<P>{{0.01, 0.1}}), surge::fit_failure_error);
    // identical 1/E values
    EXPECT_THROW(surge::fit_bnoise(std::vector<P>{{0.01, 0.1}, {0.01, 0.2}}),
                 surge::fit_failure_error);
    // positive slope (data violate the model)
    EXPECT_THROW(surge::fit_bnoise(std::vector<P>{{0.01, 0.1}, {0.02, 0.2}}),
                 surge::fit_failure_error);
    // nonpositive values
    EXPECT_THROW(surge::fit_bnoise(std::vector<P>{{0.01, -0.1}, {0.02, 0.2}}),
                 surge::fit_failure_error);
}

TEST(EstimateEpsMaxAdam, InvertsTheSurgeLawExactly) {
    const double em = 0.7, bn = 50.0;
    std::vector<std::pair<double, double>> pairs;
    for (double b : {2.0, 10.0, 50.0, 300.0, 2000.0})
        pairs.emplace_back(b, surge::surge_lr(b, bn, em));
    EXPECT_NEAR(surge::estimate_eps_max_adam(pairs, bn), em, 1e-12);
}

TEST(EstimateEpsMaxAdam, SinglePairAtBnoise) {
    std::vector<std::pair<double, double>> pairs{{50.0, 0.123}};
    EXPECT_NEAR(surge::estimate_eps_max_adam(pairs, 50.0), 0.123, 1e-15);
}

TEST(EstimateEpsMaxAdam, RoundTripProperty) {
    surge::RandomStream rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const double em = 0.01 + rng.uniform();
        const double bn = 1.0 + 200.0 * rng.uniform();
        std::vector<std::pair<double, double>> pairs;
        for (int k = 0; k < 8; ++k) {
            const double b = 0.5 * std::pow(4.0, k * 0.5 + rng.uniform());
            pairs.emplace_back(b, surge::surge_lr(b, bn, em));
        }
        EXPECT_NEAR(surge::estimate_eps_max_adam(pairs, bn), em, 1e-12);
    }
}

TEST(EstimateEpsMaxAdam, PermutationInvariant) {
    std::vector<std::pair<double, double>> pairs{{2.0, 0.01}, {8.0, 0.02}, {32.0, 0.025}};
    const double a = surge::estimate_eps_max_adam(pairs, 20.0);
    std::reverse(pairs.begin(), pairs.end());
    EXPECT_EQ(surge::estimate_eps_max_adam(pairs, 20.0), a);
    EXPECT_THROW(surge::estimate_eps_max_adam({}, 20.0), std::invalid_argument);
}

TEST(EstimateEpsMaxSgd, InvertsTheSgdLawExactly) {
    const double em = 0.4, bn = 80.0;
    for (double alpha : {0.5, 1.0}) {
        std::vector<std::pair<double, double>> pairs;
        for (double b : {3.0, 20.0, 80.0, 500.0})
            pairs.emplace_back(b, surge::sgd_lr(b, bn, em, alpha));
        EXPECT_NEAR(surge::estimate_eps_max_sgd(pairs, bn, alpha), em, 1e-12);
    }
}

TEST(EstimateEpsMaxSgd, LargeBatchSinglePairApproachesObservation) {
    std::vector<std::pair<double, double>> pairs{{1e9, 0.2}};
    EXPECT_NEAR(surge::estimate_eps_max_sgd(pairs, 50.0, 1.0), 0.2, 1e-7);
}

TEST(EstimateEpsMaxSgd, AlphaHalfBiasedOnSurgeData) {
    // the SGD-alpha=0.5 estimator applied to surge-generated observations is
    // systematically inconsistent across batch sizes: per-pair estimates
    // disagree, unlike the matched estimator (reported, not pinned)
    const double em = 0.5, bn = 64.0;
    std::vector<double> per_pair;
    for (double b : {1.0, 8.0, 64.0, 512.0, 4096.0}) {
        std::vector<std::pair<double, double>> one{{b, surge::surge_lr(b, bn, em)}};
        per_pair.push_back(surge::estimate_eps_max_sgd(one, bn, 0.5));
    }
    const auto [lo, hi] = std::minmax_element(per_pair.begin(), per_pair.end());
    EXPECT_GT(*hi / *lo, 1.2);  // spread well beyond numerical noise
}

TEST(ScalingFitIdentity, EminEqualsBnTimesSmin) {
    // fit_scaling over synthetic records generated from the exact S(B) law
    std::vector<surge::RunRecord> records;
    const double bn = 500.0, smin = 100.0, em = 0.05;
    for (double b : {4.0, 16.0, 64.0, 256.0}) {
        const double steps = smin * (1.0 + bn / b);
        surge::RunRecord r;
        r.batch_size = static_cast<std::int64_t>(b);
        r.lr = surge::surge_lr(b, bn, em);
        r.converged = true;
        r.steps_to_target = static_cast<std::int64_t>(std::llround(steps));
        r.examples = r.steps_to_target * r.batch_size;
        r.final_loss = 0.5;
        records.push_back(r);
    }
    const auto fit = surge::fit_scaling(records);
    EXPECT_NEAR(fit.e_min, fit.b_noise * fit.s_min, 1e-9 * fit.e_min);
    EXPECT_NEAR(fit.b_noise / bn, 1.0, 0.02);  // integer rounding of S only
    EXPECT_NEAR(fit.eps_max_adam / em, 1.0, 0.02);
}

}  // namespace
