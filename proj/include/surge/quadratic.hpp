#pragma once

// Noisy quadratic workload: loss L(theta) = 0.5 (theta - theta*)^T H (theta - theta*),
// per-sample gradient H(theta - theta*) + eta with eta ~ Normal(0, diag(sigma^2)).
// Ground truth for every law input is analytic: GradientStats at theta is
// exactly (H(theta - theta*), noise_sigma). The noise std is constant while
// the gradient mean shrinks as training progresses, so the gradient noise
// scale grows as the loss falls.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "surge/gradient_stats.hpp"
#include "surge/hessian.hpp"
#include "surge/rng.hpp"

namespace surge {

class QuadraticWorkload {
  public:
    QuadraticWorkload(HessianSpec hessian, std::vector<double> theta_star,
                      std::vector<double> noise_sigma, std::uint64_t rng_seed = 0)
        : hessian_(std::move(hessian)),
          theta_star_(std::move(theta_star)),
          noise_sigma_(std::move(noise_sigma)),
          rng_seed_(rng_seed) {
        if (theta_star_.size() != hessian_.dim() || noise_sigma_.size() != hessian_.dim())
            throw std::invalid_argument("QuadraticWorkload: dimension mismatch");
        for (double s : noise_sigma_)
            if (!(s >= 0.0)) throw std::invalid_argument("QuadraticWorkload: noise_sigma must be >= 0");
    }

    std::size_t dim() const { return hessian_.dim(); }
    const HessianSpec& hessian() const { return hessian_; }
    const std::vector<double>& theta_star() const { return theta_star_; }
    const std::vector<double>& noise_sigma() const { return noise_sigma_; }
    std::uint64_t rng_seed() const { return rng_seed_; }

    double loss(std::span<const double> theta) const {
        std::vector<double> x = displacement(theta);
        return 0.5 * hessian_.quad_form(x);
    }

    std::vector<double> true_gradient(std::span<const double> theta) const {
        return hessian_.matvec(displacement(theta));
    }

    /// One per-sample gradient draw: H(theta - theta*) + sigma .* z.
    std::vector<double> per_sample_gradient(std::span<const double> theta, RandomStream& rng) const {
        std::vector<double> g = true_gradient(theta);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += noise_sigma_[i] * rng.normal();
        return g;
    }

    /// Mean of `batch` per-sample gradients. The batch mean is Normal(
    /// H(theta - theta*), diag(sigma^2)/B) exactly, so it is drawn directly
    /// from that distribution (one d-vector of normals per step regardless of
    /// batch size).
    std::vector<double> sample_batch_gradient(std::span<const double> theta, std::int64_t batch,
                                              RandomStream& rng) const {
        if (batch < 1) throw std::invalid_argument("sample_batch_gradient: batch must be >= 1");
        std::vector<double> g = true_gradient(theta);
        const double scale = 1.0 / std::sqrt(static_cast<double>(batch));
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += noise_sigma_[i] * scale * rng.normal();
        return g;
    }

    /// Exact gradient statistics at theta: (H(theta - theta*), noise_sigma).
    GradientStats exact_stats(std::span<const double> theta) const {
        return {true_gradient(theta), noise_sigma_};
    }

  private:
    std::vector<double> displacement(std::span<const double> theta) const {
        if (theta.size() != dim()) throw std::invalid_argument("QuadraticWorkload: dimension mismatch");
        std::vector<double> x(dim());
        for (std::size_t i = 0; i < dim(); ++i) x[i] = theta[i] - theta_star_[i];
        return x;
    }

    HessianSpec hessian_;
    std::vector<double> theta_star_;
    std::vector<double> noise_sigma_;
    std::uint64_t rng_seed_;
};

}  // namespace surge
