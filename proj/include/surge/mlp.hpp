#pragma once

// Tiny MLP workload with exact per-sample backprop: input -> tanh hidden ->
// softmax cross-entropy, trained on a seeded Gaussian-blob classification set.
// Small enough (<= 1e4 parameters) that per-sample gradients are computed
// sample-by-sample and validated against central finite differences.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "surge/rng.hpp"

namespace surge {

/// Gaussian-blob classification dataset. Class centers sit on a circle of
/// radius 2 in the first two input dimensions; samples are center + blob_std
/// * z with round-robin labels. Generation is a pure function of the seed.
struct BlobDataset {
    std::size_t input_dim = 2;
    std::size_t n_classes = 4;
    std::vector<double> x;       // n_samples * input_dim, row-major
    std::vector<std::size_t> y;  // n_samples

    std::size_t size() const { return y.size(); }

    static BlobDataset generate(std::size_t n_samples, std::size_t n_classes, std::size_t input_dim,
                                double blob_std, std::uint64_t seed) {
        if (n_samples == 0 || n_classes < 2 || input_dim < 2)
            throw std::invalid_argument("BlobDataset: need n_samples>0, n_classes>=2, input_dim>=2");
        BlobDataset ds;
        ds.input_dim = input_dim;
        ds.n_classes = n_classes;
        ds.x.resize(n_samples * input_dim);
        ds.y.resize(n_samples);
        RandomStream rng(derive_seed(seed, {tag_word("blob-dataset")}));
        for (std::size_t s = 0; s < n_samples; ++s) {
            const std::size_t k = s % n_classes;
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(n_classes);
            for (std::size_t j = 0; j < input_dim; ++j) {
                double center = 0.0;
                if (j == 0) center = 2.0 * std::cos(angle);
                if (j == 1) center = 2.0 * std::sin(angle);
                ds.x[s * input_dim + j] = center + blob_std * rng.normal();
            }
            ds.y[s] = k;
        }
        return ds;
    }
};

class MlpWorkload {
  public:
    MlpWorkload(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                BlobDataset dataset)
        : in_(input_dim), hid_(hidden_dim), out_(output_dim), data_(std::move(dataset)) {
        if (data_.input_dim != in_) throw std::invalid_argument("MlpWorkload: dataset input_dim mismatch");
        if (data_.n_classes != out_) throw std::invalid_argument("MlpWorkload: dataset n_classes mismatch");
        if (dim() > 10000) throw std::invalid_argument("MlpWorkload: parameter count above 1e4 cap");
    }

    /// theta layout: [W1 (hid x in), b1 (hid), W2 (out x hid), b2 (out)]
    std::size_t dim() const { return hid_ * in_ + hid_ + out_ * hid_ + out_; }
    std::size_t input_dim() const { return in_; }
    std::size_t hidden_dim() const { return hid_; }
    std::size_t output_dim() const { return out_; }
    const BlobDataset& dataset() const { return data_; }

    /// Seeded scaled-Gaussian parameter initialization (1/sqrt(fan_in)).
    std::vector<double> initial_theta(std::uint64_t seed) const {
        RandomStream rng(derive_seed(seed, {tag_word("mlp-init")}));
        std::vector<double> theta(dim());
        const double s1 = 1.0 / std::sqrt(static_cast<double>(in_));
        const double s2 = 1.0 / std::sqrt(static_cast<double>(hid_));
        std::size_t p = 0;
        for (std::size_t i = 0; i < hid_ * in_; ++i) theta[p++] = s1 * rng.normal();
        for (std::size_t i = 0; i < hid_; ++i) theta[p++] = 0.0;
        for (std::size_t i = 0; i < out_ * hid_; ++i) theta[p++] = s2 * rng.normal();
        for (std::size_t i = 0; i < out_; ++i) theta[p++] = 0.0;
        return theta;
    }

    /// Cross-entropy loss of one sample.
    double sample_loss(std::span<const double> theta, std::size_t idx) const {
        Forward f = forward(theta, idx);
        return -std::log(std::max(f.probs[data_.y[idx]], 1e-300));
    }

    /// Mean cross-entropy over the full dataset.
    double loss(std::span<const double> theta) const {
        double total = 0.0;
        for (std::size_t s = 0; s < data_.size(); ++s) total += sample_loss(theta, s);
        return total / static_cast<double>(data_.size());
    }

    /// Exact gradient of one sample's loss via backprop.
    std::vector<double> per_sample_gradient(std::span<const double> theta, std::size_t idx) const {
        check_dim(theta.size());
        Forward f = forward(theta, idx);
        std::vector<double> grad(dim(), 0.0);
        // output delta: softmax - onehot
        std::vector<double> dout = f.probs;
        dout[data_.y[idx]] -= 1.0;
        const double* w2 = theta.data() + hid_ * in_ + hid_;
        double* gw2 = grad.data() + hid_ * in_ + hid_;
        double* gb2 = gw2 + out_ * hid_;
        for (std::size_t k = 0; k < out_; ++k) {
            gb2[k] = dout[k];
            for (std::size_t j = 0; j < hid_; ++j) gw2[k * hid_ + j] = dout[k] * f.hidden[j];
        }
        // hidden delta: (W2^T dout) * (1 - h^2)
        const double* xs = &data_.x[idx * in_];
        double* gw1 = grad.data();
        double* gb1 = grad.data() + hid_ * in_;
        for (std::size_t j = 0; j < hid_; ++j) {
            double back = 0.0;
            for (std::size_t k = 0; k < out_; ++k) back += w2[k * hid_ + j] * dout[k];
            const double dh = back * (1.0 - f.hidden[j] * f.hidden[j]);
            gb1[j] = dh;
            for (std::size_t i = 0; i < in_; ++i) gw1[j * in_ + i] = dh * xs[i];
        }
        return grad;
    }

    /// Exact full-data gradient (mean of per-sample gradients).
    std::vector<double> true_gradient(std::span<const double> theta) const {
        std::vector<double> g(dim(), 0.0);
        for (std::size_t s = 0; s < data_.size(); ++s) {
            std::vector<double> gs = per_sample_gradient(theta, s);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += gs[i];
        }
        const double inv = 1.0 / static_cast<double>(data_.size());
        for (double& v : g) v *= inv;
        return g;
    }

    /// Mean gradient of `batch` samples drawn uniformly with replacement.
    std::vector<double> sample_batch_gradient(std::span<const double> theta, std::int64_t batch,
                                              RandomStream& rng) const {
        if (batch < 1) throw std::invalid_argument("sample_batch_gradient: batch must be >= 1");
        std::vector<double> g(dim(), 0.0);
        for (std::int64_t b = 0; b < batch; ++b) {
            const std::size_t idx = static_cast<std::size_t>(rng.uniform_index(data_.size()));
            std::vector<double> gs = per_sample_gradient(theta, idx);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += gs[i];
        }
        const double inv = 1.0 / static_cast<double>(batch);
        for (double& v : g) v *= inv;
        return g;
    }

  private:
    struct Forward {
        std::vector<double> hidden;  // tanh activations
        std::vector<double> probs;   // softmax outputs
    };

    Forward forward(std::span<const double> theta, std::size_t idx) const {
        check_dim(theta.size());
        Forward f;
        f.hidden.resize(hid_);
        f.probs.resize(out_);
        const double* w1 = theta.data();
        const double* b1 = theta.data() + hid_ * in_;
        const double* w2 = b1 + hid_;
        const double* b2 = w2 + out_ * hid_;
        const double* xs = &data_.x[idx * in_];
        for (std::size_t j = 0; j < hid_; ++j) {
            double z = b1[j];
            for (std::size_t i = 0; i < in_; ++i) z += w1[j * in_ + i] * xs[i];
            f.hidden[j] = std::tanh(z);
        }
        double zmax = -1e300;
        for (std::size_t k = 0; k < out_; ++k) {
            double z = b2[k];
            for (std::size_t j = 0; j < hid_; ++j) z += w2[k * hid_ + j] * f.hidden[j];
            f.probs[k] = z;
            zmax = std::max(zmax, z);
        }
        double denom = 0.0;
        for (double& p : f.probs) {
            p = std::exp(p - zmax);
            denom += p;
        }
        for (double& p : f.probs) p /= denom;
        return f;
    }

    void check_dim(std::size_t n) const {
        if (n != dim()) throw std::invalid_argument("MlpWorkload: theta dimension mismatch");
    }

    std::size_t in_, hid_, out_;
    BlobDataset data_;
};

}  // namespace surge
