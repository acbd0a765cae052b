#pragma once

// Symmetric Hessian in dense, diagonal, or uniform-off-diagonal form.
// The uniform form H = (a - c) I + c 11^T evaluates every sum the laws need
// in O(d), which keeps large-d law curves and the grid-search harness cheap;
// the dense path is the reference implementation.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace surge {

class HessianSpec {
  public:
    enum class Kind { dense, diagonal, uniform };

    static constexpr std::size_t kMaxDenseDim = 4096;

    /// Dense symmetric matrix, row-major, length d*d.
    static HessianSpec Dense(std::vector<double> values, std::size_t d) {
        if (d == 0 || values.size() != d * d)
            throw std::invalid_argument("HessianSpec::Dense: values must have length dim*dim");
        if (d > kMaxDenseDim)
            throw std::invalid_argument("HessianSpec::Dense: dim exceeds dense limit of 4096");
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                const double hij = values[i * d + j];
                const double hji = values[j * d + i];
                const double scale = std::max({1.0, std::fabs(hij), std::fabs(hji)});
                if (std::fabs(hij - hji) > 1e-12 * scale)
                    throw std::invalid_argument("HessianSpec::Dense: matrix not symmetric at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
        HessianSpec h;
        h.kind_ = Kind::dense;
        h.dim_ = d;
        h.values_ = std::move(values);
        h.check_trace();
        return h;
    }

    static HessianSpec Diagonal(std::vector<double> diag) {
        if (diag.empty()) throw std::invalid_argument("HessianSpec::Diagonal: empty diagonal");
        HessianSpec h;
        h.kind_ = Kind::diagonal;
        h.dim_ = diag.size();
        h.values_ = std::move(diag);
        h.check_trace();
        return h;
    }

    /// H_ii = a, H_ij = c for i != j.
    static HessianSpec Uniform(double a, double c, std::size_t d) {
        if (d == 0) throw std::invalid_argument("HessianSpec::Uniform: dim must be positive");
        HessianSpec h;
        h.kind_ = Kind::uniform;
        h.dim_ = d;
        h.a_ = a;
        h.c_ = c;
        h.check_trace();
        return h;
    }

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double uniform_a() const { return a_; }
    double uniform_c() const { return c_; }

    double diag(std::size_t i) const {
        switch (kind_) {
            case Kind::dense: return values_[i * dim_ + i];
            case Kind::diagonal: return values_[i];
            default: return a_;
        }
    }

    double trace() const {
        switch (kind_) {
            case Kind::dense: {
                double t = 0.0;
                for (std::size_t i = 0; i < dim_; ++i) t += values_[i * dim_ + i];
                return t;
            }
            case Kind::diagonal: return std::accumulate(values_.begin(), values_.end(), 0.0);
            default: return static_cast<double>(dim_) * a_;
        }
    }

    /// sum_i H_ii w_i
    double weighted_diag_sum(std::span<const double> w) const {
        require_dim(w.size());
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += diag(i) * w[i];
        return s;
    }

    /// v^T H v
    double quad_form(std::span<const double> v) const {
        require_dim(v.size());
        switch (kind_) {
            case Kind::dense: {
                double s = 0.0;
                for (std::size_t i = 0; i < dim_; ++i) {
                    double row = 0.0;
                    for (std::size_t j = 0; j < dim_; ++j) row += values_[i * dim_ + j] * v[j];
                    s += v[i] * row;
                }
                return s;
            }
            case Kind::diagonal: {
                double s = 0.0;
                for (std::size_t i = 0; i < dim_; ++i) s += values_[i] * v[i] * v[i];
                return s;
            }
            default: {
                double sum = 0.0, sumsq = 0.0;
                for (double x : v) {
                    sum += x;
                    sumsq += x * x;
                }
                return (a_ - c_) * sumsq + c_ * sum * sum;
            }
        }
    }

    /// sum_{i != j} r_i r_j H_ij  (the cross sum in the B_noise denominator)
    double cross_sum(std::span<const double> r) const {
        require_dim(r.size());
        switch (kind_) {
            case Kind::diagonal: return 0.0;
            case Kind::uniform: {
                double sum = 0.0, sumsq = 0.0;
                for (double x : r) {
                    sum += x;
                    sumsq += x * x;
                }
                return c_ * (sum * sum - sumsq);
            }
            default: {
                double s = quad_form(r);
                for (std::size_t i = 0; i < dim_; ++i) s -= diag(i) * r[i] * r[i];
                return s;
            }
        }
    }

    std::vector<double> matvec(std::span<const double> x) const {
        require_dim(x.size());
        std::vector<double> y(dim_, 0.0);
        switch (kind_) {
            case Kind::dense:
                for (std::size_t i = 0; i < dim_; ++i) {
                    double row = 0.0;
                    for (std::size_t j = 0; j < dim_; ++j) row += values_[i * dim_ + j] * x[j];
                    y[i] = row;
                }
                break;
            case Kind::diagonal:
                for (std::size_t i = 0; i < dim_; ++i) y[i] = values_[i] * x[i];
                break;
            default: {
                const double sum = std::accumulate(x.begin(), x.end(), 0.0);
                for (std::size_t i = 0; i < dim_; ++i) y[i] = (a_ - c_) * x[i] + c_ * sum;
                break;
            }
        }
        return y;
    }

    std::vector<double> to_dense() const {
        if (dim_ > kMaxDenseDim)
            throw std::invalid_argument("HessianSpec::to_dense: dim exceeds dense limit of 4096");
        std::vector<double> m(dim_ * dim_, 0.0);
        switch (kind_) {
            case Kind::dense: return values_;
            case Kind::diagonal:
                for (std::size_t i = 0; i < dim_; ++i) m[i * dim_ + i] = values_[i];
                break;
            default:
                for (std::size_t i = 0; i < dim_; ++i)
                    for (std::size_t j = 0; j < dim_; ++j) m[i * dim_ + j] = (i == j) ? a_ : c_;
                break;
        }
        return m;
    }

  private:
    HessianSpec() = default;

    void check_trace() const {
        if (!(trace() > 0.0)) throw std::invalid_argument("HessianSpec: trace must be positive");
    }

    void require_dim(std::size_t n) const {
        if (n != dim_) throw std::invalid_argument("HessianSpec: dimension mismatch");
    }

    Kind kind_ = Kind::uniform;
    std::size_t dim_ = 0;
    double a_ = 0.0, c_ = 0.0;
    std::vector<double> values_;  // dense (d*d) or diagonal (d)
};

}  // namespace surge
