#pragma once

// Training-run executor and (batch size x learning rate x seed) grid search.
// Each run records S = steps to first reach the target loss, E = S * batch
// size, and the full-data loss after a fixed number of extra steps past the
// target; the per-batch-size optimal learning rate is the one whose
// seed-averaged post-target loss is lowest.
//
// Determinism: every cell's noise stream is derived by stable hashing from
// the master seed, so results are independent of execution order and thread
// count. Two keyings are available: per_cell (stream depends on B, lr index,
// and round) and shared_rounds (stream depends on the round only, so all
// cells of one round share noise realizations -- common random numbers, which
// sharpens comparisons between cells at desk scale).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "surge/errors.hpp"
#include "surge/optimizer.hpp"
#include "surge/rng.hpp"
#include "surge/workload.hpp"

namespace surge {

enum class StreamKeying { per_cell, shared_rounds };

struct GridConfig {
    OptimizerConfig optimizer;          // lr field is overridden per cell
    std::vector<std::int64_t> batch_sizes;  // strictly increasing
    std::vector<double> lrs;                // strictly increasing
    int rounds = 1;
    double target_loss = 0.0;
    int extra_steps = 50;
    int max_steps = 10000;
    std::uint64_t master_seed = 1;
    StreamKeying keying = StreamKeying::per_cell;
    double init_loss_multiple = 10.0;       // L(theta0) ~= multiple * target
    std::optional<std::vector<double>> theta0;  // explicit start overrides the seeded policy
};

inline void validate(const GridConfig& g) {
    validate(g.optimizer);
    if (g.batch_sizes.empty() || g.lrs.empty())
        throw std::invalid_argument("GridConfig: batch_sizes and lrs must be nonempty");
    for (std::size_t i = 0; i + 1 < g.batch_sizes.size(); ++i)
        if (g.batch_sizes[i] >= g.batch_sizes[i + 1])
            throw std::invalid_argument("GridConfig: batch_sizes must be strictly increasing");
    for (std::size_t i = 0; i + 1 < g.lrs.size(); ++i)
        if (!(g.lrs[i] < g.lrs[i + 1]))
            throw std::invalid_argument("GridConfig: lrs must be strictly increasing");
    if (g.batch_sizes.front() < 1) throw std::invalid_argument("GridConfig: batch sizes must be >= 1");
    if (!(g.lrs.front() > 0.0)) throw std::invalid_argument("GridConfig: lrs must be positive");
    if (g.rounds < 1) throw std::invalid_argument("GridConfig: rounds must be >= 1");
    if (g.extra_steps < 0) throw std::invalid_argument("GridConfig: extra_steps must be >= 0");
    if (g.max_steps < 1) throw std::invalid_argument("GridConfig: max_steps must be >= 1");
}

struct RunRecord {
    std::int64_t batch_size = 0;
    double lr = 0.0;
    std::uint64_t seed = 0;  // derived stream seed for this run
    bool converged = false;
    std::int64_t steps_to_target = 0;  // S; meaningful only when converged
    std::int64_t examples = 0;         // E = S * batch_size
    double final_loss = std::numeric_limits<double>::infinity();
};

/// Deterministic starting point: a Gaussian direction drawn from the master
/// seed, scaled so the initial loss is `multiple` times the target. Shared by
/// every cell of a grid.
inline std::vector<double> initial_point(const Workload& w, std::uint64_t master_seed,
                                         double target_loss, double multiple) {
    return std::visit(
        [&](const auto& v) -> std::vector<double> {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, QuadraticWorkload>) {
                RandomStream rng(derive_seed(master_seed, {tag_word("theta0")}));
                std::vector<double> dir = rng.normal_vector(v.dim());
                const double qf = v.hessian().quad_form(dir);
                if (!(qf > 0.0)) throw std::invalid_argument("initial_point: degenerate direction");
                const double scale = std::sqrt(2.0 * multiple * target_loss / qf);
                std::vector<double> theta = v.theta_star();
                for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += scale * dir[i];
                return theta;
            } else {
                return v.initial_theta(master_seed);
            }
        },
        w);
}

/// Runs one training cell. `stream_seed` fully determines the noise stream;
/// theta0 is the shared starting point. S is the first step index whose
/// full-data loss is <= target; after that the run continues for extra_steps
/// more steps and records the resulting full-data loss. Runs that fail to
/// reach the target within max_steps (or go non-finite) report converged =
/// false with final_loss = +infinity.
inline RunRecord run_training(const Workload& w, const OptimizerConfig& opt_template,
                              std::int64_t batch_size, double lr, std::uint64_t stream_seed,
                              double target_loss, int extra_steps, int max_steps,
                              std::span<const double> theta0) {
    if (batch_size < 1) throw std::invalid_argument("run_training: batch_size must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("run_training: lr must be > 0");
    if (max_steps < 1) throw std::invalid_argument("run_training: max_steps must be >= 1");
    if (extra_steps < 0) throw std::invalid_argument("run_training: extra_steps must be >= 0");

    OptimizerConfig cfg = opt_template;
    cfg.lr = lr;
    validate(cfg);

    RunRecord rec;
    rec.batch_size = batch_size;
    rec.lr = lr;
    rec.seed = stream_seed;

    RandomStream rng(stream_seed);
    std::vector<double> theta(theta0.begin(), theta0.end());
    OptimizerState state(theta.size());

    for (int step = 1; step <= max_steps; ++step) {
        std::vector<double> g = sample_batch_gradient(w, theta, batch_size, rng);
        optimizer_step(cfg, state, theta, g);
        const double current = loss(w, theta);
        if (!std::isfinite(current)) return rec;  // diverged
        if (current <= target_loss) {
            rec.converged = true;
            rec.steps_to_target = step;
            rec.examples = step * batch_size;
            break;
        }
    }
    if (!rec.converged) return rec;

    double final_loss = loss(w, theta);
    for (int step = 0; step < extra_steps; ++step) {
        std::vector<double> g = sample_batch_gradient(w, theta, batch_size, rng);
        optimizer_step(cfg, state, theta, g);
        final_loss = loss(w, theta);
        if (!std::isfinite(final_loss)) {
            rec.converged = false;
            rec.final_loss = std::numeric_limits<double>::infinity();
            return rec;
        }
    }
    rec.final_loss = final_loss;
    return rec;
}

inline std::uint64_t cell_stream_seed(const GridConfig& g, std::int64_t batch, std::size_t lr_index,
                                      int round) {
    if (g.keying == StreamKeying::shared_rounds)
        return derive_seed(g.master_seed, {tag_word("run"), static_cast<std::uint64_t>(round)});
    return derive_seed(g.master_seed,
                       {tag_word("run"), static_cast<std::uint64_t>(batch),
                        static_cast<std::uint64_t>(lr_index), static_cast<std::uint64_t>(round)});
}

/// Full grid: one RunRecord per (B, lr, round), in deterministic cell order
/// regardless of `jobs`. A diverged or unconverged cell never aborts the grid.
inline std::vector<RunRecord> grid_search(const Workload& w, const GridConfig& g, int jobs = 1) {
    validate(g);
    const std::vector<double> theta0 =
        g.theta0 ? *g.theta0 : initial_point(w, g.master_seed, g.target_loss, g.init_loss_multiple);
    if (theta0.size() != dim(w)) throw std::invalid_argument("grid_search: theta0 dimension mismatch");

    struct Cell {
        std::int64_t batch;
        std::size_t lr_index;
        int round;
    };
    std::vector<Cell> cells;
    cells.reserve(g.batch_sizes.size() * g.lrs.size() * static_cast<std::size_t>(g.rounds));
    for (std::int64_t b : g.batch_sizes)
        for (std::size_t li = 0; li < g.lrs.size(); ++li)
            for (int r = 0; r < g.rounds; ++r) cells.push_back({b, li, r});

    std::vector<RunRecord> records(cells.size());
    auto work = [&](std::size_t idx) {
        const Cell& c = cells[idx];
        records[idx] = run_training(w, g.optimizer, c.batch, g.lrs[c.lr_index],
                                    cell_stream_seed(g, c.batch, c.lr_index, c.round), g.target_loss,
                                    g.extra_steps, g.max_steps, theta0);
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) work(i);
        };
        std::vector<std::thread> pool;
        const int n = std::min<int>(jobs, static_cast<int>(cells.size()));
        pool.reserve(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

/// The learning rate whose seed-averaged post-target loss is minimal among
/// converged runs at this batch size; ties break toward the smaller lr.
inline std::pair<double, double> empirical_optimal_lr(std::span<const RunRecord> records,
                                                      std::int64_t batch_size) {
    std::map<double, std::pair<double, int>> by_lr;  // lr -> (sum final, count)
    for (const RunRecord& r : records) {
        if (r.batch_size != batch_size || !r.converged) continue;
        auto& acc = by_lr[r.lr];
        acc.first += r.final_loss;
        acc.second += 1;
    }
    if (by_lr.empty())
        throw not_found_error("empirical_optimal_lr: no converged runs at batch size " +
                              std::to_string(batch_size));
    double best_lr = 0.0, best_mean = std::numeric_limits<double>::infinity();
    for (const auto& [lr, acc] : by_lr) {  // ascending lr: strict < keeps the smaller on ties
        const double mean = acc.first / acc.second;
        if (mean < best_mean) {
            best_mean = mean;
            best_lr = lr;
        }
    }
    return {best_lr, best_mean};
}

namespace detail {
inline double median_int64(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return static_cast<double>(v[n / 2]);
    return 0.5 * (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2]));
}
}  // namespace detail

/// (1/E, 1/S) observation with its provenance, one per batch size.
struct SePoint {
    std::int64_t batch_size;
    double optimal_lr;
    double median_steps;   // seed-median S at the optimal lr
    double inv_examples;   // 1 / (median S * B)
    double inv_steps;      // 1 / median S
};

/// For each batch size present: the empirical optimal lr, the seed-median S
/// among its converged runs, and the (1/E, 1/S) pair used for the line fit.
inline std::vector<SePoint> extract_se_points(std::span<const RunRecord> records) {
    std::vector<std::int64_t> batches;
    for (const RunRecord& r : records)
        if (std::find(batches.begin(), batches.end(), r.batch_size) == batches.end())
            batches.push_back(r.batch_size);
    std::sort(batches.begin(), batches.end());

    std::vector<SePoint> points;
    points.reserve(batches.size());
    for (std::int64_t b : batches) {
        const auto [lr, mean_final] = empirical_optimal_lr(records, b);
        (void)mean_final;
        std::vector<std::int64_t> steps;
        for (const RunRecord& r : records)
            if (r.batch_size == b && r.converged && r.lr == lr) steps.push_back(r.steps_to_target);
        const double med = detail::median_int64(std::move(steps));
        points.push_back({b, lr, med, 1.0 / (med * static_cast<double>(b)), 1.0 / med});
    }
    return points;
}

}  // namespace surge
