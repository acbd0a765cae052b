// surge: scaling laws between batch size and optimal learning rate for
// sign-based optimizers.
//
// Subcommands:
//   predict  evaluate analytic law curves for a model file
//   grid     run a (batch size x learning rate x seed) grid search
//   fit      estimate B_noise / S_min / eps_max from grid results
//   plot     render runs and/or curves as a static SVG
//   verify   run the Monte-Carlo-vs-law agreement suite
//
// Exit codes: 0 success, 1 usage/parse error, 2 law violation or fit failure,
// 3 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surge/surge.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitLaw = 2;
constexpr int kExitInternal = 3;

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    return std::strtoull(v, nullptr, 10);
}

struct VariantSpec {
    surge::LawVariant variant;
    double alpha;
};

VariantSpec parse_variant_token(const std::string& token) {
    if (token == "exact") return {surge::LawVariant::exact, 1.0};
    if (token == "surge") return {surge::LawVariant::surge, 1.0};
    if (token == "linear") return {surge::LawVariant::linear, 1.0};
    if (token == "sqrt") return {surge::LawVariant::square_root, 1.0};
    if (token == "large_batch") return {surge::LawVariant::large_batch, 1.0};
    if (token == "loss_improvement") return {surge::LawVariant::loss_improvement, 1.0};
    if (token.starts_with("sgd_alpha_"))
        return {surge::LawVariant::sgd_alpha, surge::parse_double(token.substr(10))};
    throw std::runtime_error("unknown variant '" + token +
                             "' (expected exact, surge, sgd_alpha_<a>, linear, sqrt, "
                             "large_batch, loss_improvement)");
}

std::vector<std::string> split_tokens(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_predict(const std::string& model_path, double bmin, double bmax, std::size_t points,
                const std::string& variants_csv, const std::string& out_path, bool use_approx) {
    const auto tokens = split_tokens(variants_csv);
    if (tokens.empty()) throw std::runtime_error("predict: variant list is empty");

    const surge::LawInputs inputs = surge::parse_law_model(surge::load_json_file(model_path));
    surge::validate_law_inputs(inputs);

    const double bn = surge::b_noise(inputs);
    const double em = surge::eps_max(inputs);
    const double plateau = surge::large_batch_lr(inputs);
    const auto bounds = surge::batch_size_bound(inputs.stats);
    const double bound_median = surge::quantile(bounds, 0.5);

    std::cout << "b_noise          " << surge::fmt_double(bn) << "\n"
              << "eps_max          " << surge::fmt_double(em) << "\n"
              << "large_batch_lr   " << surge::fmt_double(plateau) << "\n"
              << "bound_median     " << surge::fmt_double(bound_median) << "\n";
    if (bmax > bound_median)
        std::cout << "note: grid extends beyond the median regime bound; the surge form "
                     "is only valid below it\n";

    const auto grid = surge::log_spaced(bmin, bmax, points);
    std::vector<surge::LawCurve> curves;
    for (const auto& t : tokens) {
        const VariantSpec v = parse_variant_token(t);
        if (v.variant == surge::LawVariant::exact && use_approx) {
            surge::LawCurve c;
            c.variant = surge::LawVariant::exact;
            for (double b : grid)
                c.points.emplace_back(b, surge::optimal_lr_sign_exact(inputs, b, true));
            curves.push_back(std::move(c));
        } else {
            curves.push_back(surge::curve(inputs, v.variant, grid, v.alpha));
        }
    }

    std::ostringstream csv;
    surge::write_curves_csv(csv, curves);
    surge::write_text_file(out_path, csv.str());
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_grid(const std::string& workload_path, const std::string& grid_path,
             const std::string& out_path, std::uint64_t default_seed,
             std::optional<std::uint64_t> seed_override, int jobs) {
    const surge::Workload w = surge::load_workload(workload_path);
    surge::GridConfig grid = surge::load_grid(grid_path, default_seed);
    if (seed_override) grid.master_seed = *seed_override;

    const auto records = surge::grid_search(w, grid, jobs);
    std::size_t converged = 0;
    for (const auto& r : records) converged += r.converged;

    std::ostringstream csv;
    surge::write_runs_csv(csv, records);
    surge::write_text_file(out_path, csv.str());
    std::cout << "cells " << records.size() << ", converged " << converged << ", seed "
              << grid.master_seed << "\n"
              << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_fit(const std::string& runs_path, const std::string& out_path,
            std::optional<double> target_loss) {
    std::ifstream in(runs_path);
    if (!in) throw std::runtime_error("cannot open file: " + runs_path);
    const auto records = surge::read_runs_csv(in);
    if (records.empty()) throw surge::fit_failure_error("fit: runs CSV has no records");

    const auto points = surge::extract_se_points(records);
    std::cout << "batch_size  optimal_lr  median_S\n";
    for (const auto& p : points)
        std::cout << p.batch_size << "  " << surge::fmt_double(p.optimal_lr) << "  "
                  << surge::fmt_double(p.median_steps) << "\n";

    const surge::ScalingFit fit = surge::fit_scaling(records);
    surge::json j = surge::fit_to_json(fit);
    if (target_loss) j["target_loss"] = *target_loss;
    surge::write_text_file(out_path, j.dump(2) + "\n");

    std::cout << "b_noise      " << surge::fmt_double(fit.b_noise) << "\n"
              << "s_min        " << surge::fmt_double(fit.s_min) << "\n"
              << "e_min        " << surge::fmt_double(fit.e_min) << "\n"
              << "eps_max_adam " << surge::fmt_double(fit.eps_max_adam) << "\n"
              << "eps_max_sgd  alpha=0.5: " << surge::fmt_double(fit.eps_max_sgd.at(0.5))
              << ", alpha=1: " << surge::fmt_double(fit.eps_max_sgd.at(1.0)) << "\n"
              << "residual_rms " << surge::fmt_double(fit.residual_rms) << "\n"
              << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& curves_path, const std::string& runs_path,
             const std::string& out_path, std::optional<double> b_noise_marker) {
    if (curves_path.empty() && runs_path.empty())
        throw std::runtime_error("plot: need --curves and/or --runs");
    std::vector<surge::LawCurve> curves;
    std::vector<surge::RunRecord> runs;
    if (!curves_path.empty()) {
        std::ifstream in(curves_path);
        if (!in) throw std::runtime_error("cannot open file: " + curves_path);
        curves = surge::read_curves_csv(in);
    }
    if (!runs_path.empty()) {
        std::ifstream in(runs_path);
        if (!in) throw std::runtime_error("cannot open file: " + runs_path);
        runs = surge::read_runs_csv(in);
    }
    surge::PlotOptions opt;
    opt.b_noise_marker = b_noise_marker;
    if (!opt.b_noise_marker) {
        // fall back to the surge curve's peak as the marker
        for (const auto& c : curves) {
            if (c.variant != surge::LawVariant::surge || c.points.empty()) continue;
            std::size_t peak = 0;
            for (std::size_t i = 1; i < c.points.size(); ++i)
                if (c.points[i].second > c.points[peak].second) peak = i;
            opt.b_noise_marker = c.points[peak].first;
        }
    }
    surge::write_text_file(out_path, surge::render_svg_plot(curves, runs, opt));
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_verify(std::uint64_t seed, int models, std::int64_t trials, const std::string& out_path) {
    surge::VerifyOptions opt;
    opt.seed = seed;
    opt.n_models = models;
    opt.trials = trials;
    const surge::VerifyReport report = surge::verify_laws(opt);
    std::cout << report.text();
    if (!out_path.empty()) surge::write_text_file(out_path, report.text());
    return report.all_pass() ? kExitOk : kExitLaw;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scaling laws between batch size and optimal learning rate for sign-based "
                 "optimizers"};
    app.require_subcommand(1);

    const std::uint64_t default_seed = env_u64("SURGE_SEED", 1);
    const int default_jobs = static_cast<int>(env_u64("SURGE_JOBS", 1));

    // predict
    std::string model_path, predict_out;
    std::string variants = "exact,surge,sgd_alpha_0.5,sgd_alpha_1,linear,sqrt,large_batch";
    double bmin = 1.0, bmax = 4096.0;
    std::size_t points = 129;
    bool use_approx = false;
    auto* predict = app.add_subcommand("predict", "evaluate analytic law curves for a model file");
    predict->add_option("--model", model_path, "model JSON file")->required();
    predict->add_option("--out", predict_out, "output curves CSV")->required();
    predict->add_option("--bmin", bmin, "smallest batch size");
    predict->add_option("--bmax", bmax, "largest batch size");
    predict->add_option("--points", points, "grid points");
    predict->add_option("--variants", variants, "comma list of curve variants");
    predict->add_flag("--approx", use_approx, "use the sigmoid-like approximation of E_i");

    // grid
    std::string workload_path, grid_path, grid_out;
    int jobs = default_jobs;
    std::optional<std::uint64_t> seed_override;
    auto* grid = app.add_subcommand("grid", "run a grid search over batch sizes and lrs");
    grid->add_option("--workload", workload_path, "workload JSON file")->required();
    grid->add_option("--grid", grid_path, "grid JSON file")->required();
    grid->add_option("--out", grid_out, "output runs CSV")->required();
    grid->add_option("--jobs", jobs, "concurrent cells");
    grid->add_option("--seed", seed_override, "override the grid master seed");

    // fit
    std::string runs_path, fit_out;
    std::optional<double> target_loss;
    auto* fit = app.add_subcommand("fit", "estimate B_noise / S_min / eps_max from runs");
    fit->add_option("--runs", runs_path, "runs CSV from the grid subcommand")->required();
    fit->add_option("--out", fit_out, "output fit JSON")->required();
    fit->add_option("--target-loss", target_loss, "target loss echoed into the fit JSON");

    // plot
    std::string plot_curves, plot_runs, plot_out;
    std::optional<double> marker;
    auto* plot = app.add_subcommand("plot", "render runs and/or curves as SVG");
    plot->add_option("--curves", plot_curves, "curves CSV");
    plot->add_option("--runs", plot_runs, "runs CSV");
    plot->add_option("--out", plot_out, "output SVG path")->required();
    plot->add_option("--b-noise", marker, "vertical marker position");

    // verify
    std::uint64_t verify_seed = default_seed;
    int verify_models = 4;
    std::int64_t verify_trials = 20000;
    std::string verify_out;
    auto* verify = app.add_subcommand("verify", "Monte Carlo vs closed-form agreement suite");
    verify->add_option("--seed", verify_seed, "master seed");
    verify->add_option("--models", verify_models, "number of random models");
    verify->add_option("--trials", verify_trials, "Monte Carlo trials per check");
    verify->add_option("--out", verify_out, "also write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (predict->parsed())
            return cmd_predict(model_path, bmin, bmax, points, variants, predict_out, use_approx);
        if (grid->parsed())
            return cmd_grid(workload_path, grid_path, grid_out, default_seed, seed_override, jobs);
        if (fit->parsed()) return cmd_fit(runs_path, fit_out, target_loss);
        if (plot->parsed()) return cmd_plot(plot_curves, plot_runs, plot_out, marker);
        if (verify->parsed())
            return cmd_verify(verify_seed, verify_models, verify_trials, verify_out);
        return kExitUsage;
    } catch (const surge::law_violation_error& e) {
        std::cerr << "law violation: " << e.what() << "\n";
        return kExitLaw;
    } catch (const surge::fit_failure_error& e) {
        std::cerr << "fit failure: " << e.what() << "\n";
        return kExitLaw;
    } catch (const surge::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
