#pragma once

// JSON configuration parsing (workload, grid, law-model files), CSV input and
// output for run records and law curves, and the ScalingFit JSON document.
// All numbers are written with shortest round-trip formatting so outputs are
// byte-stable and re-parse losslessly.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "surge/fit.hpp"
#include "surge/harness.hpp"
#include "surge/laws.hpp"
#include "surge/workload.hpp"

namespace surge {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// number formatting
// ---------------------------------------------------------------------------

/// Shortest representation that round-trips through a double.
inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("CSV: cannot parse number '" + std::string(s) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("CSV: cannot parse integer '" + std::string(s) + "'");
    return v;
}

inline std::uint64_t parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("CSV: cannot parse unsigned integer '" + std::string(s) + "'");
    return v;
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    in >> j;  // throws json::parse_error with position info
    return j;
}

/// Accepts either an explicit array or {"fill": value, "dim": n}.
inline std::vector<double> parse_vector(const json& j, const char* field) {
    const json& v = j.at(field);
    if (v.is_array()) return v.get<std::vector<double>>();
    if (v.is_object()) {
        const double fill = v.at("fill").get<double>();
        const std::size_t d = v.at("dim").get<std::size_t>();
        return std::vector<double>(d, fill);
    }
    throw std::runtime_error(std::string("field '") + field + "' must be an array or {fill, dim}");
}

inline HessianSpec parse_hessian(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform")
        return HessianSpec::Uniform(j.at("a").get<double>(), j.at("c").get<double>(),
                                    j.at("dim").get<std::size_t>());
    if (kind == "diagonal") return HessianSpec::Diagonal(j.at("values").get<std::vector<double>>());
    if (kind == "dense")
        return HessianSpec::Dense(j.at("values").get<std::vector<double>>(),
                                  j.at("dim").get<std::size_t>());
    throw std::runtime_error("hessian kind must be uniform, diagonal, or dense");
}

inline json hessian_to_json(const HessianSpec& h) {
    json j;
    switch (h.kind()) {
        case HessianSpec::Kind::uniform:
            j = {{"kind", "uniform"}, {"a", h.uniform_a()}, {"c", h.uniform_c()}, {"dim", h.dim()}};
            break;
        case HessianSpec::Kind::diagonal: {
            std::vector<double> d(h.dim());
            for (std::size_t i = 0; i < h.dim(); ++i) d[i] = h.diag(i);
            j = {{"kind", "diagonal"}, {"values", d}};
            break;
        }
        case HessianSpec::Kind::dense:
            j = {{"kind", "dense"}, {"dim", h.dim()}, {"values", h.to_dense()}};
            break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// workload files
// ---------------------------------------------------------------------------

inline Workload parse_workload(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quadratic") {
        HessianSpec h = parse_hessian(j.at("hessian"));
        return QuadraticWorkload(std::move(h), parse_vector(j, "theta_star"),
                                 parse_vector(j, "noise_sigma"),
                                 j.value("rng_seed", std::uint64_t{0}));
    }
    if (kind == "mlp") {
        const json& ds = j.at("dataset");
        BlobDataset data = BlobDataset::generate(
            ds.at("n_samples").get<std::size_t>(), ds.at("n_classes").get<std::size_t>(),
            j.at("input_dim").get<std::size_t>(), ds.at("blob_std").get<double>(),
            ds.at("seed").get<std::uint64_t>());
        return MlpWorkload(j.at("input_dim").get<std::size_t>(),
                           j.at("hidden_dim").get<std::size_t>(),
                           j.at("output_dim").get<std::size_t>(), std::move(data));
    }
    throw std::runtime_error("workload kind must be quadratic or mlp");
}

inline Workload load_workload(const std::string& path) { return parse_workload(load_json_file(path)); }

// ---------------------------------------------------------------------------
// law-model files for prediction
// ---------------------------------------------------------------------------

/// A model file is either direct law inputs {mu, sigma, hessian} or a
/// quadratic workload plus a "probe" point at which the exact gradient
/// statistics are evaluated.
inline LawInputs parse_law_model(const json& j) {
    if (j.contains("mu")) {
        GradientStats stats{parse_vector(j, "mu"), parse_vector(j, "sigma")};
        return LawInputs{std::move(stats), parse_hessian(j.at("hessian"))};
    }
    if (j.value("kind", "") == "quadratic") {
        Workload w = parse_workload(j);
        const auto& q = std::get<QuadraticWorkload>(w);
        const std::vector<double> probe = parse_vector(j, "probe");
        return LawInputs{q.exact_stats(probe), q.hessian()};
    }
    throw std::runtime_error(
        "model file must contain direct {mu, sigma, hessian} or a quadratic workload with a probe");
}

// ---------------------------------------------------------------------------
// grid files
// ---------------------------------------------------------------------------

inline OptimizerConfig parse_optimizer(const json& j) {
    OptimizerConfig cfg;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sgd") cfg.kind = OptKind::sgd;
    else if (kind == "sign") cfg.kind = OptKind::sign;
    else if (kind == "adam") cfg.kind = OptKind::adam;
    else throw std::runtime_error("optimizer kind must be sgd, sign, or adam");
    cfg.beta1 = j.value("beta1", 0.9);
    cfg.beta2 = j.value("beta2", 0.999);
    cfg.eps_adam = j.value("eps_adam", 1e-8);
    cfg.lr = j.value("lr", 0.1);  // placeholder; the grid overrides per cell
    return cfg;
}

/// "lrs" / "batch_sizes" accept an explicit array, a Table-1 style
/// {start, stop, step} arithmetic progression, or {start, stop, count,
/// spacing: "log" | "linear"}.
inline std::vector<double> parse_progression(const json& v, const char* field) {
    if (v.is_array()) return v.get<std::vector<double>>();
    if (!v.is_object()) throw std::runtime_error(std::string(field) + ": expected array or object");
    const double start = v.at("start").get<double>();
    const double stop = v.at("stop").get<double>();
    std::vector<double> out;
    if (v.contains("step")) {
        const double step = v.at("step").get<double>();
        if (!(step > 0.0)) throw std::runtime_error(std::string(field) + ": step must be positive");
        for (double x = start; x <= stop * (1.0 + 1e-12); x += step) out.push_back(x);
        return out;
    }
    const std::size_t count = v.at("count").get<std::size_t>();
    const std::string spacing = v.value("spacing", "log");
    if (count < 2) throw std::runtime_error(std::string(field) + ": count must be >= 2");
    if (spacing == "log") return log_spaced(start, stop, count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(start + (stop - start) * static_cast<double>(i) /
                                  static_cast<double>(count - 1));
    return out;
}

inline GridConfig parse_grid(const json& j, std::uint64_t default_seed) {
    GridConfig g;
    g.optimizer = parse_optimizer(j.at("optimizer"));
    for (double b : parse_progression(j.at("batch_sizes"), "batch_sizes"))
        g.batch_sizes.push_back(static_cast<std::int64_t>(b));
    g.lrs = parse_progression(j.at("lrs"), "lrs");
    g.rounds = j.at("rounds").get<int>();
    g.target_loss = j.at("target_loss").get<double>();
    g.extra_steps = j.value("extra_steps", 50);
    g.max_steps = j.at("max_steps").get<int>();
    g.master_seed = j.value("seed", default_seed);
    const std::string keying = j.value("stream_keying", "per_cell");
    if (keying == "per_cell") g.keying = StreamKeying::per_cell;
    else if (keying == "shared_rounds") g.keying = StreamKeying::shared_rounds;
    else throw std::runtime_error("stream_keying must be per_cell or shared_rounds");
    g.init_loss_multiple = j.value("init_loss_multiple", 10.0);
    if (j.contains("theta0")) g.theta0 = parse_vector(j, "theta0");
    validate(g);
    return g;
}

inline GridConfig load_grid(const std::string& path, std::uint64_t default_seed) {
    return parse_grid(load_json_file(path), default_seed);
}

// ---------------------------------------------------------------------------
// run-record CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kRunsCsvHeader = "batch_size,lr,seed,converged,S,E,final_loss";

inline void write_runs_csv(std::ostream& out, std::span<const RunRecord> records) {
    out << kRunsCsvHeader << "\n";
    for (const RunRecord& r : records) {
        out << r.batch_size << ',' << fmt_double(r.lr) << ',' << r.seed << ','
            << (r.converged ? 1 : 0) << ',' << r.steps_to_target << ',' << r.examples << ','
            << (r.converged ? fmt_double(r.final_loss) : "inf") << "\n";
    }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::vector<RunRecord> read_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("runs CSV: empty input");
    if (line.ends_with('\r')) line.pop_back();
    if (line != kRunsCsvHeader)
        throw std::runtime_error("runs CSV: unexpected header '" + line + "'");
    std::vector<RunRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            throw std::runtime_error("runs CSV: line " + std::to_string(lineno) +
                                     " has " + std::to_string(f.size()) + " fields, expected 7");
        RunRecord r;
        r.batch_size = parse_int(f[0]);
        r.lr = parse_double(f[1]);
        r.seed = parse_uint(f[2]);
        r.converged = parse_int(f[3]) != 0;
        r.steps_to_target = parse_int(f[4]);
        r.examples = parse_int(f[5]);
        r.final_loss = (f[6] == "inf") ? std::numeric_limits<double>::infinity() : parse_double(f[6]);
        records.push_back(r);
    }
    return records;
}

// ---------------------------------------------------------------------------
// law-curve CSV
// ---------------------------------------------------------------------------

inline std::string curve_label(const LawCurve& c) {
    if (c.variant == LawVariant::sgd_alpha) return std::string("sgd_alpha_") + fmt_double(c.alpha);
    return to_string(c.variant);
}

inline constexpr const char* kCurvesCsvHeader = "variant,B,value";

inline void write_curves_csv(std::ostream& out, std::span<const LawCurve> curves) {
    out << kCurvesCsvHeader << "\n";
    for (const LawCurve& c : curves) {
        const std::string label = curve_label(c);
        for (const auto& [b, v] : c.points)
            out << label << ',' << fmt_double(b) << ',' << fmt_double(v) << "\n";
    }
}

inline LawCurve make_curve_for_label(const std::string& label) {
    LawCurve c;
    if (label.starts_with("sgd_alpha_")) {
        c.variant = LawVariant::sgd_alpha;
        c.alpha = parse_double(std::string_view(label).substr(10));
        return c;
    }
    for (LawVariant v : {LawVariant::exact, LawVariant::surge, LawVariant::linear,
                         LawVariant::square_root, LawVariant::large_batch,
                         LawVariant::loss_improvement}) {
        if (label == to_string(v)) {
            c.variant = v;
            return c;
        }
    }
    throw std::runtime_error("curves CSV: unknown variant '" + label + "'");
}

inline std::vector<LawCurve> read_curves_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("curves CSV: empty input");
    if (line.ends_with('\r')) line.pop_back();
    if (line != kCurvesCsvHeader)
        throw std::runtime_error("curves CSV: unexpected header '" + line + "'");
    std::vector<LawCurve> curves;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3)
            throw std::runtime_error("curves CSV: line " + std::to_string(lineno) + " malformed");
        auto [it, inserted] = index.try_emplace(f[0], curves.size());
        if (inserted) curves.push_back(make_curve_for_label(f[0]));
        curves[it->second].points.emplace_back(parse_double(f[1]), parse_double(f[2]));
    }
    return curves;
}

// ---------------------------------------------------------------------------
// fit JSON
// ---------------------------------------------------------------------------

inline json fit_to_json(const ScalingFit& f) {
    return json{{"b_noise", f.b_noise},
                {"s_min", f.s_min},
                {"e_min", f.e_min},
                {"eps_max_adam", f.eps_max_adam},
                {"eps_max_sgd_05", f.eps_max_sgd.at(0.5)},
                {"eps_max_sgd_10", f.eps_max_sgd.at(1.0)},
                {"residual_rms", f.residual_rms}};
}

inline ScalingFit fit_from_json(const json& j) {
    ScalingFit f;
    f.b_noise = j.at("b_noise").get<double>();
    f.s_min = j.at("s_min").get<double>();
    f.e_min = j.at("e_min").get<double>();
    f.eps_max_adam = j.at("eps_max_adam").get<double>();
    f.eps_max_sgd[0.5] = j.at("eps_max_sgd_05").get<double>();
    f.eps_max_sgd[1.0] = j.at("eps_max_sgd_10").get<double>();
    f.residual_rms = j.at("residual_rms").get<double>();
    return f;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("error writing file: " + path);
}

}  // namespace surge
