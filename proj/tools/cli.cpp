#include "cli.hpp"

#include "sojourn/analytic.hpp"
#include "sojourn/experiments.hpp"
#include "sojourn/model.hpp"
#include "sojourn/simulate.hpp"
#include "sojourn/spectral.hpp"
#include "sojourn/stable.hpp"
#include "sojourn/transforms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unistd.h>
#include <variant>

namespace sojourn::cli {

namespace {

constexpr const char* tool_version = "0.1.0";
constexpr const char* output_dir_env = "SOJOURN_OUTPUT_DIR";

std::string number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

std::string cell_text(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double x) const { return number(x); }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(const std::string& s) const { return s; }
    } visitor;
    return std::visit(visitor, c);
}

nlohmann::json cell_json(const Cell& c) {
    struct {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(double x) const { return x; }
        nlohmann::json operator()(std::int64_t x) const { return x; }
        nlohmann::json operator()(const std::string& s) const { return s; }
    } visitor;
    return std::visit(visitor, c);
}

struct Table {
    std::string columns;
    std::vector<std::vector<Cell>> rows;
};

/// Flags shared by every subcommand.
struct Common {
    std::string out;
    std::string format = "csv";
    unsigned threads = 0;
    bool stamp = false;
    std::vector<std::pair<std::string, std::string>> meta;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--out", common.out, "Output file (stdout when omitted and " + std::string(output_dir_env) +
                                             " is unset)");
    cmd->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", common.threads, "Worker threads for ensembles (0 = all cores)");
    cmd->add_flag("--stamp", common.stamp, "Add a timestamp to the metadata header");
}

std::filesystem::path resolve_output(const Common& common, const std::string& fallback_name) {
    const char* dir = std::getenv(output_dir_env);
    if (common.out.empty()) {
        if (!dir || !*dir) return {};
        return std::filesystem::path(dir) / fallback_name;
    }
    std::filesystem::path p(common.out);
    if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
    return p;
}

/// Writes to a temporary sibling and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << text;
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<std::pair<std::string, std::string>> header_fields(const std::string& command, const Common& common) {
    std::vector<std::pair<std::string, std::string>> fields{{"tool", "sojourn"}, {"version", tool_version},
                                                            {"command", command}};
    fields.insert(fields.end(), common.meta.begin(), common.meta.end());
    if (common.stamp) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        fields.emplace_back("timestamp", buf);
    }
    return fields;
}

std::string render(const std::string& command, const Common& common, const Table& table) {
    const auto fields = header_fields(command, common);
    if (common.format == "json") {
        nlohmann::json doc;
        for (const auto& [k, v] : fields) doc["meta"][k] = v;
        std::vector<std::string> names;
        std::stringstream ss(table.columns);
        for (std::string name; std::getline(ss, name, ',');) names.push_back(name);
        doc["columns"] = names;
        doc["rows"] = nlohmann::json::array();
        for (const auto& row : table.rows) {
            auto& out = doc["rows"].emplace_back(nlohmann::json::array());
            for (const auto& c : row) out.push_back(cell_json(c));
        }
        return doc.dump(2) + "\n";
    }
    std::string text;
    for (const auto& [k, v] : fields) text += "# " + k + "=" + v + "\n";
    text += table.columns;
    text += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text += ',';
            text += cell_text(row[i]);
        }
        text += '\n';
    }
    return text;
}

void emit_text(const Common& common, const std::string& fallback_name, const std::string& text) {
    const auto path = resolve_output(common, fallback_name);
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
    } else {
        write_atomically(path, text);
    }
}

void emit(const std::string& command, const Common& common, const Table& table) {
    const std::string ext = common.format == "json" ? ".json" : ".csv";
    emit_text(common, command + ext, render(command, common, table));
}

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

void record(Common& c, const std::string& key, const std::string& value) { c.meta.emplace_back(key, value); }
void record(Common& c, const std::string& key, double value) { c.meta.emplace_back(key, number(value)); }

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + number(xs[i]);
    return s;
}

InversionMethod make_method(const std::string& name, int order, double digits) {
    InversionMethod m = name == "talbot" ? InversionMethod::talbot(order, digits)
                                         : InversionMethod::stehfest(order, digits);
    m.validate();
    return m;
}

struct ModelFlags {
    int p = 2;
    double alpha = 2.0;
    int max_level = NormChainGenerator::default_max_level;
};

void add_model(CLI::App* cmd, ModelFlags& m, bool with_cutoff) {
    cmd->add_option("--p", m.p, "Prime p")->capture_default_str();
    cmd->add_option("--alpha", m.alpha, "Order alpha > 0")->capture_default_str();
    if (with_cutoff) cmd->add_option("--max-level", m.max_level, "Level cutoff K")->capture_default_str();
}

void record_model(Common& c, const ModelFlags& m, bool with_cutoff) {
    record(c, "p", std::to_string(m.p));
    record(c, "alpha", m.alpha);
    if (with_cutoff) record(c, "max_level", std::to_string(m.max_level));
}

// ---------------------------------------------------------------- constants

void run_constants(const ModelFlags& m, Common& common) {
    const ModelParams params(m.p, m.alpha);
    const auto k = derive_constants(params);
    nlohmann::json doc;
    for (const auto& [key, v] : header_fields("constants", common)) doc["meta"][key] = v;
    doc["p"] = m.p;
    doc["alpha"] = m.alpha;
    doc["gamma_p_neg_alpha"] = k.gamma_p_neg_alpha;
    doc["b_alpha"] = k.b_alpha;
    doc["c_alpha"] = k.c_alpha ? nlohmann::json(*k.c_alpha) : nlohmann::json(nullptr);
    doc["kernel_scale"] = k.kernel_scale;
    doc["tail_gamma"] = k.tail_gamma ? nlohmann::json(*k.tail_gamma) : nlohmann::json(nullptr);
    doc["recurrent"] = params.recurrent();
    emit_text(common, "constants.json", doc.dump(2) + "\n");
}

// --------------------------------------------------------------------- eval

struct EvalFlags {
    std::string quantity;
    std::string t, s, theta;
    double t_fixed = 0.0;
    int n = 1;
    double gamma = 0.5;
    std::string method = "talbot";
    int order = 24;
    double digits = 8.0;
};

void run_eval(const EvalFlags& f, const ModelFlags& m, Common& common) {
    const std::string& q = f.quantity;
    const bool stable = q.rfind("stable_", 0) == 0;
    Table table{columns::eval, {}};
    record(common, "quantity", q);
    if (stable) {
        record(common, "gamma", f.gamma);
        const auto grid = parse_grid(f.t);
        for (double t : grid) {
            double v = 0.0;
            if (q == "stable_series") v = stable_density_series(t, f.gamma);
            else if (q == "stable_quadrature") v = stable_density_quadrature(t, f.gamma);
            else v = stable_cdf(t, f.gamma);
            table.rows.push_back({q, t, v});
        }
        emit("eval", common, table);
        return;
    }
    const ModelParams params(m.p, m.alpha);
    record_model(common, m, false);
    const SurvivalSeries series(params);
    auto need = [](const std::string& text, const char* flag) {
        if (text.empty()) throw CLI::ValidationError(flag, "required for this quantity");
        return parse_grid(text);
    };
    if (q == "j" || q == "v" || q == "mean_sojourn" || q == "g_n_cdf") {
        for (double t : need(f.t, "--t")) {
            double v = 0.0;
            if (q == "j") v = series.survival(t);
            else if (q == "v") v = series.inflow(t);
            else if (q == "mean_sojourn") v = series.mean_sojourn(t);
            else v = g_n_cdf(t, f.n, params);
            table.rows.push_back({q, t, v});
        }
        if (q == "g_n_cdf") record(common, "n", std::to_string(f.n));
    } else if (q == "j_hat" || q == "f_hat" || q == "h_n_hat") {
        for (double s : need(f.s, "--s")) {
            double v = 0.0;
            if (q == "j_hat") v = j_hat(s, params);
            else if (q == "f_hat") v = f_hat(s, params);
            else v = h_n_hat(s, f.n, params);
            table.rows.push_back({q, s, v});
        }
        if (q == "h_n_hat") record(common, "n", std::to_string(f.n));
    } else if (q == "poisson_weight") {
        record(common, "n", std::to_string(f.n));
        for (double th : need(f.theta, "--theta")) table.rows.push_back({q, th, poisson_weight(f.n, th, params)});
    } else {
        const auto method = make_method(f.method, f.order, f.digits);
        record(common, "t", f.t_fixed);
        record(common, "method", std::string(method.name()));
        record(common, "order", std::to_string(method.order));
        for (double th : need(f.theta, "--theta")) {
            const double v = q == "sojourn_cdf" ? sojourn_cdf(th, f.t_fixed, params, method)
                                                : sojourn_cdf_outside(th, f.t_fixed, params, method);
            table.rows.push_back({q, th, v});
        }
    }
    emit("eval", common, table);
}

// ------------------------------------------------------------------- invert

struct InvertFlags {
    std::string target = "f";
    std::string t;
    int n = 1;
    std::string method = "talbot";
    int order = 24;
    double digits = 8.0;
};

void run_invert(const InvertFlags& f, const ModelFlags& m, Common& common) {
    const ModelParams params(m.p, m.alpha);
    const auto method = make_method(f.method, f.order, f.digits);
    record_model(common, m, false);
    record(common, "target", f.target);
    if (f.target.rfind("h_n", 0) == 0) record(common, "n", std::to_string(f.n));
    const SurvivalSeries series(params);
    const std::uint64_t clipped_before = clipped_density_count();
    Table table{columns::invert, {}};
    for (double t : parse_grid(f.t)) {
        InversionReport r;
        if (f.target == "j") {
            r = invert(ComplexTransform([&](std::complex<double> s) { return series.transform(s); }), t, method);
        } else if (f.target == "f") {
            r = first_return_density(t, series, method);
        } else if (f.target == "f_cdf") {
            r = first_return_cdf(t, series, method);
        } else {
            const auto law = h_n_time(t, f.n, series, method);
            r = {t, f.target == "h_n" ? law.density : law.cdf, law.est_error, method, false};
        }
        table.rows.push_back({t, r.value, r.est_error, std::string(method.name()), std::int64_t{method.order}});
    }
    if (const auto clipped = clipped_density_count() - clipped_before) {
        warn(std::to_string(clipped) + " negative density value(s) within 2*est_error clipped to 0");
    }
    emit("invert", common, table);
}

// ----------------------------------------------------------------- simulate

struct SimulateFlags {
    double horizon = 1.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 1;
};

void run_simulate(const SimulateFlags& f, const ModelFlags& m, Common& common) {
    const ModelParams params(m.p, m.alpha);
    record_model(common, m, true);
    record(common, "horizon", f.horizon);
    record(common, "n_paths", std::to_string(f.n_paths));
    record(common, "seed", std::to_string(f.seed));
    if (!(f.horizon >= 0.0)) throw CLI::ValidationError("--horizon", "must be nonnegative");
    const NormChainGenerator gen(params, m.max_level);
    std::vector<TrajectoryFunctionals> results(f.n_paths);
    parallel_for(f.n_paths, common.threads, [&](std::size_t i) {
        results[i] = functionals(sample_path(gen, f.horizon, f.seed, i), f.horizon);
    });
    Table table{columns::simulate, {}};
    for (const auto& r : results) {
        table.rows.push_back({static_cast<std::int64_t>(f.seed), f.horizon, r.sojourn, r.complement_sojourn,
                              r.first_return ? Cell{*r.first_return} : Cell{},
                              std::int64_t{r.returned ? 1 : 0}, r.visits_to_zero, std::int64_t{r.max_level}});
        if (r.max_level >= m.max_level) {
            warn("a path reached the level cutoff; raise --max-level to remove clipping bias");
            break;
        }
    }
    emit("simulate", common, table);
}

// --------------------------------------------------------------- experiment

struct ExperimentFlags {
    std::string name;
    std::string t_grid = "100:100000:10";
    std::string betas = "1";
    double t = 1.0;
    double horizon = 1e5;
    double t_lo = 100.0;
    double t_hi = 1e5;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    std::string points_out;
};

const std::vector<std::string> experiment_names = {"moment",     "scaling",  "survival",  "ode",
                                                   "transience", "tail",     "sojourn-cdf", "limit-law",
                                                   "volterra"};

Cell estimate_cell(double x) { return std::isfinite(x) ? Cell{x} : Cell{}; }

void run_experiment(const ExperimentFlags& f, const ModelFlags& m, Common& common) {
    const ModelParams params(m.p, m.alpha);
    const EnsembleOptions ens{common.threads, m.max_level};
    record(common, "experiment", f.name);
    record_model(common, m, true);
    record(common, "seed", std::to_string(f.seed));
    record(common, "n_paths", std::to_string(f.n_paths));
    Table est{columns::estimates, {}};
    auto est_row = [&](const std::string& name, double t, Cell arg, double value, double err, std::int64_t n) {
        est.rows.push_back({name, std::int64_t{m.p}, m.alpha, t, std::move(arg), value, estimate_cell(err), n});
    };
    const auto& name = f.name;

    if (name == "moment") {
        const auto grid = parse_grid(f.t_grid);
        record(common, "t_grid", join(grid));
        record(common, "beta", f.betas);
        const auto betas = parse_grid(f.betas);
        const auto samples = sojourn_samples(params, grid, f.n_paths, f.seed, ens);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            for (double beta : betas) {
                std::vector<double> powered(samples[j]);
                for (double& x : powered) x = std::pow(x, beta);
                const auto e = Estimate::from_samples(powered);
                est_row("moment", grid[j], beta, e.value, e.std_error, e.n);
            }
        }
        emit("experiment", common, est);
        return;
    }
    if (name == "scaling") {
        const auto grid = parse_grid(f.t_grid);
        const auto betas = parse_grid(f.betas);
        record(common, "t_grid", join(grid));
        record(common, "beta", join(betas));
        const auto report = moment_scaling_report(params, betas, grid, f.n_paths, f.seed, ens);
        Table fits{columns::fits, {}};
        for (const auto& r : report) {
            if (r.poor_fit) warn("beta=" + number(r.beta) + ": r_squared " + number(r.fit.r_squared) + " < 0.98");
            fits.rows.push_back({std::string("scaling"), std::int64_t{m.p}, m.alpha, r.beta, r.fit.x_lo, r.fit.x_hi,
                                 r.fit.slope, r.fit.slope_stderr, r.predicted_slope, r.fit.r_squared});
            for (std::size_t j = 0; j < r.times.size(); ++j) {
                est_row("moment", r.times[j], r.beta, r.moments[j].value, r.moments[j].std_error, r.moments[j].n);
            }
        }
        if (!f.points_out.empty()) {
            Common side = common;
            side.out = f.points_out;
            emit("experiment", side, est);
        }
        emit("experiment", common, fits);
        return;
    }
    if (name == "survival") {
        const auto grid = parse_grid(f.t_grid);
        record(common, "t_grid", join(grid));
        const auto mc = empirical_survival(params, grid, f.n_paths, f.seed, ens);
        const auto ode = ode_survival_oracle(NormChainGenerator(params, m.max_level), grid, f.tol);
        const SurvivalSeries series(params);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            est_row("survival_mc", grid[j], {}, mc[j].value, mc[j].std_error, mc[j].n);
            est_row("survival_ode", grid[j], std::int64_t{m.max_level}, ode[j].p0, 0.0, 0);
            est_row("survival_series", grid[j], {}, series.survival(grid[j]), 0.0, 0);
        }
        emit("experiment", common, est);
        return;
    }
    if (name == "ode") {
        const auto grid = parse_grid(f.t_grid);
        record(common, "t_grid", join(grid));
        record(common, "tol", f.tol);
        for (const auto& pt : ode_survival_oracle(NormChainGenerator(params, m.max_level), grid, f.tol)) {
            est_row("ode", pt.t, std::int64_t{m.max_level}, pt.p0, 0.0, 0);
        }
        emit("experiment", common, est);
        return;
    }
    if (name == "transience") {
        record(common, "horizon", f.horizon);
        const auto e = never_returned_fraction(params, f.horizon, f.n_paths, f.seed, ens);
        est_row("never_returned", f.horizon, {}, e.value, e.std_error, e.n);
        emit("experiment", common, est);
        return;
    }
    if (name == "tail") {
        record(common, "horizon", f.horizon);
        record(common, "t_lo", f.t_lo);
        record(common, "t_hi", f.t_hi);
        const auto r = first_return_tail(params, f.horizon, f.n_paths, f.seed, f.t_lo, f.t_hi, 10, ens);
        Table fits{columns::fits, {}};
        fits.rows.push_back({std::string("tail"), std::int64_t{m.p}, m.alpha, Cell{}, r.fit.x_lo, r.fit.x_hi,
                             r.fit.slope, r.fit.slope_stderr, r.predicted_slope, r.fit.r_squared});
        for (std::size_t j = 0; j < r.times.size(); ++j) {
            est_row("first_return_survival", r.times[j], {}, r.survival[j], NAN, static_cast<std::int64_t>(r.n));
        }
        if (!f.points_out.empty()) {
            Common side = common;
            side.out = f.points_out;
            emit("experiment", side, est);
        }
        emit("experiment", common, fits);
        return;
    }
    if (name == "sojourn-cdf") {
        record(common, "t", f.t);
        const double times[] = {f.t};
        auto theta = std::move(sojourn_samples(params, times, f.n_paths, f.seed, ens).front());
        std::sort(theta.begin(), theta.end());
        const SurvivalSeries series(params);
        const auto ks = sojourn_cdf_ks(params, f.t, f.n_paths, f.seed, ens);
        // empirical and theoretical distribution functions on 51 points of [0, t]
        for (int k = 0; k <= 50; ++k) {
            const double th = f.t * k / 50.0;
            const double emp = static_cast<double>(std::upper_bound(theta.begin(), theta.end(), th) - theta.begin()) /
                               static_cast<double>(theta.size());
            est_row("sojourn_cdf_empirical", f.t, th, emp, NAN, static_cast<std::int64_t>(theta.size()));
            const auto rep = sojourn_cdf_report(th, f.t, series);
            est_row("sojourn_cdf_series", f.t, th, std::clamp(rep.value, 0.0, 1.0), rep.est_error, 0);
        }
        est_row("sojourn_ks", f.t, {}, ks.ks_distance, NAN, static_cast<std::int64_t>(ks.n));
        est_row("sojourn_ks_critical", f.t, {}, ks.critical, NAN, static_cast<std::int64_t>(ks.n));
        emit("experiment", common, est);
        return;
    }
    if (name == "limit-law") {
        record(common, "t", f.t);
        const auto r = limit_law_check(params, f.t, f.n_paths, f.seed, ens);
        est_row("limit_law_b_fit", f.t, r.gamma, r.b_fit, NAN, static_cast<std::int64_t>(r.n));
        est_row("limit_law_ks", f.t, r.gamma, r.ks_distance, NAN, static_cast<std::int64_t>(r.n));
        emit("experiment", common, est);
        return;
    }
    if (name == "volterra") {
        const auto grid = parse_grid(f.t_grid);
        record(common, "t_grid", join(grid));
        const auto r = volterra_residual(params, grid);
        for (const auto& pt : r.points) est_row("volterra_residual", pt.t, {}, pt.residual, NAN, 0);
        emit("experiment", common, est);
        return;
    }
    throw CLI::ValidationError("experiment", "unknown experiment " + name);
}

// ----------------------------------------------------------------- spectral

struct SpectralFlags {
    double h = 0.27;
    double d = 1.0;
    std::string t_grid;
    std::string ta_grid;
    double t = 10.0;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    double b_obs = 0.0;
    double c_obs = 0.0;
};

void run_spectral(const SpectralFlags& f, const ModelFlags& m, Common& common) {
    if (f.b_obs > 0.0 || f.c_obs > 0.0) {
        const auto r = exponent_report(f.b_obs, f.c_obs);
        nlohmann::json doc;
        record(common, "b_obs", f.b_obs);
        record(common, "c_obs", f.c_obs);
        record(common, "h", f.h);
        for (const auto& [k, v] : header_fields("spectral", common)) doc["meta"][k] = v;
        doc["alpha_inferred"] = r.alpha_inferred;
        doc["b_pred"] = b_pred(r.alpha_inferred, f.h);
        doc["c_pred"] = c_pred(r.alpha_inferred, f.h);
        emit_text(common, "spectral.json", doc.dump(2) + "\n");
        return;
    }
    const ModelParams params(m.p, m.alpha);
    const SpectralParams sp(f.h, f.d, params);
    if (auto w = sp.regime_warning(); !w.empty()) warn(w);
    const EnsembleOptions ens{common.threads, m.max_level};
    record_model(common, m, true);
    record(common, "h", f.h);
    record(common, "d", f.d);
    record(common, "seed", std::to_string(f.seed));
    record(common, "n_paths", std::to_string(f.n_paths));
    WidthTable widths;
    if (!f.ta_grid.empty()) {
        const auto ages = parse_grid(f.ta_grid);
        record(common, "t", f.t);
        record(common, "ta_grid", join(ages));
        widths = ageing_width(sp, f.t, ages, f.n_paths, f.seed, ens);
    } else {
        const auto grid = parse_grid(f.t_grid.empty() ? "100:100000:10" : f.t_grid);
        record(common, "t_grid", join(grid));
        widths = hole_width(sp, grid, f.n_paths, f.seed, ens);
    }
    Table table{columns::widths, {}};
    for (const auto& r : widths) table.rows.push_back({r.t, r.t_a, r.sigma, r.std_error, r.n});
    emit("spectral", common, table);
}

const char* column_help =
    "CSV columns (frozen):\n"
    "  eval        quantity,x,value\n"
    "  invert      t,value,est_error,method,order\n"
    "  simulate    seed,horizon,sojourn,complement_sojourn,first_return,returned,visits_to_zero,max_level\n"
    "  experiment  experiment,p,alpha,t,arg,value,stderr,n\n"
    "              fits: experiment,p,alpha,beta,t_lo,t_hi,slope,slope_stderr,predicted_slope,r_squared\n"
    "  spectral    t,t_a,sigma,stderr,n\n"
    "Every CSV starts with '# key=value' metadata lines.\n"
    "Exit codes: 0 ok, 2 bad flags, 3 numerical failure.";

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    auto parse_double = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw CLI::ValidationError("grid", "cannot parse '" + s + "'");
        return v;
    };
    std::vector<std::string> parts;
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3) throw CLI::ValidationError("grid", "expected lo:hi:n");
        const double lo = parse_double(parts[0]);
        const double hi = parse_double(parts[1]);
        const double n = parse_double(parts[2]);
        if (!(lo > 0.0) || !(hi > lo) || n < 2 || n != std::floor(n)) {
            throw CLI::ValidationError("grid", "lo:hi:n needs 0 < lo < hi and integer n >= 2");
        }
        return log_grid(lo, hi, static_cast<std::size_t>(n));
    }
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_double(part));
    if (out.empty()) throw CLI::ValidationError("grid", "empty grid");
    return out;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Sojourn times of the p-adic random walk: analytics, inversion and simulation", "sojourn"};
    app.footer(column_help);
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    Common common;
    ModelFlags model;

    auto* constants = app.add_subcommand("constants", "Derived constants as JSON");
    add_model(constants, model, false);
    add_common(constants, common);

    EvalFlags eval;
    auto* ev = app.add_subcommand("eval", "Closed-form and series evaluators");
    ev->add_option("quantity", eval.quantity, "What to evaluate")
        ->required()
        ->check(CLI::IsMember({"j", "j_hat", "f_hat", "h_n_hat", "v", "mean_sojourn", "g_n_cdf", "poisson_weight",
                               "sojourn_cdf", "sojourn_cdf_outside", "stable_series", "stable_quadrature",
                               "stable_cdf"}));
    add_model(ev, model, false);
    ev->add_option("--t", eval.t, "Time grid (j, v, mean_sojourn, g_n_cdf, stable_*)");
    ev->add_option("--s", eval.s, "Laplace-variable grid (j_hat, f_hat, h_n_hat)");
    ev->add_option("--theta", eval.theta, "Occupation-time grid (poisson_weight, sojourn_cdf*)");
    ev->add_option("--horizon", eval.t_fixed, "Total time t for sojourn_cdf*");
    ev->add_option("--n", eval.n, "Index n")->check(CLI::NonNegativeNumber);
    ev->add_option("--gamma", eval.gamma, "Stable index in (0, 1)");
    ev->add_option("--method", eval.method)->check(CLI::IsMember({"talbot", "stehfest"}));
    ev->add_option("--order", eval.order);
    ev->add_option("--digits", eval.digits);
    add_common(ev, common);

    InvertFlags inv;
    auto* in = app.add_subcommand("invert", "Numerical Laplace inversion");
    add_model(in, model, false);
    in->add_option("--target", inv.target, "j, f, f_cdf, h_n or h_n_cdf")
        ->check(CLI::IsMember({"j", "f", "f_cdf", "h_n", "h_n_cdf"}));
    in->add_option("--t", inv.t, "Time grid")->required();
    in->add_option("--n", inv.n, "n for h_n targets")->check(CLI::PositiveNumber);
    in->add_option("--method", inv.method)->check(CLI::IsMember({"talbot", "stehfest"}));
    in->add_option("--order", inv.order)->capture_default_str();
    in->add_option("--digits", inv.digits, "Target significant digits")->capture_default_str();
    add_common(in, common);

    SimulateFlags sim;
    auto* sm = app.add_subcommand("simulate", "Per-path functionals of simulated trajectories");
    add_model(sm, model, true);
    sm->add_option("--horizon", sim.horizon)->capture_default_str();
    sm->add_option("--n-paths", sim.n_paths)->check(CLI::PositiveNumber);
    sm->add_option("--seed", sim.seed, "Ensemble seed; row i is path i of this ensemble");
    add_common(sm, common);

    ExperimentFlags exp;
    auto* ex = app.add_subcommand("experiment", "Validation experiments");
    ex->add_option("name", exp.name)->required()->check(CLI::IsMember(experiment_names));
    add_model(ex, model, true);
    ex->add_option("--t-grid", exp.t_grid, "Time grid")->capture_default_str();
    ex->add_option("--t", exp.t, "Single time")->capture_default_str();
    ex->add_option("--beta", exp.betas, "Moment orders")->capture_default_str();
    ex->add_option("--horizon", exp.horizon)->capture_default_str();
    ex->add_option("--t-lo", exp.t_lo)->capture_default_str();
    ex->add_option("--t-hi", exp.t_hi)->capture_default_str();
    ex->add_option("--n-paths", exp.n_paths)->capture_default_str();
    ex->add_option("--seed", exp.seed)->capture_default_str();
    ex->add_option("--tol", exp.tol, "ODE tolerance")->capture_default_str();
    ex->add_option("--points-out", exp.points_out, "Also write the fitted points (scaling, tail)");
    add_common(ex, common);

    SpectralFlags spf;
    auto* sp = app.add_subcommand("spectral", "Spectral hole widths from the occupation-time clock");
    sp->set_help_flag("--help", "Print this help message and exit");
    add_model(sp, model, true);
    sp->add_option("--h", spf.h)->capture_default_str();
    sp->add_option("--d", spf.d)->capture_default_str();
    sp->add_option("--t-grid", spf.t_grid, "Times for sigma(t)");
    sp->add_option("--ta-grid", spf.ta_grid, "Ages for sigma(t, t_a)");
    sp->add_option("--t", spf.t, "Fixed t for ageing")->capture_default_str();
    sp->add_option("--n-paths", spf.n_paths)->capture_default_str();
    sp->add_option("--seed", spf.seed)->capture_default_str();
    sp->add_option("--b-obs", spf.b_obs, "Observed width exponent (exponent report)");
    sp->add_option("--c-obs", spf.c_obs, "Observed ageing exponent (exponent report)");
    add_common(sp, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*constants) run_constants(model, common);
        else if (*ev) run_eval(eval, model, common);
        else if (*in) run_invert(inv, model, common);
        else if (*sm) run_simulate(sim, model, common);
        else if (*ex) run_experiment(exp, model, common);
        else if (*sp) run_spectral(spf, model, common);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return ok;
}

}  // namespace sojourn::cli
