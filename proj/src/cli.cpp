#include "tempexit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tempexit/analytic.hpp"
#include "tempexit/errors.hpp"
#include "tempexit/estimator.hpp"
#include "tempexit/subordinator.hpp"

namespace tempexit::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("invalid number for --" + key + ": '" + value + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    // Accept forms such as 2e4 for trajectory counts.
    const double d = parse_double(key, v);
    if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19)
        throw ConfigError("expected a non-negative integer for --" + key + ": '" + value + "'");
    return static_cast<std::uint64_t>(d);
}

std::vector<double> parse_list(const std::string& key, const std::string& value)
{
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("--" + key + " needs at least one value");
    return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec)
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("grid must have the form lo:hi:count, got '" + spec + "'");
    const double lo = parse_double("x0-grid", parts[0]);
    const double hi = parse_double("x0-grid", parts[1]);
    const std::uint64_t count = parse_uint("x0-grid", parts[2]);
    if (count < 1) throw ConfigError("grid count must be >= 1");
    if (count == 1) return {lo};
    std::vector<double> out(count);
    for (std::uint64_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.back() = hi;
    return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "driver") {
        const std::string v = trim(value);
        if (v != "gaussian" && v != "stable") throw ConfigError("--driver must be gaussian or stable");
        cfg.driver = v;
    } else if (key == "alpha") {
        cfg.alpha = parse_double(key, value);
    } else if (key == "mu") {
        cfg.mu = parse_double(key, value);
    } else if (key == "beta") {
        cfg.beta = parse_double(key, value);
    } else if (key == "eps") {
        cfg.eps = parse_double(key, value);
    } else if (key == "a") {
        cfg.a = parse_double(key, value);
    } else if (key == "dim") {
        const auto d = parse_uint(key, value);
        if (d < 1 || d > 64) throw ConfigError("--dim must lie in [1, 64]");
        cfg.dim = static_cast<int>(d);
    } else if (key == "radius") {
        cfg.radius = parse_double(key, value);
    } else if (key == "x0") {
        cfg.x0 = parse_list(key, value);
    } else if (key == "x0-grid") {
        cfg.x0 = parse_grid(trim(value));
    } else if (key == "ds") {
        cfg.ds = parse_double(key, value);
    } else if (key == "trajectories") {
        cfg.trajectories = parse_uint(key, value);
    } else if (key == "max-steps") {
        cfg.max_steps = parse_uint(key, value);
    } else if (key == "seed") {
        const std::string v = trim(value);
        std::uint64_t s = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
        if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
            throw ConfigError("invalid --seed '" + value + "'");
        cfg.seed = s;
    } else if (key == "out") {
        cfg.out = trim(value);
    } else if (key == "format") {
        const std::string v = trim(value);
        if (v == "csv")
            cfg.format = OutputFormat::csv;
        else if (v == "json")
            cfg.format = OutputFormat::json;
        else
            throw ConfigError("--format must be csv or json");
    } else if (key == "rel-tol") {
        cfg.rel_tol = parse_double(key, value);
    } else if (key == "workers") {
        cfg.workers = static_cast<unsigned>(parse_uint(key, value));
    } else if (key == "exit-check") {
        const std::string v = trim(value);
        if (v == "grid")
            cfg.exit_check = ExitCheck::grid;
        else if (v == "bridge")
            cfg.exit_check = ExitCheck::bridge;
        else
            throw ConfigError("--exit-check must be grid or bridge");
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

std::map<std::string, std::string> read_settings_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string cell_text(const Cell& c)
{
    struct Visitor {
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::ordered_json cell_json(const Cell& c)
{
    struct Visitor {
        nlohmann::ordered_json operator()(double v) const
        {
            if (std::isfinite(v)) return v;
            return format_number(v);
        }
        nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
        nlohmann::ordered_json operator()(const std::string& v) const { return v; }
        nlohmann::ordered_json operator()(bool v) const { return v; }
    };
    return std::visit(Visitor{}, c);
}

}  // namespace

std::string render_csv(const Report& r)
{
    std::string out = "#" + r.metadata.dump() + "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (i) out += ',';
        out += r.columns[i];
    }
    out += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += cell_text(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Report& r)
{
    nlohmann::ordered_json doc;
    doc["metadata"] = r.metadata;
    doc["columns"] = r.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) obj[r.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string render(const Report& r, OutputFormat f)
{
    return f == OutputFormat::csv ? render_csv(r) : render_json(r);
}

// ---------------------------------------------------------------------------
// Commands

namespace {

constexpr double default_mfet_rel_tol = 0.05;

Driver make_driver(const ExperimentConfig& cfg)
{
    Driver drv;
    if (cfg.driver == "stable")
        drv = StableDriver{cfg.beta, cfg.eps};
    else
        drv = GaussianDriver{cfg.a, cfg.eps};
    try {
        validate(drv);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return drv;
}

TemperedStableParams make_clock(const ExperimentConfig& cfg)
{
    TemperedStableParams p{cfg.alpha, cfg.mu};
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

Domain make_domain(const ExperimentConfig& cfg)
{
    Domain d{cfg.dim, cfg.radius};
    try {
        d.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return d;
}

void check_simulation(const ExperimentConfig& cfg)
{
    if (!(cfg.ds > 0.0) || !std::isfinite(cfg.ds)) throw ConfigError("--ds must be positive");
    if (cfg.trajectories < 2) throw ConfigError("--trajectories must be >= 2");
    if (cfg.max_steps < 1) throw ConfigError("--max-steps must be >= 1");
    if (cfg.x0.empty()) throw ConfigError("no start points given");
    for (double x : cfg.x0)
        if (!(std::abs(x) < cfg.radius))
            throw ConfigError("start point " + format_number(x) + " is not strictly inside the domain");
}

std::vector<double> start_point(const ExperimentConfig& cfg, double x0)
{
    std::vector<double> x(static_cast<std::size_t>(cfg.dim), 0.0);
    x[0] = x0;
    return x;
}

EnsembleOptions ensemble_options(const ExperimentConfig& cfg)
{
    EnsembleOptions opts;
    opts.workers = cfg.workers;
    opts.trajectory.max_steps = cfg.max_steps;
    opts.trajectory.exit_check = cfg.exit_check;
    opts.censor_threshold = 1.0;  // checked here so the report is still written
    return opts;
}

bool censoring_breached(std::uint64_t censored, std::uint64_t n)
{
    return static_cast<double>(censored) > 1e-3 * static_cast<double>(n);
}

nlohmann::ordered_json base_metadata(const ExperimentConfig& cfg, const std::string& command)
{
    nlohmann::ordered_json m;
    m["tool"] = "tempexit";
    m["version"] = version;
    m["command"] = command;
    m["driver"] = cfg.driver;
    m["alpha"] = cfg.alpha;
    m["mu"] = cfg.mu;
    if (cfg.driver == "stable")
        m["beta"] = cfg.beta;
    else
        m["a"] = cfg.a;
    m["eps"] = cfg.eps;
    m["dim"] = cfg.dim;
    m["radius"] = cfg.radius;
    m["x0"] = cfg.x0;
    return m;
}

void add_simulation_metadata(nlohmann::ordered_json& m, const ExperimentConfig& cfg, double rel_tol)
{
    m["ds"] = cfg.ds;
    m["trajectories"] = cfg.trajectories;
    m["max_steps"] = cfg.max_steps;
    m["seed"] = cfg.seed;
    m["exit_check"] = (cfg.exit_check == ExitCheck::bridge && cfg.driver == "gaussian") ? "bridge" : "grid";
    m["rel_tol"] = rel_tol;
}

// Analytic physical MFET for the configured driver. Noise strength enters as
// a time rescaling: eps * a for Brownian motion, eps^beta for stable jumps.
double analytic_mfet(const ExperimentConfig& cfg, std::span<const double> x, const TemperedStableParams& clock)
{
    if (cfg.driver == "stable")
        return analytic::mfet_stable_ball(x, cfg.radius, clock, cfg.beta) / std::pow(cfg.eps, cfg.beta);
    return analytic::mfet_gaussian_ball(x, cfg.radius, clock) / (cfg.eps * cfg.a);
}

void require_finite_mfet(const TemperedStableParams& clock)
{
    try {
        (void)mean_rate(clock);
    } catch (const DivergenceError& e) {
        throw ConfigError(std::string("analytic comparison impossible: ") + e.what());
    }
}

std::int64_t as_i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

CommandResult cmd_mfet(const ExperimentConfig& cfg)
{
    const Driver drv = make_driver(cfg);
    const TemperedStableParams clock = make_clock(cfg);
    const Domain domain = make_domain(cfg);
    check_simulation(cfg);
    require_finite_mfet(clock);
    const double rel_tol = cfg.rel_tol.value_or(default_mfet_rel_tol);

    CommandResult res;
    res.report.metadata = base_metadata(cfg, "mfet");
    add_simulation_metadata(res.report.metadata, cfg, rel_tol);
    res.report.columns = {"x0", "mc_mean", "mc_stderr", "mc_operational_mean", "n_eff",
                          "analytic", "z", "rel_err", "pass"};

    bool all_pass = true, censored = false;
    for (double x0 : cfg.x0) {
        const auto start = start_point(cfg, x0);
        const MfetEstimate est = estimate_mfet(start, domain, DriftField{}, drv, clock, cfg.ds,
                                               cfg.trajectories, cfg.seed, ensemble_options(cfg));
        const double exact = analytic_mfet(cfg, start, clock);
        const CompareReport cmp = compare(est.physical, exact, rel_tol);
        all_pass = all_pass && cmp.pass;
        censored = censored || censoring_breached(est.censored, est.n_traj);
        res.report.rows.push_back({x0, est.physical.mean, est.physical.std_error, est.operational.mean,
                                   as_i64(est.physical.count), exact, cmp.z, cmp.rel_err, cmp.pass});
    }
    res.exit_code = censored ? exit_censored : (all_pass ? exit_pass : exit_comparison_failure);
    return res;
}

CommandResult cmd_escape(const ExperimentConfig& cfg)
{
    if (cfg.driver != "stable")
        throw ConfigError("escape probability needs --driver stable (Brownian paths are continuous)");
    if (cfg.dim != 1) throw ConfigError("escape probability is implemented for --dim 1 only");
    const Driver drv = make_driver(cfg);
    const TemperedStableParams clock = make_clock(cfg);
    const Domain domain = make_domain(cfg);
    check_simulation(cfg);
    const double rel_tol = cfg.rel_tol.value_or(0.0);

    CommandResult res;
    auto& m = res.report.metadata;
    m["tool"] = "tempexit";
    m["version"] = version;
    m["command"] = "escape";
    m["driver"] = cfg.driver;
    m["beta"] = cfg.beta;
    m["eps"] = cfg.eps;
    m["dim"] = cfg.dim;
    m["radius"] = cfg.radius;
    m["x0"] = cfg.x0;
    m["target"] = "[radius, inf)";
    // Not used by the simulation: the landing law does not depend on the clock.
    m["clock"] = {{"alpha", clock.alpha}, {"mu", clock.mu}};
    add_simulation_metadata(m, cfg, rel_tol);
    res.report.columns = {"x0", "beta", "mc_estimate", "mc_stderr", "analytic", "z", "pass"};

    const TargetSet target = TargetSet::half_line_right(cfg.radius);
    bool all_pass = true, censored = false;
    for (double x0 : cfg.x0) {
        const auto start = start_point(cfg, x0);
        EscapeEstimate est;
        try {
            est = estimate_escape(start, domain, target, drv, cfg.ds, cfg.trajectories, cfg.seed,
                                  ensemble_options(cfg));
        } catch (const CensoringError&) {
            censored = true;
            res.report.rows.push_back({x0, cfg.beta, std::string("censored"), std::string("censored"),
                                       analytic::escape_prob_interval(x0, cfg.radius, cfg.beta),
                                       std::string("nan"), false});
            continue;
        }
        const double exact = analytic::escape_prob_interval(x0, cfg.radius, cfg.beta);
        const CompareReport cmp = compare(est.probability, exact, rel_tol);
        all_pass = all_pass && cmp.pass;
        censored = censored || censoring_breached(est.censored, est.n_traj);
        res.report.rows.push_back({x0, cfg.beta, est.probability.mean, est.probability.std_error, exact, cmp.z,
                                   cmp.pass});
    }
    res.exit_code = censored ? exit_censored : (all_pass ? exit_pass : exit_comparison_failure);
    return res;
}

CommandResult cmd_analytic(const ExperimentConfig& cfg)
{
    // Closed forms extend to beta = 2, where the stable generator is the Laplacian.
    const bool stable = cfg.driver == "stable";
    if (stable && !(cfg.beta > 0.0 && cfg.beta <= 2.0)) throw ConfigError("--beta must lie in (0, 2]");
    if (!stable) make_driver(cfg);
    if (!(cfg.eps > 0.0)) throw ConfigError("--eps must be positive");
    const TemperedStableParams clock = make_clock(cfg);
    make_domain(cfg);
    if (cfg.x0.empty()) throw ConfigError("no grid points given");
    for (double x : cfg.x0)
        if (!(std::abs(x) <= cfg.radius))
            throw ConfigError("grid point " + format_number(x) + " lies outside the closed domain");

    const bool with_escape = stable && cfg.dim == 1 && cfg.beta < 2.0;

    CommandResult res;
    res.report.metadata = base_metadata(cfg, "analytic");
    auto& cols = res.report.columns;
    cols = {"x", "mean_rate"};
    cols.push_back(stable ? "getoor_u" : "u_operational");
    cols.push_back("mfet");
    if (with_escape) cols.push_back("escape_prob");

    bool divergent = false;
    double rate = 0.0;
    try {
        rate = mean_rate(clock);
    } catch (const DivergenceError&) {
        divergent = true;
    }
    res.report.metadata["divergent"] = divergent;

    for (double x : cfg.x0) {
        const auto pt = start_point(cfg, x);
        // Operational-time MFET (unit clock).
        const double base = stable ? analytic::getoor_u(pt, cfg.radius, cfg.beta) / std::pow(cfg.eps, cfg.beta)
                                   : analytic::mfet_gaussian_ball(pt, cfg.radius, TemperedStableParams{1.0, 0.0}) /
                                         (cfg.eps * cfg.a);
        std::vector<Cell> row{x};
        if (divergent) {
            row.emplace_back(std::string("divergent"));
            row.emplace_back(base);
            row.emplace_back(std::string("divergent"));
        } else {
            row.emplace_back(rate);
            row.emplace_back(base);
            row.emplace_back(rate * base);
        }
        if (with_escape) row.emplace_back(analytic::escape_prob_interval(x, cfg.radius, cfg.beta));
        res.report.rows.push_back(std::move(row));
    }
    res.exit_code = divergent ? exit_config_error : exit_pass;
    return res;
}

CommandResult cmd_ratio(const ExperimentConfig& cfg)
{
    const Driver drv = make_driver(cfg);
    const TemperedStableParams clock = make_clock(cfg);
    const Domain domain = make_domain(cfg);
    check_simulation(cfg);
    require_finite_mfet(clock);
    const double rel_tol = cfg.rel_tol.value_or(0.0);
    const double factor = mean_rate(clock);

    CommandResult res;
    res.report.metadata = base_metadata(cfg, "ratio");
    add_simulation_metadata(res.report.metadata, cfg, rel_tol);
    res.report.columns = {"alpha", "mu", "ratio_mc", "ratio_stderr", "analytic_factor", "z", "pass"};

    const auto start = start_point(cfg, cfg.x0.front());
    const MfetEstimate est = estimate_mfet(start, domain, DriftField{}, drv, clock, cfg.ds, cfg.trajectories,
                                           cfg.seed, ensemble_options(cfg));
    MCEstimate as_estimate{est.ratio.mean, est.ratio.std_error, est.physical.count, EstimateKind::physical_mfet};
    const CompareReport cmp = compare(as_estimate, factor, rel_tol);
    res.report.rows.push_back({clock.alpha, clock.mu, est.ratio.mean, est.ratio.std_error, factor, cmp.z, cmp.pass});
    if (censoring_breached(est.censored, est.n_traj))
        res.exit_code = exit_censored;
    else
        res.exit_code = cmp.pass ? exit_pass : exit_comparison_failure;
    return res;
}

// ---------------------------------------------------------------------------
// Figure presets (desk-scale ensembles)

namespace {

struct PresetRun {
    std::string command;
    ExperimentConfig cfg;
};

ExperimentConfig gaussian_1d(double alpha)
{
    ExperimentConfig c;
    c.driver = "gaussian";
    c.alpha = alpha;
    c.mu = 0.1;
    c.radius = 10.0;
    c.x0 = parse_grid("-7.5:7.5:7");
    c.ds = 1e-2;
    c.trajectories = 10000;
    return c;
}

ExperimentConfig stable_ball(int dim, double alpha, double mu, double beta)
{
    ExperimentConfig c;
    c.driver = "stable";
    c.dim = dim;
    c.alpha = alpha;
    c.mu = mu;
    c.beta = beta;
    c.radius = 100.0;
    c.x0 = dim == 1 ? parse_grid("-75:75:7") : parse_grid("0:75:4");
    c.ds = 1e-2;
    c.trajectories = dim == 1 ? 20000 : 10000;
    return c;
}

// Operational step for escape runs: jump scale ds^(1/beta) kept well below the
// radius while bounding the number of steps per trajectory.
double escape_step(double beta)
{
    if (beta <= 0.5) return 1e-2;
    if (beta <= 1.2) return 5e-2;
    return 1.0;
}

std::vector<PresetRun> preset_runs(const std::string& name)
{
    std::vector<PresetRun> runs;
    if (name == "fig1") {
        for (double a : {0.2, 0.6, 0.9}) runs.push_back({"mfet", gaussian_1d(a)});
    } else if (name == "fig2") {
        for (double a : {0.2, 0.6, 0.9}) runs.push_back({"mfet", stable_ball(1, a, 0.1, 0.5)});
    } else if (name == "fig3") {
        for (double m : {0.01, 0.06, 0.1}) runs.push_back({"mfet", stable_ball(1, 0.6, m, 0.5)});
    } else if (name == "fig4") {
        runs.push_back({"mfet", stable_ball(2, 0.2, 0.1, 0.5)});
    } else if (name == "fig5" || name == "fig6") {
        runs.push_back({"mfet", stable_ball(2, 0.2, 0.01, 0.5)});
    } else if (name == "fig7") {
        runs.push_back({"mfet", stable_ball(2, 0.6, 0.1, 1.2)});
    } else if (name == "fig9") {
        for (double b : {0.5, 1.2, 1.8}) {
            ExperimentConfig c = stable_ball(1, 0.6, 0.1, b);
            c.ds = escape_step(b);
            runs.push_back({"escape", c});
        }
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return runs;
}

CommandResult dispatch(const std::string& command, const ExperimentConfig& cfg)
{
    if (command == "mfet") return cmd_mfet(cfg);
    if (command == "escape") return cmd_escape(cfg);
    if (command == "analytic") return cmd_analytic(cfg);
    if (command == "ratio") return cmd_ratio(cfg);
    throw ConfigError("unknown command '" + command + "'");
}

int worse(int a, int b)
{
    // censoring > config > comparison > pass
    auto rank = [](int c) {
        switch (c) {
            case exit_censored: return 3;
            case exit_config_error: return 2;
            case exit_comparison_failure: return 1;
            default: return 0;
        }
    };
    return rank(a) >= rank(b) ? a : b;
}

}  // namespace

std::vector<std::string> preset_names()
{
    return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig9"};
}

CommandResult run_preset(const std::string& name, const std::map<std::string, std::string>& overrides)
{
    std::vector<PresetRun> runs = preset_runs(name);
    for (auto& run : runs)
        for (const auto& [k, v] : overrides) apply_setting(run.cfg, k, v);

    CommandResult out;
    out.report.metadata["tool"] = "tempexit";
    out.report.metadata["version"] = version;
    out.report.metadata["preset"] = name;
    auto series = nlohmann::ordered_json::array();

    for (const auto& run : runs) {
        CommandResult r = dispatch(run.command, run.cfg);
        series.push_back(r.report.metadata);
        std::vector<std::string> prefix;
        std::vector<Cell> prefix_vals;
        if (run.command == "mfet") {
            prefix = {"alpha", "mu"};
            prefix_vals = {run.cfg.alpha, run.cfg.mu};
            if (run.cfg.driver == "stable") {
                prefix.push_back("beta");
                prefix_vals.emplace_back(run.cfg.beta);
            }
        }
        if (out.report.columns.empty()) {
            out.report.columns = prefix;
            out.report.columns.insert(out.report.columns.end(), r.report.columns.begin(), r.report.columns.end());
        }
        for (auto& row : r.report.rows) {
            std::vector<Cell> full = prefix_vals;
            full.insert(full.end(), row.begin(), row.end());
            out.report.rows.push_back(std::move(full));
        }
        out.exit_code = worse(out.exit_code, r.exit_code);
    }
    out.report.metadata["runs"] = std::move(series);
    return out;
}

// ---------------------------------------------------------------------------
// Entry point

namespace {

const std::vector<std::pair<std::string, std::string>> setting_flags = {
    {"driver", "noise driver: gaussian | stable"},
    {"alpha", "clock stability index, 0 < alpha <= 1"},
    {"mu", "clock tempering rate, mu >= 0"},
    {"beta", "jump stability index, 0 < beta < 2"},
    {"eps", "noise strength"},
    {"a", "Gaussian diffusion coefficient"},
    {"dim", "spatial dimension"},
    {"radius", "domain radius"},
    {"x0-grid", "start points lo:hi:count"},
    {"ds", "operational time step"},
    {"trajectories", "trajectories per start point"},
    {"max-steps", "step limit per trajectory"},
    {"seed", "master seed"},
    {"out", "output path, - for stdout"},
    {"format", "csv | json"},
    {"rel-tol", "relative tolerance for the comparison"},
    {"workers", "worker threads (0: all cores); does not change the output"},
    {"exit-check", "Gaussian exit detection: bridge | grid"},
};

struct FlagStore {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::vector<std::string> x0;
    CLI::Option* x0_opt = nullptr;
    std::string config_file;
    CLI::Option* config_opt = nullptr;

    void attach(CLI::App* app)
    {
        for (const auto& [name, help] : setting_flags) options[name] = app->add_option("--" + name, values[name], help);
        x0_opt = app->add_option("--x0", x0, "start point (repeatable; radial coordinate in dim >= 2)");
        config_opt = app->add_option("--config", config_file, "flat key=value settings file; flags win");
    }

    std::map<std::string, std::string> collect() const
    {
        std::map<std::string, std::string> out;
        if (config_opt->count() > 0) out = read_settings_file(config_file);
        for (const auto& [name, opt] : options)
            if (opt->count() > 0) out[name] = values.at(name);
        if (x0_opt->count() > 0) {
            std::string joined;
            for (const auto& v : x0) joined += (joined.empty() ? "" : ",") + v;
            out["x0"] = joined;
            out.erase("x0-grid");
        }
        return out;
    }
};

void emit(const CommandResult& res, const std::string& path, OutputFormat format)
{
    const std::string text = render(res.report, format);
    if (path == "-" || path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Monte Carlo and closed-form exit statistics for tempered subordinated diffusions"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    struct Sub {
        std::string name;
        CLI::App* app;
        FlagStore flags;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    auto add = [&](const std::string& name, const std::string& help) -> Sub& {
        auto s = std::make_unique<Sub>();
        s->name = name;
        s->app = app.add_subcommand(name, help);
        s->flags.attach(s->app);
        subs.push_back(std::move(s));
        return *subs.back();
    };
    add("mfet", "estimate mean first exit times and compare with the closed form");
    add("escape", "estimate escape probabilities into [radius, inf)");
    add("analytic", "evaluate closed-form MFET and escape probability on a grid");
    add("ratio", "estimate the physical/operational MFET ratio");
    Sub& preset = add("preset", "run a figure preset (" + [] {
        std::string s;
        for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }() + ")");
    std::string preset_name;
    preset.app->add_option("name", preset_name, "preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config_error;
    }

    try {
        for (const auto& s : subs) {
            if (!s->app->parsed()) continue;
            const auto settings = s->flags.collect();
            if (s->name == "preset") {
                ExperimentConfig out_cfg;
                for (const auto& [k, v] : settings)
                    if (k == "out" || k == "format") apply_setting(out_cfg, k, v);
                const CommandResult res = run_preset(preset_name, settings);
                emit(res, out_cfg.out, out_cfg.format);
                return res.exit_code;
            }
            ExperimentConfig cfg;
            if (s->name == "escape") cfg.driver = "stable";
            for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
            const CommandResult res = dispatch(s->name, cfg);
            emit(res, cfg.out, cfg.format);
            return res.exit_code;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const CensoringError& e) {
        std::cerr << "censoring: " << e.what() << "\n";
        return exit_censored;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    return exit_config_error;
}

}  // namespace tempexit::cli
