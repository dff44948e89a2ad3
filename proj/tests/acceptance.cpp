// Desk-scale acceptance run. One PASS/FAIL line per criterion; exit status is
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tempexit/analytic.hpp"
#include "tempexit/cli.hpp"
#include "tempexit/estimator.hpp"
#include "tempexit/rng.hpp"
#include "tempexit/subordinator.hpp"

using namespace tempexit;

namespace {

constexpr std::uint64_t n_traj = 20000;
constexpr std::uint64_t seed = 2024;

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool within(const MCEstimate& e, double exact, double rel)
{
    return std::abs(e.mean - exact) <= std::max(rel * std::abs(exact), 3.0 * e.std_error);
}

bool separated(const MCEstimate& hi, const MCEstimate& lo)
{
    return hi.mean - lo.mean > 3.0 * std::hypot(hi.std_error, lo.std_error);
}

bool ratio_ok(const MfetEstimate& e, const TemperedStableParams& clock)
{
    return std::abs(e.ratio.mean - mean_rate(clock)) <= 3.0 * e.ratio.std_error;
}

std::string after_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

// Ensemble results kept for the ratio criterion.
std::vector<std::pair<std::string, MfetEstimate>> ratio_runs;
std::vector<TemperedStableParams> ratio_clocks;

Check criterion1()
{
    Check c;
    for (double alpha : {0.2, 0.6, 0.9}) {
        const TemperedStableParams clock{alpha, 0.1};
        for (double x : {0.0, 5.0, -5.0}) {
            const std::vector<double> x0{x};
            const auto e = estimate_mfet(x0, Domain::interval(10), DriftField{}, GaussianDriver{}, clock, 1e-2, n_traj, seed);
            const double exact = analytic::mfet_gaussian_1d(x, 10, clock);
            c.expect(within(e.physical, exact, 0.05),
                     fmt("alpha=%.1f x0=%g: %.4f+-%.4f vs %.4f", alpha, x, e.physical.mean, e.physical.std_error, exact));
            ratio_runs.emplace_back(fmt("gauss alpha=%.1f x0=%g", alpha, x), e);
            ratio_clocks.push_back(clock);
        }
    }
    return c;
}

Check criterion2()
{
    Check c;
    const TemperedStableParams clock{1.0, 0.1};
    const auto e = estimate_mfet(std::vector<double>{0.0}, Domain::interval(10), DriftField{}, GaussianDriver{}, clock, 1e-2,
                                 n_traj, seed);
    c.expect(within(e.physical, 50.0, 0.02), fmt("u(0)=%.4f+-%.4f vs 50", e.physical.mean, e.physical.std_error));
    return c;
}

Check criterion3()
{
    Check c;
    const TemperedStableParams clock{0.6, 0.1};
    for (const std::vector<double>& x0 : {std::vector<double>{0.0, 0.0}, std::vector<double>{5.0, 0.0}}) {
        const auto e = estimate_mfet(x0, Domain::ball(2, 10), DriftField{}, GaussianDriver{}, clock, 1e-2, n_traj, seed);
        const double exact = mean_rate(clock) * (100.0 - x0[0] * x0[0]) / 4.0;
        c.expect(within(e.physical, exact, 0.05),
                 fmt("x0=(%g,0): %.4f+-%.4f vs %.4f", x0[0], e.physical.mean, e.physical.std_error, exact));
    }
    return c;
}

Check criterion4()
{
    Check c;
    const std::vector<double> x0{0.0};
    std::vector<MCEstimate> est;
    for (double alpha : {0.2, 0.6, 0.9}) {
        const TemperedStableParams clock{alpha, 0.1};
        const auto e = estimate_mfet(x0, Domain::interval(100), DriftField{}, StableDriver{0.5, 1.0}, clock, 1e-2, n_traj, seed);
        const double exact = analytic::mfet_stable_ball(x0, 100, clock, 0.5);
        c.expect(within(e.physical, exact, 0.05),
                 fmt("alpha=%.1f: %.4f+-%.4f vs %.4f", alpha, e.physical.mean, e.physical.std_error, exact));
        est.push_back(e.physical);
        ratio_runs.emplace_back(fmt("stable alpha=%.1f", alpha), e);
        ratio_clocks.push_back(clock);
    }
    c.expect(est[1].mean > est[0].mean && est[0].mean > est[2].mean, "ordering 0.6 > 0.2 > 0.9 violated");
    return c;
}

Check criterion5()
{
    Check c;
    const std::vector<double> x0{0.0};
    std::vector<MCEstimate> est;
    for (double mu : {0.01, 0.06, 0.1}) {
        const auto e = estimate_mfet(x0, Domain::interval(100), DriftField{}, StableDriver{0.5, 1.0}, {0.6, mu}, 1e-2, n_traj,
                                     seed + 1);
        est.push_back(e.physical);
    }
    for (std::size_t i = 0; i < est.size(); ++i)
        for (std::size_t j = i + 1; j < est.size(); ++j)
            c.expect(separated(est[i], est[j]), fmt("u(0) pair %zu,%zu: %.3f vs %.3f", i, j, est[i].mean, est[j].mean));
    return c;
}

Check criterion6()
{
    Check c;
    for (std::size_t i = 0; i < ratio_runs.size(); ++i) {
        const auto& [name, e] = ratio_runs[i];
        c.expect(ratio_ok(e, ratio_clocks[i]), fmt("%s: ratio %.5f+-%.5f vs %.5f", name.c_str(), e.ratio.mean,
                                                   e.ratio.std_error, mean_rate(ratio_clocks[i])));
    }
    if (ratio_runs.size() != 12) c.expect(false, "criteria 1 and 4 did not run");
    return c;
}

// Escape runs go through the CLI command so the rendered reports can be compared.
cli::ExperimentConfig escape_config(double beta, double alpha, double mu)
{
    cli::ExperimentConfig cfg;
    cfg.driver = "stable";
    cfg.beta = beta;
    cfg.alpha = alpha;
    cfg.mu = mu;
    cfg.radius = 100.0;
    cfg.x0 = {-50.0, 0.0, 50.0};
    cfg.ds = beta <= 0.5 ? 1e-2 : (beta <= 1.2 ? 5e-2 : 1.0);
    cfg.trajectories = n_traj;
    cfg.seed = seed;
    return cfg;
}

std::vector<std::string> escape_reports;

Check criterion7()
{
    Check c;
    std::vector<std::pair<double, double>> at_half;  // (mean, se) at x0 = r/2
    for (double beta : {0.5, 1.2, 1.8}) {
        const auto res = cli::cmd_escape(escape_config(beta, 0.2, 0.01));
        escape_reports.push_back(cli::render_csv(res.report));
        c.expect(res.exit_code == cli::exit_pass, fmt("beta=%.1f: report exit code %d", beta, res.exit_code));
        for (const auto& row : res.report.rows) {
            const double x0 = std::get<double>(row[0]);
            const double mean = std::get<double>(row[2]);
            const double se = std::get<double>(row[3]);
            const double exact = std::get<double>(row[4]);
            c.expect(std::abs(mean - exact) <= 3.0 * se,
                     fmt("beta=%.1f x0=%g: %.4f+-%.4f vs %.4f", beta, x0, mean, se, exact));
            if (x0 == 0.0) c.expect(std::abs(mean - 0.5) <= 3.0 * se, fmt("beta=%.1f x0=0: %.4f", beta, mean));
            if (x0 == 50.0) at_half.emplace_back(mean, se);
        }
    }
    for (std::size_t i = 0; i + 1 < at_half.size(); ++i) {
        const auto [lo, slo] = at_half[i];
        const auto [hi, shi] = at_half[i + 1];
        c.expect(hi - lo > 3.0 * std::hypot(slo, shi), fmt("no 3-sigma growth in beta: %.4f vs %.4f", lo, hi));
    }
    return c;
}

Check criterion8()
{
    Check c;
    if (escape_reports.size() != 3) {
        c.expect(false, "criterion 7 did not run");
        return c;
    }
    std::size_t i = 0;
    for (double beta : {0.5, 1.2, 1.8}) {
        const auto res = cli::cmd_escape(escape_config(beta, 0.9, 1.0));
        const std::string other = cli::render_csv(res.report);
        c.expect(after_first_line(other) == after_first_line(escape_reports[i]),
                 fmt("beta=%.1f: reports differ between clocks", beta));
        c.expect(res.exit_code == cli::exit_pass, fmt("beta=%.1f: clock (0.9, 1) run fails", beta));
        ++i;
    }
    return c;
}

Check criterion9()
{
    Check c;
    const TemperedStableParams clock{0.6, 0.1};
    double worst = 0.0;
    for (int n : {1, 2})
        for (double x : {0.0, 1.5, 4.0, 7.25, 9.9}) {
            std::vector<double> pt(n, 0.0);
            pt[0] = x;
            const double g = n == 1 ? analytic::mfet_gaussian_1d(x, 10, clock) : analytic::mfet_gaussian_ball(pt, 10, clock);
            worst = std::max(worst, std::abs(analytic::mfet_stable_ball(pt, 10, clock, 2.0) - g) / g);
        }
    c.expect(worst <= 1e-12, fmt("beta=2 vs Gaussian rel err %.3g", worst));

    double quad_err = 0.0, sym_err = 0.0;
    for (double beta : {0.2, 0.5, 0.9, 1.2, 1.5, 1.8, 1.95})
        for (int i = -19; i <= 19; ++i) {
            const double x = i / 20.0;
            const double p = analytic::escape_prob_interval(x, 1.0, beta);
            quad_err = std::max(quad_err, std::abs(p - analytic::escape_prob_interval_quad(x, 1.0, beta)));
            sym_err = std::max(sym_err, std::abs(p + analytic::escape_prob_interval(-x, 1.0, beta) - 1.0));
        }
    c.expect(quad_err <= 1e-8, fmt("beta-function vs quadrature %.3g", quad_err));
    c.expect(sym_err <= 1e-12, fmt("symmetry %.3g", sym_err));

    for (int n : {1, 2, 3}) {
        std::vector<double> edge(n, 0.0);
        edge[n - 1] = -10.0;
        c.expect(analytic::mfet_gaussian_ball(edge, 10, clock) == 0.0, "Gaussian ball MFET nonzero at |x| = r");
        for (double beta : {0.5, 1.2, 2.0})
            c.expect(analytic::mfet_stable_ball(edge, 10, clock, beta) == 0.0, "stable MFET nonzero at |x| = r");
    }
    c.expect(analytic::mfet_gaussian_1d(10.0, 10, clock) == 0.0 && analytic::mfet_gaussian_1d(-10.0, 10, clock) == 0.0,
             "1-D Gaussian MFET nonzero at |x| = r");

    double best_alpha = 0.0, best = -1.0;
    for (int i = 1; i <= 1'000'000; ++i) {
        const double a = i / 1e6;
        const double v = mean_rate({a, 0.1});
        if (v > best) {
            best = v;
            best_alpha = a;
        }
    }
    const double target = 1.0 / std::numbers::ln10;
    c.expect(std::abs(best_alpha - target) <= 1e-3, fmt("argmax %.6f vs %.6f", best_alpha, target));
    return c;
}

Check criterion10()
{
    Check c;
    constexpr int n = 100000;
    const double ds = 1e-2;
    std::uint64_t stream = 0;
    for (double alpha : {0.2, 0.6, 0.9})
        for (double mu : {0.01, 0.1, 1.0}) {
            const TemperedStableParams p{alpha, mu};
            RngStream s = make_stream(seed, stream++);
            RunningStats st;
            std::uint64_t proposals = 0;
            for (int i = 0; i < n; ++i) {
                const TemperedDraw d = draw_tempered_onesided(s, p, ds);
                st = accumulate(st, d.value);
                proposals += d.proposals;
            }
            const double expected = ds * alpha * std::pow(mu, alpha - 1.0);
            c.expect(std::abs(st.mean - expected) <= 3.0 * st.std_error(),
                     fmt("mean (%.1f,%.2f): %.5g+-%.3g vs %.5g", alpha, mu, st.mean, st.std_error(), expected));
            const double acc = std::exp(-ds * std::pow(mu, alpha));
            const double rate = double(n) / double(proposals);
            const double se = std::sqrt(acc * (1.0 - acc) / double(proposals));
            c.expect(std::abs(rate - acc) <= 3.0 * se || (acc == 1.0 && rate == 1.0),
                     fmt("acceptance (%.1f,%.2f): %.6f vs %.6f", alpha, mu, rate, acc));
        }
    // A larger tempering load exercises the acceptance identity away from 1.
    for (double alpha : {0.2, 0.6, 0.9}) {
        const TemperedStableParams p{alpha, 1.0};
        RngStream s = make_stream(seed, stream++);
        std::uint64_t proposals = 0;
        for (int i = 0; i < n; ++i) proposals += draw_tempered_onesided(s, p, 0.5).proposals;
        const double acc = std::exp(-0.5);
        const double rate = double(n) / double(proposals);
        c.expect(std::abs(rate - acc) <= 3.0 * std::sqrt(acc * (1.0 - acc) / double(proposals)),
                 fmt("acceptance (%.1f,1, ds=0.5): %.5f vs %.5f", alpha, rate, acc));
    }

    for (double beta : {0.5, 1.0, 1.2, 1.8}) {
        RngStream s = make_stream(seed, stream++);
        std::vector<double> xs(n);
        for (auto& x : xs) x = sample_symmetric_stable(s, beta);
        for (double k : {0.5, 1.0, 2.0}) {
            double cf = 0.0;
            for (double x : xs) cf += std::cos(k * x);
            cf /= n;
            const double expected = std::exp(-std::pow(k, beta));
            c.expect(std::abs(cf - expected) <= 3.0 / std::sqrt(double(n)),
                     fmt("cf beta=%.1f k=%.1f: %.5f vs %.5f", beta, k, cf, expected));
        }
    }
    return c;
}

Check criterion11()
{
    Check c;
    cli::ExperimentConfig mfet;
    mfet.driver = "stable";
    mfet.beta = 0.5;
    mfet.alpha = 0.6;
    mfet.mu = 0.1;
    mfet.radius = 100.0;
    mfet.x0 = {0.0, 50.0};
    mfet.trajectories = n_traj;
    mfet.seed = seed;
    cli::ExperimentConfig gauss;
    gauss.alpha = 0.6;
    gauss.radius = 10.0;
    gauss.dim = 2;
    gauss.x0 = {5.0};
    gauss.trajectories = 5000;
    gauss.seed = seed;
    const cli::ExperimentConfig esc = escape_config(1.8, 0.6, 0.1);

    const std::vector<std::pair<std::string, std::function<cli::CommandResult(const cli::ExperimentConfig&)>>> runs = {
        {"mfet stable", cli::cmd_mfet}, {"mfet gaussian 2-D", cli::cmd_mfet}, {"escape", cli::cmd_escape}};
    const std::vector<cli::ExperimentConfig> cfgs = {mfet, gauss, esc};
    for (std::size_t i = 0; i < runs.size(); ++i) {
        cli::ExperimentConfig one = cfgs[i], many = cfgs[i];
        one.workers = 1;
        many.workers = 3;
        const cli::Report a = runs[i].second(one).report, b = runs[i].second(many).report;
        for (auto format : {cli::OutputFormat::csv, cli::OutputFormat::json})
            c.expect(cli::render(a, format) == cli::render(b, format),
                     runs[i].first + ": reports differ between 1 and 3 workers");
    }
    return c;
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, Check (*)()>> criteria = {
        {"1  Gaussian 1-D tempered MFET", criterion1},
        {"2  classical u(0) = 50", criterion2},
        {"3  Gaussian 2-D tempered MFET", criterion3},
        {"4  stable MFET and alpha ordering", criterion4},
        {"5  mu sweep ordering", criterion5},
        {"6  physical/operational ratio", criterion6},
        {"7  escape probability", criterion7},
        {"8  escape independent of the clock", criterion8},
        {"9  analytic consistency", criterion9},
        {"10 sampler suite", criterion10},
        {"11 worker-count determinism", criterion11},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %-38s (%6.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", name, secs, c.detail.empty() ? "" : "  ",
                    c.detail.c_str());
        std::fflush(stdout);
        failed += c.ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
