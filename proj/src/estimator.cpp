#include "tempexit/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "tempexit/errors.hpp"

namespace tempexit {

double RunningStats::std_error() const
{
    if (count < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(count));
}

RunningStats accumulate(RunningStats state, double sample)
{
    ++state.count;
    const double delta = sample - state.mean;
    state.mean += delta / static_cast<double>(state.count);
    state.m2 += delta * (sample - state.mean);
    return state;
}

MCEstimate to_estimate(const RunningStats& stats, EstimateKind kind)
{
    return MCEstimate{stats.mean, stats.std_error(), stats.count, kind};
}

MCEstimate bernoulli_estimate(std::uint64_t successes, std::uint64_t count)
{
    if (count == 0) throw DomainError("bernoulli_estimate: count must be >= 1");
    const double n = static_cast<double>(count);
    const double p = static_cast<double>(successes) / n;
    return MCEstimate{p, std::sqrt(p * (1.0 - p) / n), count, EstimateKind::escape_prob};
}

TargetSet TargetSet::half_line_right(double threshold)
{
    TargetSet t;
    t.kind_ = Kind::half_line_right;
    t.threshold_ = threshold;
    return t;
}

TargetSet TargetSet::half_line_left(double threshold)
{
    TargetSet t;
    t.kind_ = Kind::half_line_left;
    t.threshold_ = threshold;
    return t;
}

TargetSet TargetSet::complement() { return TargetSet{}; }

TargetSet TargetSet::custom(Predicate p)
{
    TargetSet t;
    t.kind_ = Kind::predicate;
    t.pred_ = std::move(p);
    return t;
}

bool TargetSet::contains(std::span<const double> landing) const
{
    switch (kind_) {
        case Kind::half_line_right: return landing[0] >= threshold_;
        case Kind::half_line_left: return landing[0] <= threshold_;
        case Kind::complement: return true;
        case Kind::predicate: return pred_(landing);
    }
    return false;
}

void TargetSet::validate_against(const Domain& d) const
{
    switch (kind_) {
        case Kind::half_line_right:
        case Kind::half_line_left:
            if (d.dim != 1) throw DomainError("half-line targets require a one-dimensional domain");
            if (kind_ == Kind::half_line_right ? threshold_ < d.radius : threshold_ > -d.radius)
                throw DomainError("target half-line intersects the domain");
            return;
        case Kind::complement: return;
        case Kind::predicate:
            if (!pred_) throw DomainError("target predicate is empty");
            return;
    }
}

void parallel_for(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t)>& body)
{
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    constexpr std::uint64_t chunk = 64;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::uint64_t end = std::min(n, begin + chunk);
            try {
                for (std::uint64_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

void check_ensemble(std::span<const double> x0, const Domain& domain, double ds, std::uint64_t n_traj)
{
    domain.validate();
    if (n_traj < 2) throw DomainError("ensemble needs at least 2 trajectories");
    if (!(ds > 0.0) || !std::isfinite(ds)) throw DomainError("ds must be positive");
    if (!contains(domain, x0)) throw DomainError("start point must lie strictly inside the domain");
}

void check_censoring(std::uint64_t censored, std::uint64_t n_traj, const EnsembleOptions& opts)
{
    if (static_cast<double>(censored) > opts.censor_threshold * static_cast<double>(n_traj))
        throw CensoringError(std::to_string(censored) + " of " + std::to_string(n_traj) +
                                 " trajectories exceeded max_steps",
                             censored, n_traj);
}

struct MfetOutcome {
    double s_exit = 0.0;
    double t_exit = 0.0;
    bool exited = false;
};

}  // namespace

MfetEstimate estimate_mfet(std::span<const double> x0, const Domain& domain, const DriftField& drift,
                           const Driver& driver, const TemperedStableParams& clock, double ds,
                           std::uint64_t n_traj, std::uint64_t master_seed, const EnsembleOptions& opts)
{
    check_ensemble(x0, domain, ds, n_traj);
    clock.validate();
    validate(driver);

    std::vector<MfetOutcome> outcomes(n_traj);
    parallel_for(n_traj, opts.workers, [&](std::uint64_t i) {
        RngStream s = make_stream(master_seed, i);
        const ExitRecord rec = run_trajectory(x0, domain, drift, driver, clock, ds, s, opts.trajectory);
        outcomes[i] = MfetOutcome{rec.s_exit, rec.t_exit, rec.exited()};
    });

    RunningStats phys, oper;
    std::uint64_t censored = 0;
    for (const auto& o : outcomes) {
        if (!o.exited) {
            ++censored;
            continue;
        }
        phys = accumulate(phys, o.t_exit);
        oper = accumulate(oper, o.s_exit);
    }

    MfetEstimate est;
    est.n_traj = n_traj;
    est.censored = censored;
    est.physical = to_estimate(phys, EstimateKind::physical_mfet);
    est.operational = to_estimate(oper, EstimateKind::operational_mfet);

    if (oper.count >= 2 && oper.mean > 0.0) {
        const double ratio = phys.mean / oper.mean;
        RunningStats resid;
        for (const auto& o : outcomes)
            if (o.exited) resid = accumulate(resid, o.t_exit - ratio * o.s_exit);
        est.ratio = RatioEstimate{ratio, resid.std_error() / oper.mean};
    }

    check_censoring(censored, n_traj, opts);
    return est;
}

EscapeEstimate estimate_escape(std::span<const double> x0, const Domain& domain, const TargetSet& target,
                               const Driver& driver, double ds, std::uint64_t n_traj,
                               std::uint64_t master_seed, const EnsembleOptions& opts)
{
    check_ensemble(x0, domain, ds, n_traj);
    validate(driver);
    if (!is_stable(driver))
        throw DomainError("escape probability is undefined for the Gaussian driver (continuous paths)");
    target.validate_against(domain);

    // 0 = censored, 1 = miss, 2 = hit
    std::vector<unsigned char> outcomes(n_traj, 0);
    const DriftField zero;
    parallel_for(n_traj, opts.workers, [&](std::uint64_t i) {
        RngStream s = make_stream(master_seed, i);
        const PathRecord rec = run_path(x0, domain, zero, driver, ds, s, opts.trajectory);
        if (rec.status == ExitStatus::exited) outcomes[i] = target.contains(rec.landing) ? 2 : 1;
    });

    std::uint64_t hits = 0, censored = 0;
    for (unsigned char o : outcomes) {
        if (o == 0) ++censored;
        if (o == 2) ++hits;
    }
    const std::uint64_t finished = n_traj - censored;
    if (finished == 0)
        throw CensoringError("all trajectories exceeded max_steps", censored, n_traj);

    EscapeEstimate est;
    est.n_traj = n_traj;
    est.censored = censored;
    est.probability = bernoulli_estimate(hits, finished);
    check_censoring(censored, n_traj, opts);
    return est;
}

CompareReport compare(const MCEstimate& estimate, double analytic, double rel_tol, double z_max)
{
    CompareReport rep;
    rep.analytic = analytic;
    rep.estimate = estimate;
    const double diff = estimate.mean - analytic;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (estimate.std_error > 0.0)
        rep.z = diff / estimate.std_error;
    else
        rep.z = diff == 0.0 ? 0.0 : std::copysign(inf, diff);
    if (analytic != 0.0)
        rep.rel_err = std::abs(diff) / std::abs(analytic);
    else
        rep.rel_err = diff == 0.0 ? 0.0 : inf;
    rep.pass = std::abs(rep.z) <= z_max || rep.rel_err <= rel_tol;
    return rep;
}

}  // namespace tempexit
