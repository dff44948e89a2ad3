#include "tempexit/dynamics.hpp"

#include <cmath>
#include <string>

#include "tempexit/errors.hpp"
#include "tempexit/subordinator.hpp"

namespace tempexit {

namespace {

double norm_squared(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

// exp(-40) ~ 4e-18: below this a bridge crossing is not worth a uniform draw.
constexpr double bridge_cutoff = 40.0;

}  // namespace

void Domain::validate() const
{
    if (dim < 1) throw DomainError("domain dimension must be >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("domain radius must be positive");
}

bool contains(const Domain& d, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != d.dim)
        throw DomainError("contains: point has dimension " + std::to_string(x.size()) +
                          ", domain has " + std::to_string(d.dim));
    if (d.dim == 1) return std::abs(x[0]) < d.radius;
    return norm_squared(x) < d.radius * d.radius;
}

void validate(const Driver& drv)
{
    if (const auto* g = std::get_if<GaussianDriver>(&drv)) {
        if (!(g->a > 0.0) || !std::isfinite(g->a)) throw DomainError("gaussian driver: a must be positive");
        if (!(g->eps > 0.0) || !std::isfinite(g->eps)) throw DomainError("gaussian driver: eps must be positive");
        return;
    }
    const auto& st = std::get<StableDriver>(drv);
    if (!(st.beta > 0.0 && st.beta < 2.0)) throw DomainError("stable driver: beta must lie in (0, 2)");
    if (!(st.eps > 0.0) || !std::isfinite(st.eps)) throw DomainError("stable driver: eps must be positive");
}

bool is_stable(const Driver& drv) { return std::holds_alternative<StableDriver>(drv); }

DriftField DriftField::constant(std::vector<double> c)
{
    return DriftField([c = std::move(c)](std::span<const double>, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = c.at(i);
    });
}

void DriftField::operator()(std::span<const double> x, std::span<double> out) const
{
    if (!f_) {
        for (double& v : out) v = 0.0;
        return;
    }
    f_(x, out);
}

Stepper::Stepper(int dim, double ds, DriftField drift, Driver driver)
    : dim_(dim), ds_(ds), drift_(std::move(drift)), driver_(driver)
{
    if (dim < 1) throw DomainError("stepper: dimension must be >= 1");
    if (!(ds > 0.0) || !std::isfinite(ds)) throw DomainError("stepper: ds must be positive");
    validate(driver_);
    if (const auto* g = std::get_if<GaussianDriver>(&driver_)) {
        noise_scale_ = std::sqrt(2.0 * g->eps * g->a * ds);
        bridge_denom_ = g->eps * g->a * ds;
    } else {
        const auto& st = std::get<StableDriver>(driver_);
        stable_ = true;
        beta_ = st.beta;
        noise_scale_ = st.eps * std::pow(ds, 1.0 / st.beta);
    }
    if (!drift_.is_zero()) drift_buf_.assign(static_cast<std::size_t>(dim), 0.0);
}

void Stepper::step(std::span<double> x, RngStream& s)
{
    if (static_cast<int>(x.size()) != dim_) throw DomainError("step: dimension mismatch");

    if (!drift_.is_zero()) {
        drift_(x, drift_buf_);
        for (int i = 0; i < dim_; ++i) x[i] += drift_buf_[i] * ds_;
    }

    if (!stable_) {
        for (int i = 0; i < dim_; ++i) x[i] += noise_scale_ * s.gaussian();
        return;
    }
    if (dim_ == 1) {
        x[0] += noise_scale_ * sample_symmetric_stable(s, beta_);
        return;
    }
    // Sub-Gaussian representation: sqrt(2A) G with A positive (beta/2)-stable.
    const double mix = noise_scale_ * std::sqrt(2.0 * sample_onesided_stable(s, 0.5 * beta_));
    for (int i = 0; i < dim_; ++i) x[i] += mix * s.gaussian();
}

double Stepper::bridge_crossing_probability(const Domain& d, std::span<const double> from,
                                            std::span<const double> to) const
{
    if (stable_) return 0.0;
    const double r = d.radius;
    if (dim_ == 1) {
        const double right = (r - from[0]) * (r - to[0]) / bridge_denom_;
        const double left = (r + from[0]) * (r + to[0]) / bridge_denom_;
        const double stay_r = right > bridge_cutoff ? 1.0 : -std::expm1(-right);
        const double stay_l = left > bridge_cutoff ? 1.0 : -std::expm1(-left);
        return 1.0 - stay_r * stay_l;
    }
    // Nearest-boundary half-space approximation of the sphere.
    const double gap = (r - std::sqrt(norm_squared(from))) * (r - std::sqrt(norm_squared(to))) / bridge_denom_;
    return gap > bridge_cutoff ? 0.0 : std::exp(-gap);
}

std::vector<double> step(std::span<const double> x, double ds, const DriftField& drift,
                         const Driver& driver, RngStream& s)
{
    std::vector<double> out(x.begin(), x.end());
    Stepper stepper(static_cast<int>(x.size()), ds, drift, driver);
    stepper.step(out, s);
    return out;
}

PathRecord run_path(std::span<const double> x0, const Domain& d, const DriftField& drift,
                    const Driver& driver, double ds, RngStream& s, const TrajectoryOptions& opts)
{
    d.validate();
    if (!contains(d, x0)) throw DomainError("run_path: start point must lie strictly inside the domain");
    if (opts.max_steps < 1) throw DomainError("run_path: max_steps must be >= 1");

    Stepper stepper(d.dim, ds, drift, driver);
    const bool use_bridge = opts.exit_check == ExitCheck::bridge && !is_stable(driver);

    PathRecord rec;
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> prev(x0.begin(), x0.end());
    while (rec.steps < opts.max_steps) {
        if (use_bridge) prev = x;
        stepper.step(x, s);
        ++rec.steps;
        if (!contains(d, x)) {
            rec.landing = std::move(x);
            return rec;
        }
        if (use_bridge) {
            const double p = stepper.bridge_crossing_probability(d, prev, x);
            if (p > 0.0 && s.uniform() < p) {
                // Crossed between grid points: land on the sphere along x.
                const double len = std::sqrt(norm_squared(x));
                if (len > 0.0) {
                    for (double& v : x) v *= d.radius / len;
                } else {
                    x[0] = d.radius;
                }
                while (contains(d, x))
                    for (double& v : x) v *= 1.0 + 0x1.0p-52;
                rec.landing = std::move(x);
                return rec;
            }
        }
    }
    rec.status = ExitStatus::max_steps_exceeded;
    rec.landing = std::move(x);
    return rec;
}

ExitRecord run_trajectory(std::span<const double> x0, const Domain& d, const DriftField& drift,
                          const Driver& driver, const TemperedStableParams& clock, double ds,
                          RngStream& s, const TrajectoryOptions& opts)
{
    clock.validate();
    PathRecord path = run_path(x0, d, drift, driver, ds, s, opts);

    ExitRecord rec;
    rec.steps = path.steps;
    rec.status = path.status;
    rec.landing = std::move(path.landing);
    rec.s_exit = static_cast<double>(rec.steps) * ds;
    // T has independent increments and is independent of the spatial path, so
    // one draw over the whole operational duration equals the per-step sum in law.
    rec.t_exit = advance(ClockState{}, rec.s_exit, clock, s).physical_time;
    return rec;
}

}  // namespace tempexit
