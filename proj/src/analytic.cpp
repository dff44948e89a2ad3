#include "tempexit/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "tempexit/errors.hpp"
#include "tempexit/specfun.hpp"
#include "tempexit/subordinator.hpp"

namespace tempexit::analytic {

namespace {

double norm(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void check_radius(double x_norm, double r)
{
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive");
    if (!(x_norm <= r)) throw DomainError("point lies outside the closed domain");
}

// (r^2 - x^2) computed as (r - x)(r + x) to keep accuracy near the boundary.
double gap(double x_norm, double r) { return (r - x_norm) * (r + x_norm); }

}  // namespace

double mfet_gaussian_1d(double x, double r, const TemperedStableParams& clock)
{
    check_radius(std::abs(x), r);
    return mean_rate(clock) * gap(std::abs(x), r) / 2.0;
}

double mfet_gaussian_ball(std::span<const double> x, double r, const TemperedStableParams& clock)
{
    if (x.empty()) throw DomainError("dimension must be >= 1");
    const double xn = norm(x);
    check_radius(xn, r);
    return mean_rate(clock) * gap(xn, r) / (2.0 * static_cast<double>(x.size()));
}

double getoor_u(double x_norm, double r, double beta, int n)
{
    if (!(beta > 0.0 && beta <= 2.0)) throw DomainError("getoor_u: beta must lie in (0, 2]");
    if (n < 1) throw DomainError("getoor_u: dimension must be >= 1");
    check_radius(std::abs(x_norm), r);
    const double g = gap(std::abs(x_norm), r);
    if (g == 0.0) return 0.0;
    const double half_n = 0.5 * n;
    const double half_b = 0.5 * beta;
    using specfun::log_gamma;
    const double log_coef = log_gamma(half_n) - beta * std::log(2.0) - log_gamma(1.0 + half_b) -
                            log_gamma(half_n + half_b);
    return std::exp(log_coef + half_b * std::log(g));
}

double getoor_u(std::span<const double> x, double r, double beta)
{
    if (x.empty()) throw DomainError("dimension must be >= 1");
    return getoor_u(norm(x), r, beta, static_cast<int>(x.size()));
}

double mfet_stable_ball(std::span<const double> x, double r, const TemperedStableParams& clock, double beta)
{
    const double rate = mean_rate(clock);
    return rate * getoor_u(x, r, beta);
}

namespace {

void check_escape_args(double x, double r, double beta)
{
    if (!(beta > 0.0 && beta < 2.0)) throw DomainError("escape probability: beta must lie in (0, 2)");
    check_radius(std::abs(x), r);
}

}  // namespace

double escape_prob_interval(double x, double r, double beta)
{
    check_escape_args(x, r, beta);
    // y = r(2t - 1) maps the integral onto the incomplete beta function; the
    // prefactor cancels exactly.
    const double z = (x + r) / (2.0 * r);
    return specfun::reg_inc_beta(std::clamp(z, 0.0, 1.0), 0.5 * beta, 0.5 * beta);
}

double escape_prob_interval_quad(double x, double r, double beta, double rel_tol)
{
    check_escape_args(x, r, beta);
    if (x == -r) return 0.0;
    using specfun::log_gamma;
    const double p = 0.5 * beta - 1.0;
    const double log_coef = (1.0 - beta) * std::log(2.0 * r) + log_gamma(beta) - 2.0 * log_gamma(0.5 * beta);
    // Distances to the endpoints come from the quadrature so r + y does not
    // cancel at y -> -r. r - y stays accurate since hi = x.
    const specfun::EndpointIntegrand f = [r, p, x](double y, double d_lo, double d_hi) {
        const double right = (x == r) ? d_hi : r - y;
        return std::pow(d_lo * right, p);
    };
    const double integral = specfun::adaptive_quad(f, -r, x, specfun::QuadSpec{rel_tol, 14});
    return std::exp(log_coef) * integral;
}

double escape_prob_unit_interval(double x, double beta)
{
    return escape_prob_interval(x, 1.0, beta);
}

}  // namespace tempexit::analytic
