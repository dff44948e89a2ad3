#include "tempexit/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tempexit/errors.hpp"

namespace tempexit::specfun {

double log_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("log_gamma: argument must be positive and finite");
#if defined(__GLIBC__)
    // lgamma_r does not touch the global signgam, so this stays reentrant.
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

double log_beta(double a, double b)
{
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double z, double a, double b)
{
    constexpr int max_iter = 2000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * z / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw ConvergenceError("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double z, double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("reg_inc_beta: shape parameters must be positive");
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("reg_inc_beta: z must lie in [0, 1]");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return 1.0;

    const double log_front = a * std::log(z) + b * std::log1p(-z) - log_beta(a, b);
    if (z < (a + 1.0) / (a + b + 2.0))
        return std::exp(log_front) * beta_continued_fraction(z, a, b) / a;
    return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - z, b, a) / b;
}

double adaptive_quad(const std::function<double(double)>& f, double lo, double hi,
                     const QuadSpec& spec)
{
    return adaptive_quad(EndpointIntegrand([&f](double x, double, double) { return f(x); }),
                         lo, hi, spec);
}

double adaptive_quad(const EndpointIntegrand& f, double lo, double hi, const QuadSpec& spec)
{
    if (!(spec.rel_tol > 0.0) || spec.max_depth < 1)
        throw DomainError("adaptive_quad: invalid QuadSpec");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw DomainError("adaptive_quad: need finite lo < hi");

    constexpr double t_max = 6.5;
    constexpr double half_pi = std::numbers::pi / 2.0;
    const double half = 0.5 * (hi - lo);

    // Contribution of the node at parameter t, weight included.
    auto node = [&](double t) -> double {
        const double u = half_pi * std::sinh(t);
        const double cu = std::cosh(u);
        const double w = half * half_pi * std::cosh(t) / (cu * cu);
        if (!(w > 0.0) || !std::isfinite(w)) return 0.0;
        const double d_hi = half * 2.0 / (std::exp(2.0 * u) + 1.0);
        const double d_lo = half * 2.0 / (std::exp(-2.0 * u) + 1.0);
        if (!(d_hi > 0.0) || !(d_lo > 0.0)) return 0.0;
        const double x = (u > 0.0) ? hi - d_hi : lo + d_lo;
        return w * f(x, d_lo, d_hi);
    };

    double h = 1.0;
    double sum = node(0.0);
    for (int k = 1; k * h <= t_max; ++k) sum += node(k * h) + node(-k * h);
    double estimate = h * sum;

    for (int level = 1; level <= spec.max_depth; ++level) {
        h *= 0.5;
        for (int k = 1; k * h <= t_max; k += 2) sum += node(k * h) + node(-k * h);
        const double refined = h * sum;
        const double diff = std::abs(refined - estimate);
        estimate = refined;
        if (level >= 2 && diff <= spec.rel_tol * std::abs(refined)) return refined;
    }
    throw ConvergenceError("adaptive_quad: tolerance " + std::to_string(spec.rel_tol) +
                           " not reached within max_depth");
}

}  // namespace tempexit::specfun
