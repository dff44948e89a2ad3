#pragma once

#include <functional>

namespace tempexit::specfun {

struct QuadSpec {
    double rel_tol = 1e-12;
    int max_depth = 12;  // number of step-halving levels
};

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// ln B(a, b).
double log_beta(double a, double b);

// Regularized incomplete beta function I_z(a, b).
double reg_inc_beta(double z, double a, double b);

// Integrand that also receives the distances to the two endpoints, computed
// without cancellation: f(x, x - lo, hi - x). Use this form when the
// integrand is singular at an endpoint that is not exactly representable
// near zero (e.g. (hi - x)^p for hi != 0).
using EndpointIntegrand = std::function<double(double, double, double)>;

// Double-exponential (tanh-sinh) quadrature over (lo, hi). Nodes never touch
// the endpoints, so integrable singularities (x-lo)^p, (hi-x)^p with p > -1
// are allowed. Throws ConvergenceError when max_depth levels do not reach
// rel_tol.
double adaptive_quad(const std::function<double(double)>& f, double lo, double hi,
                     const QuadSpec& spec = {});
double adaptive_quad(const EndpointIntegrand& f, double lo, double hi,
                     const QuadSpec& spec = {});

}  // namespace tempexit::specfun
