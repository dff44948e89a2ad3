#pragma once

#include <span>
#include <vector>

#include "tempexit/rng.hpp"

namespace tempexit::analytic {

// Closed-form exit statistics for domains centered at the origin with zero
// drift. MFET values are in physical time; functions taking clock parameters
// throw DivergenceError for mu = 0 with alpha < 1.

// alpha mu^(alpha-1) (r^2 - x^2) / 2, Brownian driver with eps = a = 1.
double mfet_gaussian_1d(double x, double r, const TemperedStableParams& clock);

// alpha mu^(alpha-1) (r^2 - |x|^2) / (2n).
double mfet_gaussian_ball(std::span<const double> x, double r, const TemperedStableParams& clock);

// Expected exit time from the ball of radius r for the isotropic beta-stable
// process with characteristic function exp(-t|k|^beta), 0 < beta <= 2:
// Gamma(n/2) (r^2 - |x|^2)^(beta/2) / (2^beta Gamma(1 + beta/2) Gamma(n/2 + beta/2)).
double getoor_u(double x_norm, double r, double beta, int n);
double getoor_u(std::span<const double> x, double r, double beta);

// mean_rate(clock) * getoor_u.
double mfet_stable_ball(std::span<const double> x, double r, const TemperedStableParams& clock,
                        double beta);

// P(first landing in [r, inf)) from x in (-r, r), via I_{(x+r)/2r}(beta/2, beta/2).
double escape_prob_interval(double x, double r, double beta);

// Same quantity by direct quadrature of
// (2r)^(1-beta) Gamma(beta) / Gamma(beta/2)^2 * int_{-r}^{x} (r^2 - y^2)^(beta/2 - 1) dy.
double escape_prob_interval_quad(double x, double r, double beta, double rel_tol = 1e-12);

// D = (-1, 1), E = [1, inf).
double escape_prob_unit_interval(double x, double beta);

}  // namespace tempexit::analytic
