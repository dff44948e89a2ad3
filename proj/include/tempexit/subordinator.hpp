#pragma once

#include "tempexit/rng.hpp"

namespace tempexit {

// Physical clock T(s) of the subordinated process, tracked together with the
// operational time s at which it was evaluated.
struct ClockState {
    double physical_time = 0.0;
    double operational_time = 0.0;
};

// Advance the clock by operational duration ds. For alpha = 1 the clock is
// deterministic (T(s) = s). Otherwise the increment is a tempered one-sided
// stable draw; long durations are split into independent pieces with
// piece * mu^alpha <= 1 so the rejection sampler keeps an acceptance rate of at
// least 1/e. The split is exact in law because T has independent stationary
// increments.
ClockState advance(ClockState state, double ds, const TemperedStableParams& p, RngStream& s);

// psi'(0) = alpha mu^(alpha - 1): mean physical time per unit operational time.
// Returns 1 for alpha = 1; throws DivergenceError for mu = 0 with alpha < 1.
double mean_rate(const TemperedStableParams& p);

}  // namespace tempexit
