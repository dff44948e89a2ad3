#include "tempexit/subordinator.hpp"

#include <cmath>

#include "tempexit/errors.hpp"

namespace tempexit {

ClockState advance(ClockState state, double ds, const TemperedStableParams& p, RngStream& s)
{
    p.validate();
    if (!(ds > 0.0) || !std::isfinite(ds)) throw DomainError("advance: ds must be positive");

    state.operational_time += ds;
    if (p.degenerate()) {
        state.physical_time += ds;
        return state;
    }

    const double load = ds * std::pow(p.mu, p.alpha);
    const auto pieces = load > 1.0 ? static_cast<long long>(std::ceil(load)) : 1LL;
    const double piece = ds / static_cast<double>(pieces);
    for (long long i = 0; i < pieces; ++i)
        state.physical_time += sample_tempered_onesided(s, p, piece);
    return state;
}

double mean_rate(const TemperedStableParams& p)
{
    p.validate();
    if (p.degenerate()) return 1.0;
    if (p.mu == 0.0)
        throw DivergenceError("mean first exit time is infinite for an untempered clock (mu = 0, alpha < 1)");
    return p.alpha * std::pow(p.mu, p.alpha - 1.0);
}

}  // namespace tempexit
