#include "tempexit/rng.hpp"

#include <cmath>
#include <numbers>

#include "tempexit/errors.hpp"

namespace tempexit {

namespace {

std::seed_seq derive_seed(std::uint64_t master_seed, std::uint64_t stream_index)
{
    const std::uint64_t k1 = mix64(master_seed);
    const std::uint64_t k2 = mix64(k1 ^ mix64(stream_index));
    return std::seed_seq{static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k1 >> 32),
                         static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32)};
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
{
    auto seq = derive_seed(master_seed, stream_index);
    engine_.seed(seq);
}

RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_index)
{
    return RngStream(master_seed, stream_index);
}

double RngStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open()
{
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential()
{
    return -std::log(uniform_open());
}

double RngStream::gaussian()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, q;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

void TemperedStableParams::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be finite and >= 0");
}

double sample_symmetric_stable(RngStream& s, double beta)
{
    if (!(beta > 0.0 && beta < 2.0)) throw DomainError("symmetric stable: beta must lie in (0, 2)");
    const double v = std::numbers::pi * (s.uniform_open() - 0.5);
    const double w = s.exponential();
    if (beta == 1.0) return std::tan(v);
    // sin(beta v) / cos(v)^(1/beta) * (cos((1-beta) v) / w)^((1-beta)/beta)
    const double log_tail = ((1.0 - beta) * (std::log(std::cos((1.0 - beta) * v)) - std::log(w)) -
                             std::log(std::cos(v))) / beta;
    return std::sin(beta * v) * std::exp(log_tail);
}

double sample_onesided_stable(RngStream& s, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("one-sided stable: alpha must lie in (0, 1)");
    const double u = std::numbers::pi * s.uniform_open();
    const double w = s.exponential();
    const double one_minus = 1.0 - alpha;
    // Kanter: X = (A(u) / W)^((1-alpha)/alpha), evaluated in log space since
    // the exponents blow up for small alpha.
    const double log_a = (alpha / one_minus) * std::log(std::sin(alpha * u)) +
                         std::log(std::sin(one_minus * u)) -
                         std::log(std::sin(u)) / one_minus;
    return std::exp((one_minus / alpha) * (log_a - std::log(w)));
}

TemperedDraw draw_tempered_onesided(RngStream& s, const TemperedStableParams& p, double ds)
{
    if (!(p.alpha > 0.0 && p.alpha < 1.0))
        throw DomainError("tempered one-sided stable: alpha must lie in (0, 1)");
    if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) throw DomainError("tempered one-sided stable: mu must be >= 0");
    if (!(ds > 0.0) || !std::isfinite(ds)) throw DomainError("tempered one-sided stable: ds must be positive");

    const double scale = std::pow(ds, 1.0 / p.alpha);
    TemperedDraw draw;
    for (;;) {
        ++draw.proposals;
        const double y = scale * sample_onesided_stable(s, p.alpha);
        if (p.mu == 0.0 || s.uniform() < std::exp(-p.mu * y)) {
            draw.value = y;
            return draw;
        }
    }
}

double sample_tempered_onesided(RngStream& s, const TemperedStableParams& p, double ds)
{
    return draw_tempered_onesided(s, p, ds).value;
}

}  // namespace tempexit
