#pragma once

#include <cstdint>
#include <random>

namespace tempexit {

// Per-trajectory random stream. The state is a pure function of
// (master_seed, stream_index), so any trajectory can be replayed in isolation.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1).
    double uniform_open();
    // Standard exponential.
    double exponential();
    // Standard normal (Marsaglia polar method, spare value cached in the stream).
    double gaussian();

    std::uint64_t next_u64() { return engine_(); }

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_index);

// 64-bit avalanche mix (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct TemperedStableParams {
    double alpha = 1.0;  // stability index, 0 < alpha <= 1
    double mu = 0.0;     // tempering rate, mu >= 0

    // Throws DomainError unless 0 < alpha <= 1 and mu >= 0.
    void validate() const;
    bool degenerate() const { return alpha == 1.0; }
};

// Symmetric beta-stable variate with characteristic function exp(-|k|^beta),
// 0 < beta < 2 (Chambers-Mallows-Stuck).
double sample_symmetric_stable(RngStream& s, double beta);

// Positive alpha-stable variate with Laplace transform exp(-lambda^alpha),
// 0 < alpha < 1 (Kanter's representation).
double sample_onesided_stable(RngStream& s, double alpha);

struct TemperedDraw {
    double value = 0.0;
    std::uint64_t proposals = 0;
};

// Tempered one-sided stable increment over operational duration ds, with
// Laplace transform exp(-ds((lambda + mu)^alpha - mu^alpha)). Exponential
// tilting by rejection; the expected acceptance rate is exp(-ds mu^alpha).
TemperedDraw draw_tempered_onesided(RngStream& s, const TemperedStableParams& p, double ds);
double sample_tempered_onesided(RngStream& s, const TemperedStableParams& p, double ds);

}  // namespace tempexit
