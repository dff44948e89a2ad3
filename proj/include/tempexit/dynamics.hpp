#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "tempexit/rng.hpp"

namespace tempexit {

// Open ball {|x| < radius} in R^dim, centered at the origin. dim = 1 is the
// interval (-radius, radius).
struct Domain {
    int dim = 1;
    double radius = 1.0;

    static Domain interval(double radius) { return Domain{1, radius}; }
    static Domain ball(int dim, double radius) { return Domain{dim, radius}; }

    void validate() const;
};

// Strict: points on the sphere |x| = radius count as exited.
bool contains(const Domain& d, std::span<const double> x);

// Brownian driver; scheme variance per step is 2 * eps * a * ds per coordinate.
struct GaussianDriver {
    double a = 1.0;
    double eps = 1.0;
};

// Isotropic symmetric beta-stable driver; a unit operational time of noise has
// characteristic function exp(-eps^beta |k|^beta).
struct StableDriver {
    double beta = 1.0;
    double eps = 1.0;
};

using Driver = std::variant<GaussianDriver, StableDriver>;

void validate(const Driver& drv);
bool is_stable(const Driver& drv);

class DriftField {
public:
    using Function = std::function<void(std::span<const double> x, std::span<double> out)>;

    DriftField() = default;  // zero field
    explicit DriftField(Function f) : f_(std::move(f)) {}

    static DriftField constant(std::vector<double> c);

    bool is_zero() const { return !f_; }
    void operator()(std::span<const double> x, std::span<double> out) const;

private:
    Function f_;
};

enum class ExitCheck {
    grid,    // exit when a grid point lands outside the domain
    bridge,  // additionally test for a Brownian-bridge crossing between grid points (Gaussian only)
};

struct TrajectoryOptions {
    std::uint64_t max_steps = 100'000'000;
    ExitCheck exit_check = ExitCheck::bridge;
};

enum class ExitStatus { exited, max_steps_exceeded };

struct ExitRecord {
    double s_exit = 0.0;          // operational exit time, steps * ds
    double t_exit = 0.0;          // physical clock at s_exit
    std::vector<double> landing;  // first position outside the domain
    std::uint64_t steps = 0;
    ExitStatus status = ExitStatus::exited;

    bool exited() const { return status == ExitStatus::exited; }
};

// Spatial outcome of a path simulated in operational time only.
struct PathRecord {
    std::vector<double> landing;
    std::uint64_t steps = 0;
    ExitStatus status = ExitStatus::exited;
};

// One Euler step in operational time, with all per-run constants precomputed.
class Stepper {
public:
    Stepper(int dim, double ds, DriftField drift, Driver driver);

    void step(std::span<double> x, RngStream& s);

    // Probability that a Brownian bridge between two interior grid points left
    // the domain. Zero for stable drivers.
    double bridge_crossing_probability(const Domain& d, std::span<const double> from,
                                       std::span<const double> to) const;

    double ds() const { return ds_; }

private:
    int dim_;
    double ds_;
    DriftField drift_;
    Driver driver_;
    bool stable_ = false;
    double beta_ = 2.0;
    double noise_scale_ = 0.0;   // sqrt(2 eps a ds) or eps ds^(1/beta)
    double bridge_denom_ = 0.0;  // eps a ds
    std::vector<double> drift_buf_;
};

std::vector<double> step(std::span<const double> x, double ds, const DriftField& drift,
                         const Driver& driver, RngStream& s);

// Simulate until the first grid position outside the domain. Does not touch
// any clock.
PathRecord run_path(std::span<const double> x0, const Domain& d, const DriftField& drift,
                    const Driver& driver, double ds, RngStream& s,
                    const TrajectoryOptions& opts = {});

// run_path followed by evaluation of the physical clock at the operational
// exit time, drawn from the same stream.
ExitRecord run_trajectory(std::span<const double> x0, const Domain& d, const DriftField& drift,
                          const Driver& driver, const TemperedStableParams& clock, double ds,
                          RngStream& s, const TrajectoryOptions& opts = {});

}  // namespace tempexit
