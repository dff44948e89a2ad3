#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tempexit/dynamics.hpp"
#include "tempexit/rng.hpp"

namespace tempexit {

// One-pass (Welford) mean and unbiased variance.
struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_error() const;
};

RunningStats accumulate(RunningStats state, double sample);

enum class EstimateKind { physical_mfet, operational_mfet, escape_prob };

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t count = 0;
    EstimateKind kind = EstimateKind::physical_mfet;
};

MCEstimate to_estimate(const RunningStats& stats, EstimateKind kind);
// Bernoulli estimate with std_error = sqrt(p(1-p)/count).
MCEstimate bernoulli_estimate(std::uint64_t successes, std::uint64_t count);

// Ratio of means t/s with delta-method standard error.
struct RatioEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct MfetEstimate {
    MCEstimate physical;
    MCEstimate operational;
    RatioEstimate ratio;
    std::uint64_t n_traj = 0;
    std::uint64_t censored = 0;  // trajectories that hit max_steps, excluded above
};

struct EscapeEstimate {
    MCEstimate probability;
    std::uint64_t n_traj = 0;
    std::uint64_t censored = 0;
};

// Raised when more than EnsembleOptions::censor_threshold of the trajectories
// were censored. Carries the (biased) estimate for reporting.
class CensoringError : public std::runtime_error {
public:
    CensoringError(const std::string& what, std::uint64_t censored, std::uint64_t n_traj)
        : std::runtime_error(what), censored_(censored), n_traj_(n_traj) {}
    std::uint64_t censored() const { return censored_; }
    std::uint64_t n_traj() const { return n_traj_; }

private:
    std::uint64_t censored_;
    std::uint64_t n_traj_;
};

struct EnsembleOptions {
    unsigned workers = 0;  // 0: hardware concurrency
    TrajectoryOptions trajectory;
    double censor_threshold = 1e-3;
};

// Subset of the domain complement that counts as a hit for escape estimates.
class TargetSet {
public:
    enum class Kind { half_line_right, half_line_left, complement, predicate };
    using Predicate = std::function<bool(std::span<const double>)>;

    // [threshold, inf); threshold >= r for the paired interval.
    static TargetSet half_line_right(double threshold);
    // (-inf, threshold]; threshold <= -r for the paired interval.
    static TargetSet half_line_left(double threshold);
    // All of D^c.
    static TargetSet complement();
    static TargetSet custom(Predicate p);

    Kind kind() const { return kind_; }
    double threshold() const { return threshold_; }
    bool contains(std::span<const double> landing) const;
    // Throws DomainError unless the target is a subset of the domain complement.
    void validate_against(const Domain& d) const;

private:
    Kind kind_ = Kind::complement;
    double threshold_ = 0.0;
    Predicate pred_;
};

// Trajectory i runs on stream (master_seed, i); per-trajectory results are
// reduced in index order, so the output does not depend on the worker count.
MfetEstimate estimate_mfet(std::span<const double> x0, const Domain& domain, const DriftField& drift,
                           const Driver& driver, const TemperedStableParams& clock, double ds,
                           std::uint64_t n_traj, std::uint64_t master_seed,
                           const EnsembleOptions& opts = {});

// Operational time only; the clock is never sampled.
EscapeEstimate estimate_escape(std::span<const double> x0, const Domain& domain, const TargetSet& target,
                               const Driver& driver, double ds, std::uint64_t n_traj,
                               std::uint64_t master_seed, const EnsembleOptions& opts = {});

struct CompareReport {
    double analytic = 0.0;
    MCEstimate estimate;
    double z = 0.0;
    double rel_err = 0.0;
    bool pass = false;
};

// pass <=> |z| <= z_max or rel_err <= rel_tol.
CompareReport compare(const MCEstimate& estimate, double analytic, double rel_tol, double z_max = 3.0);

// Run body(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t)>& body);

}  // namespace tempexit
