#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gouflow/gou_process.hpp"

namespace gouflow {

/// A forward driver (U, L) together with its dual driver (W, K).
struct DualPair {
    LevyModel2 forward;
    LevyModel2 dual;
    ModelFlags flags;
    std::optional<double> degenerate_k;
};

/// Throws ConditionViolation unless ΔU > -1 almost surely.
DualPair make_dual_pair(const LevyModel2& model);

struct DualSolution {
    GouTrajectory trajectory;  ///< R^y via the (W, K) driver
    /// Largest mixed absolute/relative gap between the (W, K) route and
    /// E(W)(y - ∫ E(W)_{s-}^{-1} dL_s), over all event times.
    double route_discrepancy = 0.0;
};

/// Dual GOU process R^y on the same (U, L) path, computed two ways.
DualSolution dual_solve(const SamplePath& path, const LevyModel2& model, double y);

/// max(R, 0) at every event. Requires L to be a subordinator, ΔU > -1 and
/// y >= 0.
AlignedSeries killed_dual(const GouTrajectory& r, double y, const ModelFlags& flags);

/// R * 1{s < τ_R(y)}: the killed process written with its stopping time.
AlignedSeries killed_by_stopping(const GouTrajectory& r);

struct HitRecord {
    bool hit = false;
    double time = 0.0;       ///< first passage time, when hit
    double overshoot = 0.0;  ///< V at the first passage time, <= level
    /// Index of the event during which the level is reached; empty when the
    /// start value is already at or below it.
    std::optional<std::size_t> event;
};

/// First time the trajectory is <= level. Exact-backend segments are solved
/// in closed form; on the Euler backend the first grid or jump time with
/// V <= level is reported.
HitRecord hitting_time(const GouTrajectory& traj, double level = 0.0);

/// hitting_time() of V^start (or R^start when `dual`) on a freshly sampled
/// path of horizon `horizon`, evaluated while the path is generated and
/// stopped at the hit. Up to the hit the path is the one sample_path()
/// would draw from `rng`; `event` is left empty.
HitRecord sample_hitting_time(const LevyModel2& model, double start, double horizon, Backend backend,
                              double grid_dt, RandomStream& rng, bool dual, double level = 0.0);

struct RunOptions {
    Backend backend = Backend::exact;
    double grid_dt = 1e-3;
    unsigned workers = 1;
    double diagnostic_tolerance = 1e-8;
};

struct HittingResult {
    double horizon = 0.0;
    std::vector<HitRecord> records;
    std::size_t hits = 0;
    double estimate = 0.0;  ///< P(τ <= T)
    double se = 0.0;
    Interval ci;
    /// Right-hand side of the invoked identity and its standard error.
    double companion = 0.0;
    double companion_se = 0.0;
    double discrepancy = 0.0;
    double diagnostic_failure_fraction = 0.0;
    std::vector<std::string> warnings;
};

/// P(τ_R(y) <= T) for the dual R^y against P(V_∞ >= y) from an independent
/// causal stationary sample: the subordinator ruin identity. Hypotheses
/// (ΔU > -1, L a subordinator, y >= 0) are checked; missing ones throw
/// ConditionViolation.
HittingResult ruin_probability(const LevyModel2& model, double y, double horizon, std::size_t n,
                               std::uint64_t seed, const RunOptions& options = {});

/// P(τ(x) <= T) for the forward V^x against H(-x) = P(R_∞ >= x) from an
/// independent noncausal stationary sample.
HittingResult forward_ruin_probability(const LevyModel2& model, double x, double horizon, std::size_t n,
                                       std::uint64_t seed, const RunOptions& options = {});

struct RuinIdentityReport {
    double x = 0.0;
    double hit_fraction = 0.0;      ///< P(τ(x) <= T)
    double conditional_term = 0.0;  ///< E[H(-V_τ) | τ <= T], 0 without hits
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;  ///< H(-x)
    double rhs_se = 0.0;
    double diff_se = 0.0;
    double z = 0.0;
    bool pass = false;
    double diagnostic_failure_fraction = 0.0;
};

/// Both sides of P(τ(x) < ∞) E[H(-V_τ) | τ(x) < ∞] = H(-x), with H the
/// law of ∫_0^∞ E(U)_{s-}^{-1} dη_s estimated from n noncausal samples and
/// the left side from n independent forward paths. Both sides share the H
/// sample, so the test uses a joint bootstrap standard error of lhs - rhs:
/// pass means |lhs - rhs| <= z_crit * se_diff.
/// Refuses (ConditionViolation) when H is degenerate or when the noncausal
/// integral fails the truncation diagnostic (E(U)^{-1} does not vanish).
RuinIdentityReport verify_ruin_identity(const LevyModel2& model, double x, double horizon, std::size_t n,
                                        std::uint64_t seed, const RunOptions& options = {},
                                        double z_crit = 3.29, int bootstrap_replicates = 100);

struct MonotonicityReport {
    double t = 0.0;
    double y = 0.0;
    std::vector<double> xs;
    std::vector<double> probabilities;  ///< P(V_t^x >= y) per x
    std::vector<double> standard_errors;
    std::size_t coupled_violations = 0;  ///< paths with 1{V^{x_i} >= y} > 1{V^{x_j} >= y}, x_i < x_j
    double max_violation_z = 0.0;        ///< largest paired z-score of p(x_i) - p(x_j), x_i < x_j
    bool monotone = true;                ///< no coupled violations
};

/// Estimates x -> P(V_t^x >= y) on shared paths (common random numbers).
MonotonicityReport monotonicity_probe(const LevyModel2& model, double t, double y, std::vector<double> xs,
                                      std::size_t n, std::uint64_t seed, const RunOptions& options = {});

struct DualityRow {
    std::string relation;  ///< "dual", "symmetric" or "killed"
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double p_v = 0.0;
    double se_v = 0.0;
    double p_r = 0.0;
    double se_r = 0.0;
    double z = 0.0;
    bool pass = false;
};

struct DualityGrid {
    std::vector<double> ts{0.5, 1.0, 2.0};
    std::vector<double> xs{-1.0, 0.0, 1.0};
    std::vector<double> ys{-1.0, 0.0, 1.0};
};

struct DualityReport {
    std::vector<DualityRow> rows;
    std::size_t failures = 0;
    bool pass() const noexcept { return failures == 0; }
};

/// Siegmund duality P(V_t^x >= y) = P(R_t^y <= x) on every grid probe with
/// independent samples for the two sides, plus the symmetric relation
/// P(R_t^y >= x) = P(V_t^x <= y). When L is a subordinator the killed dual
/// is checked as well for x, y >= 0.
DualityReport duality_probe(const LevyModel2& model, const DualityGrid& grid, std::size_t n, std::uint64_t seed,
                            const RunOptions& options = {}, double z_crit = 3.29);

void write_csv(std::ostream& os, const DualityReport& report);

}  // namespace gouflow
