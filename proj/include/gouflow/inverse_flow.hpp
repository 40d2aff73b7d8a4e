#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gouflow/gou_process.hpp"

namespace gouflow {

/// The process transporting V backward from time t, built on one forward
/// path of (U, L).
struct InverseFlow {
    double t = 0.0;
    DerivedPath reversed;   ///< (Ũ, L̃), time-reversal at t
    DerivedPath t_driver;   ///< (T, L̃)
    DerivedPath eta_tilde;  ///< (Ũ, η̃)
    GouTrajectory r;        ///< R^y = E(T)(y + ∫ E(T)_{u-}^{-1} dL̃_u)
    /// Largest mixed gap between r and the solution of dR = R_- dT + dη̃.
    /// Zero up to rounding on the exact backend, O(grid_dt) on Euler.
    double sde_residual = 0.0;
    /// Largest mixed gap between η̃ from (Ũ, L̃) and the reversal of η.
    double eta_tilde_discrepancy = 0.0;
};

/// Restriction of a path to [0, t] with a jump exactly at t removed, the
/// convention under which the reversal at t is taken.
EventPath restrict_to(const EventPath& path, double t);

/// Inverse flow on [0, t] started at y. Needs ΔU != -1 on the path.
InverseFlow inverse_flow_solve(const SamplePath& path, const LevyModel2& model, double t, double y);

struct PathwiseIdentityReport {
    double x = 0.0;
    double t = 0.0;
    double v_t = 0.0;
    double max_error = 0.0;  ///< max over events of |lhs - rhs| / max(1, |lhs|)
    std::size_t checked = 0;
};

/// Runs the inverse flow from y = V_t^x and compares it with the forward
/// solution read backward: after the j-th reversed event R must equal V
/// just before the matching forward event, at jump times as well.
PathwiseIdentityReport verify_pathwise_identity(const SamplePath& path, const LevyModel2& model, double x, double t);

/// φ_{u,t}: V_u -> V_t = slope * V_u + intercept on one path.
struct FlowMap {
    double u = 0.0;
    double t = 0.0;
    double slope = 1.0;
    double intercept = 0.0;

    double apply(double x) const noexcept { return slope * x + intercept; }
    /// Throws std::domain_error for a zero slope.
    double inverse(double y) const;
};

/// (φ_{s,t} ∘ φ_{u,s}) = φ_{u,t}; throws std::invalid_argument unless
/// `later` starts where `earlier` ends.
FlowMap compose(const FlowMap& later, const FlowMap& earlier);

/// φ_{u,t} on a path: jumps in (u, t] are applied, one exactly at u is not.
FlowMap flow_map(const SamplePath& path, const LevyModel2& model, double u, double t);

/// Value of the trajectory at time s, or its left limit when `left`.
/// Exact-backend segments are evaluated in closed form; inside an Euler step
/// the value at the start of the step is returned.
double state_at(const GouTrajectory& traj, double s, bool left = false);

struct FlowInverseReport {
    FlowMap map;
    double flow_inverse = 0.0;  ///< φ_{u,t}^{-1}(y)
    double r_left = 0.0;        ///< R_{(t-u)-}^y of the inverse flow
    double error = 0.0;         ///< mixed absolute/relative gap
};

/// Compares φ_{u,t}^{-1}(y) with R_{(t-u)-}^y. Requires ΔU > -1 so that
/// the flow is strictly increasing.
FlowInverseReport flow_inverse_check(const SamplePath& path, const LevyModel2& model, double u, double t, double y);

struct VerificationRow {
    std::uint64_t seed = 0;
    std::uint64_t path = 0;
    double t = 0.0;
    double x = 0.0;
    double max_error = 0.0;
    Backend backend = Backend::exact;
    double grid_dt = 0.0;
};

/// Columns: seed, path, t, x, max_error, backend, grid_dt.
void write_csv(std::ostream& os, const std::vector<VerificationRow>& rows);

}  // namespace gouflow
