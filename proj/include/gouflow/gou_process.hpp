#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gouflow/levy_model.hpp"
#include "gouflow/path.hpp"
#include "gouflow/stats.hpp"
#include "gouflow/stochastic_calculus.hpp"

namespace gouflow {

/// One solution path of dV = V_- dX + dZ, aligned to the events of its
/// driving path.
struct GouTrajectory {
    double x = 0.0;
    Backend backend = Backend::exact;
    AlignedSeries exponential;  ///< E(X)
    AlignedSeries integral;     ///< ∫ E(X)_{s-}^{-1} dY_s (explicit form only)
    AlignedSeries value;        ///< V
    /// Per event: dX/dt and dZ/dt across exact-backend segments (zero for
    /// jumps and Euler steps). Inside such a segment V solves the linear
    /// ODE V' = rate * V + forcing, which gives hitting times in closed form.
    std::vector<double> rate;
    std::vector<double> forcing;

    double terminal() const noexcept { return value.terminal(); }
};

/// V = E(X)(x + ∫ E(X)_{s-}^{-1} dY) for a path carrying (X, Y), where Y is
/// the η-transform of the forcing. V is propagated event by event with the
/// same multipliers as E(X), which is algebraically identical to the
/// product form and keeps the constant solution of a degenerate pair exact.
GouTrajectory explicit_solution(const EventPath& driver_eta, double x);

/// Direct SDE recursion for a path carrying (X, Z): V(1 + ΔX) + ΔZ at jumps,
/// the exact affine flow across exact-backend segments, and the Euler step
/// V(1 + dX) + dZ across Euler segments.
GouTrajectory solve_sde_on_path(const EventPath& driver_forcing, double x);

/// GOU solution of a sampled (U, L) path through its η transform.
GouTrajectory solve_forward(const SamplePath& path, const LevyModel2& model, double x);

/// Sample an Euler path of the model and run the jump-adapted Euler scheme.
GouTrajectory solve_sde_euler(const LevyModel2& model, double x, double horizon, double grid_dt,
                              RandomStream& rng);

/// Affine map x -> slope * x + intercept.
struct AffineMap {
    double slope = 1.0;
    double intercept = 0.0;

    double operator()(double x) const noexcept { return slope * x + intercept; }
};

/// Consumes the events of a (U, L) path one at a time and keeps the flow
/// x -> V^x of the forward GOU process, or of its dual R^y when `dual`.
/// Each step uses the same arithmetic as explicit_solution() on the
/// corresponding derived path, so no event list needs to be stored.
class FlowAccumulator {
  public:
    FlowAccumulator(const LevyModel2& model, Backend backend, bool dual);

    /// Advance across one (U, L) event. Returns the (X, η) event that was
    /// applied, X being U or W.
    Event push(const Event& ul);
    const AffineMap& map() const noexcept { return map_; }

  private:
    Backend backend_;
    bool dual_;
    double s_uu_;
    double s_ul_;
    AffineMap map_;
};

/// Terminal flow x -> V_T^x (or y -> R_T^y when `dual`) on a freshly
/// sampled path. Draws from `rng` exactly like sample_path(), so it matches
/// solve_forward() / dual_solve() on the same stream up to rounding.
AffineMap sample_terminal_map(const LevyModel2& model, double horizon, Backend backend, double grid_dt,
                              RandomStream& rng, bool dual = false);

enum class FunctionalKind { causal, noncausal };

const char* to_string(FunctionalKind k) noexcept;

struct FunctionalSample {
    double value = 0.0;
    /// |E(U)_T| (causal) or |E(U)_T^{-1}| (noncausal): how far the
    /// truncated integral is from its limit.
    double diagnostic = 0.0;
};

/// Causal ∫_{(0,T]} E(U)_{s-} dL_s or noncausal -∫_{(0,T]} E(U)_{s-}^{-1} dη_s
/// along a given path.
FunctionalSample exp_functional(const SamplePath& path, const LevyModel2& model, FunctionalKind kind);

FunctionalSample exp_functional(const LevyModel2& model, FunctionalKind kind, double horizon, Backend backend,
                                double grid_dt, RandomStream& rng);

struct SamplerOptions {
    Backend backend = Backend::exact;
    double grid_dt = 1e-3;
    double tolerance = 1e-8;        ///< diagnostic threshold per path
    double max_failure_fraction = 0.05;
    unsigned workers = 1;
};

struct StationarySample {
    EmpiricalDistribution law;
    double failure_fraction = 0.0;
    bool flagged = false;  ///< more than max_failure_fraction of paths failed the diagnostic
};

/// n independent truncated exponential functionals; path i draws from
/// stream (seed, i).
StationarySample stationary_sampler(const LevyModel2& model, FunctionalKind kind, std::size_t n, double horizon,
                                    std::uint64_t seed, const SamplerOptions& options = {});

/// Gamma law of 2 b_L / (σ_U² V_∞) when (U, L) has no jumps, L = b_L t with
/// b_L > 0 and ξ = -U + σ_U² t/2 drifts to +∞: then V_∞ is b_L times the
/// perpetuity ∫ e^{-ξ_s} ds of Brownian motion with drift.
struct InverseGammaLaw {
    double shape = 0.0;
    double scale = 0.0;  ///< V_∞ = scale / G with G ~ Gamma(shape, 1)

    double cdf(double v) const;
};

/// The closed-form causal stationary law above, when the model has that form.
std::optional<InverseGammaLaw> brownian_perpetuity_law(const LevyModel2& model);

}  // namespace gouflow
