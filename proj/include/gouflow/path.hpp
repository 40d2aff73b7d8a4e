#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gouflow/levy_model.hpp"
#include "gouflow/random.hpp"

namespace gouflow {

enum class Backend { exact, euler };

const char* to_string(Backend b) noexcept;

enum class EventKind { segment, jump };

/// One step of a jump-adapted path of a bivariate process (X1, X2).
///
/// A segment covers [time, time + dt) and carries the continuous increments
/// (pure drift on the exact backend, drift plus Gaussian on the Euler grid).
/// A jump happens at `time` and carries (ΔX1, ΔX2); its dt is zero.
struct Event {
    EventKind kind = EventKind::segment;
    double time = 0.0;
    double dt = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    bool is_jump() const noexcept { return kind == EventKind::jump; }
    double end_time() const noexcept { return time + dt; }
    double increment(int component) const noexcept { return component == 0 ? d1 : d2; }
    friend bool operator==(const Event&, const Event&) = default;
};

/// Covariance per unit time of the continuous parts of (X1, X2).
struct GaussianPart {
    double var1 = 0.0;
    double cov12 = 0.0;
    double var2 = 0.0;
    friend bool operator==(const GaussianPart&, const GaussianPart&) = default;
};

/// Realized trajectory of a bivariate process on [0, horizon] as an ordered
/// event list. Sampled paths carry (U, L); derived paths carry the transform
/// named in `transform`, e.g. "U,eta" or "T,L~".
///
/// Event times are recomputed as cumulative sums of segment lengths, so a
/// path rebuilt from the same segments has bitwise identical times.
struct EventPath {
    double horizon = 0.0;
    Backend backend = Backend::exact;
    GaussianPart gaussian;
    double grid_dt = 0.0;
    std::string transform = "U,L";
    std::vector<Event> events;

    std::size_t jump_count() const noexcept;
    /// Sum of all increments of one component, X_horizon - X_0.
    double terminal(int component) const noexcept;
    /// X_s (or X_{s-} when `left`) for s in [0, horizon]. Segment
    /// increments are interpolated linearly inside a segment.
    double value_at(int component, double s, bool left = false) const;
};

using SamplePath = EventPath;
using DerivedPath = EventPath;

/// Sample (U, L) on [0, horizon]. Jump arrivals form a Poisson process with
/// the model intensity; every gap becomes one drift segment (exact) or is
/// split into ceil(gap / grid_dt) equal steps with correlated Gaussian
/// increments (Euler). The result is a function of (model, horizon,
/// backend, grid_dt) and the state of `rng` only.
SamplePath sample_path(const LevyModel2& model, double horizon, Backend backend, double grid_dt,
                       RandomStream& rng);

/// Emit the events sample_path() would produce, in order and with the same
/// times, without storing them. Consumes `rng` identically.
void sample_events(const LevyModel2& model, double horizon, Backend backend, double grid_dt, RandomStream& rng,
                   const std::function<void(const Event&)>& sink);

/// sample_events() that stops drawing as soon as `sink` returns false.
/// Returns false when stopped early; up to that point the events and the
/// draws are those of sample_events().
bool sample_events_until(const LevyModel2& model, double horizon, Backend backend, double grid_dt,
                         RandomStream& rng, const std::function<bool(const Event&)>& sink);

/// (U, L) -> (U, η) with Δη = ΔL/(1+ΔU) and continuous part dL - σ_{U,L} dt.
/// This overload takes σ_{U,L} from the path's Gaussian part.
DerivedPath eta_path(const EventPath& path);
DerivedPath eta_path(const EventPath& path, const LevyModel2& model);

/// (U, L) -> (W, L) with ΔW = -ΔU/(1+ΔU) and continuous part -dU + σ_U² dt.
DerivedPath w_path(const EventPath& path);

/// (U, L) -> (W, K) with K = -η: the driver of the Siegmund dual.
DerivedPath dual_driver_path(const EventPath& path);

/// (U, Y) -> (ξ, Y) with ξ = -log E(U): Δξ = -log(1+ΔU), continuous part
/// -dU + σ_U² dt/2. Requires every ΔU > -1.
DerivedPath xi_path(const EventPath& path);

/// (ξ, η) -> (U, L): ΔU = e^{-Δξ} - 1, ΔL = e^{-Δξ} Δη, continuous parts
/// dU = -dξ + σ_ξ² dt/2 and dL = dη - σ_{ξ,η} dt.
DerivedPath recover_ul_from_xi_eta(const EventPath& xi_eta, double sigma_xi_sq, double sigma_xi_eta);

/// Restriction to (from, to], re-based to start at time 0. Segments that
/// straddle a cut are split proportionally; a jump exactly at `from` is
/// excluded and one exactly at `to` is kept.
EventPath slice_path(const EventPath& path, double from, double to);

/// Time reversal at `at`: X̃_s = X_{(at-s)-} - X_{at-}. Events after `at`
/// are dropped, a segment straddling `at` is cut proportionally and a jump
/// exactly at `at` is deleted. The remaining events are emitted in reverse
/// order with negated increments, so reversing twice at the same time
/// restores the event list exactly.
DerivedPath reverse_path(const EventPath& path, double at);

/// (Ũ, Y) -> (T, Y) with ΔT = ΔŨ/(1-ΔŨ) and continuous part dŨ + σ_U² dt.
DerivedPath t_path(const EventPath& reversed, double sigma_u_sq);

/// (Ũ, L̃) -> (Ũ, η̃) with Δη̃ = ΔL̃/(1-ΔŨ) and continuous part dL̃ + σ_{U,L} dt.
DerivedPath eta_tilde_path(const EventPath& reversed, double sigma_ul);

/// Pair component `ca` of `a` with component `cb` of `b`. Both paths must
/// share the event skeleton (same kinds, times and lengths).
DerivedPath combine(const EventPath& a, int ca, const EventPath& b, int cb, double cov12,
                    std::string transform);

/// Merge runs of consecutive segments between jumps in groups of `factor`.
EventPath coarsen(const EventPath& path, int factor);

/// Throws std::invalid_argument when the event list is inconsistent.
void validate(const EventPath& path);

/// True when both paths have the same kinds, times and lengths.
bool same_skeleton(const EventPath& a, const EventPath& b) noexcept;

/// Debug dump: one row per event (time, kind, d1, d2).
void write_csv(std::ostream& os, const EventPath& path);

}  // namespace gouflow
