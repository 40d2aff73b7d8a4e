#pragma once

#include <optional>
#include <vector>

#include "gouflow/path.hpp"

namespace gouflow {

/// Value of a process at the end of each event of a path, with the value
/// just before the event kept alongside.
struct AlignedPoint {
    double time = 0.0;   ///< end time of the event
    double left = 0.0;   ///< value before the event (left limit at a jump)
    double value = 0.0;  ///< value after the event
    /// log(value / left) across an exact-backend segment when the series
    /// grows exponentially inside it; zero otherwise.
    double log_growth = 0.0;
};

struct AlignedSeries {
    Backend backend = Backend::exact;
    double initial = 0.0;
    std::vector<AlignedPoint> points;

    double terminal() const noexcept { return points.empty() ? initial : points.back().value; }
};

/// (e^z - 1)/z, continuous at z = 0.
double phi1(double z) noexcept;

/// E(X) for component `component` of the path. Multiplies by (1 + ΔX) at
/// jumps and by e^{dX - σ² dt/2} across segments, σ² taken from the path's
/// Gaussian part. Throws ConditionViolation at a jump of size -1.
AlignedSeries stochastic_exponential(const EventPath& path, int component = 0);

/// Pointwise 1/H, with the in-segment growth negated.
AlignedSeries reciprocal(const AlignedSeries& h);

/// Running ∫_{(0,s]} H_{r-} dX_r for component `component` of the path.
/// Jumps contribute H_{τ-} ΔX. On the exact backend a segment contributes
/// H_start dX φ(g) with g the recorded growth of H, which is the exact
/// integral of an exponentially growing integrand against linear drift; on
/// the Euler backend it is the left-point sum H_start dX.
AlignedSeries stochastic_integral(const AlignedSeries& integrand, const EventPath& path, int component);

/// [X, Y]_s for component cx of x and cy of y. Without `sigma` the
/// continuous part is the realized sum of segment products (zero on the
/// exact backend); with `sigma` it is sigma * s.
AlignedSeries quadratic_covariation(const EventPath& x, int cx, const EventPath& y, int cy,
                                    std::optional<double> sigma = std::nullopt);

}  // namespace gouflow
