#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gouflow/levy_model.hpp"
#include "gouflow/path.hpp"

namespace testing {

using namespace gouflow;

inline double mixed(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(a));
}

/// Point-mass jumps on both sides of zero with ΔU > -1 and mixed-sign ΔL.
inline LevyModel2 mixed_jumps()
{
    return LevyModel2({0.2, 0.5}, Cov2{}, 2.0,
                      JumpLaw2(PointMassLaw{{{0.5, -1.0, 0.3}, {-0.4, 0.7, 0.3}, {1.5, 0.25, 0.2}, {-0.75, -0.5, 0.2}}}));
}

/// As above plus mass at ΔU = -2 (condition (A) only).
inline LevyModel2 sign_flipping()
{
    return LevyModel2({0.1, 1.0}, Cov2{}, 1.5,
                      JumpLaw2(PointMassLaw{{{-2.0, 0.5, 0.4}, {0.5, -0.5, 0.6}}}));
}

/// Correlated Brownian parts plus jumps.
inline LevyModel2 brownian_jumps()
{
    return LevyModel2({-0.3, 0.4}, Cov2{0.5, 0.2, 0.8}, 1.0,
                      JumpLaw2(PointMassLaw{{{0.4, 0.3, 0.5}, {-0.3, -0.6, 0.5}}}));
}

inline Event seg(double time, double dt, double d1, double d2)
{
    return Event{EventKind::segment, time, dt, d1, d2};
}

inline Event jump(double time, double d1, double d2)
{
    return Event{EventKind::jump, time, 0.0, d1, d2};
}

inline EventPath make_path(double horizon, std::vector<Event> events, GaussianPart g = {})
{
    EventPath p;
    p.horizon = horizon;
    p.backend = Backend::exact;
    p.gaussian = g;
    p.events = std::move(events);
    return p;
}

}  // namespace testing
