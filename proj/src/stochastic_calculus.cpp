#include "gouflow/stochastic_calculus.hpp"

#include <cmath>
#include <stdexcept>

#include "gouflow/errors.hpp"

namespace gouflow {

double phi1(double z) noexcept
{
    if (std::abs(z) < 1e-300) {
        return 1.0;
    }
    return std::expm1(z) / z;
}

AlignedSeries stochastic_exponential(const EventPath& path, int component)
{
    const double sigma_sq = component == 0 ? path.gaussian.var1 : path.gaussian.var2;
    AlignedSeries out;
    out.backend = path.backend;
    out.initial = 1.0;
    out.points.reserve(path.events.size());
    double e = 1.0;
    for (const auto& ev : path.events) {
        const double dx = ev.increment(component);
        AlignedPoint p;
        p.time = ev.end_time();
        p.left = e;
        if (ev.is_jump()) {
            if (dx == -1.0) {
                throw ConditionViolation("condition (A)", "stochastic exponential of a jump of size -1");
            }
            e *= 1.0 + dx;
        } else {
            const double g = dx - 0.5 * sigma_sq * ev.dt;
            e *= std::exp(g);
            p.log_growth = path.backend == Backend::exact ? g : 0.0;
        }
        p.value = e;
        out.points.push_back(p);
    }
    return out;
}

AlignedSeries reciprocal(const AlignedSeries& h)
{
    AlignedSeries out = h;
    out.initial = 1.0 / h.initial;
    for (auto& p : out.points) {
        p.left = 1.0 / p.left;
        p.value = 1.0 / p.value;
        p.log_growth = -p.log_growth;
    }
    return out;
}

AlignedSeries stochastic_integral(const AlignedSeries& integrand, const EventPath& path, int component)
{
    if (integrand.points.size() != path.events.size()) {
        throw std::invalid_argument("stochastic_integral: integrand and integrator are not aligned");
    }
    AlignedSeries out;
    out.backend = path.backend;
    out.initial = 0.0;
    out.points.reserve(path.events.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < path.events.size(); ++i) {
        const auto& ev = path.events[i];
        const auto& h = integrand.points[i];
        if (h.time != ev.end_time()) {
            throw std::invalid_argument("stochastic_integral: event times differ");
        }
        const double dx = ev.increment(component);
        AlignedPoint p;
        p.time = h.time;
        p.left = acc;
        if (ev.is_jump() || path.backend == Backend::euler) {
            acc += h.left * dx;
        } else {
            acc += h.left * dx * phi1(h.log_growth);
        }
        p.value = acc;
        out.points.push_back(p);
    }
    return out;
}

AlignedSeries quadratic_covariation(const EventPath& x, int cx, const EventPath& y, int cy,
                                    std::optional<double> sigma)
{
    if (!same_skeleton(x, y)) {
        throw std::invalid_argument("quadratic_covariation: paths are not aligned");
    }
    AlignedSeries out;
    out.backend = x.backend;
    out.points.reserve(x.events.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.events.size(); ++i) {
        const auto& a = x.events[i];
        const auto& b = y.events[i];
        AlignedPoint p;
        p.time = a.end_time();
        p.left = acc;
        if (a.is_jump()) {
            acc += a.increment(cx) * b.increment(cy);
        } else if (sigma) {
            acc += *sigma * a.dt;
        } else if (x.backend == Backend::euler) {
            acc += a.increment(cx) * b.increment(cy);
        }
        p.value = acc;
        out.points.push_back(p);
    }
    return out;
}

}  // namespace gouflow
