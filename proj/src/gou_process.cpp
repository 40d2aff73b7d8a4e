#include "gouflow/gou_process.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

#include "gouflow/errors.hpp"
#include "gouflow/parallel.hpp"

namespace gouflow {

namespace {

GouTrajectory prepare(const EventPath& path, double x)
{
    GouTrajectory t;
    t.x = x;
    t.backend = path.backend;
    t.exponential = stochastic_exponential(path, 0);
    t.value.backend = path.backend;
    t.value.initial = x;
    t.value.points.reserve(path.events.size());
    t.rate.assign(path.events.size(), 0.0);
    t.forcing.assign(path.events.size(), 0.0);
    if (path.backend == Backend::exact) {
        for (std::size_t i = 0; i < path.events.size(); ++i) {
            const auto& e = path.events[i];
            if (!e.is_jump()) {
                t.rate[i] = e.d1 / e.dt;
                t.forcing[i] = e.d2 / e.dt;
            }
        }
    }
    return t;
}

}  // namespace

GouTrajectory explicit_solution(const EventPath& driver_eta, double x)
{
    GouTrajectory t = prepare(driver_eta, x);
    t.integral = stochastic_integral(reciprocal(t.exponential), driver_eta, 1);
    double v = x;
    for (std::size_t i = 0; i < driver_eta.events.size(); ++i) {
        const auto& e = driver_eta.events[i];
        const auto& ep = t.exponential.points[i];
        AlignedPoint p;
        p.time = ep.time;
        p.left = v;
        if (e.is_jump()) {
            const double m = 1.0 + e.d1;
            v = m * v + m * e.d2;
        } else if (driver_eta.backend == Backend::exact) {
            v = std::exp(e.d1) * v + e.d2 * phi1(e.d1);
        } else {
            const double m = std::exp(e.d1 - 0.5 * driver_eta.gaussian.var1 * e.dt);
            v = m * (v + e.d2);
        }
        p.value = v;
        t.value.points.push_back(p);
    }
    return t;
}

GouTrajectory solve_sde_on_path(const EventPath& driver_forcing, double x)
{
    GouTrajectory t = prepare(driver_forcing, x);
    double v = x;
    for (const auto& e : driver_forcing.events) {
        AlignedPoint p;
        p.time = e.end_time();
        p.left = v;
        if (e.is_jump() || driver_forcing.backend == Backend::euler) {
            v = v * (1.0 + e.d1) + e.d2;
        } else {
            v = std::exp(e.d1) * v + e.d2 * phi1(e.d1);
        }
        p.value = v;
        t.value.points.push_back(p);
    }
    return t;
}

GouTrajectory solve_forward(const SamplePath& path, const LevyModel2& model, double x)
{
    return explicit_solution(eta_path(path, model), x);
}

GouTrajectory solve_sde_euler(const LevyModel2& model, double x, double horizon, double grid_dt, RandomStream& rng)
{
    return solve_sde_on_path(sample_path(model, horizon, Backend::euler, grid_dt, rng), x);
}

FlowAccumulator::FlowAccumulator(const LevyModel2& model, Backend backend, bool dual)
    : backend_(backend), dual_(dual), s_uu_(model.cov().uu), s_ul_(model.cov().ul)
{
}

Event FlowAccumulator::push(const Event& ul)
{
    Event e = ul;
    if (e.is_jump()) {
        if (e.d1 == -1.0) {
            throw ConditionViolation("condition (A)", "jump of size -1 in the driver");
        }
        if (dual_) {
            const double g = 1.0 + ul.d1;
            e.d1 = -ul.d1 / g;
            e.d2 = -ul.d2 / g;
        }
        e.d2 = e.d2 / (1.0 + e.d1);
        const double m = 1.0 + e.d1;
        map_.slope = m * map_.slope;
        map_.intercept = m * map_.intercept + m * e.d2;
        return e;
    }
    if (dual_) {
        e.d1 = -ul.d1 + s_uu_ * ul.dt;
        e.d2 = -ul.d2 + s_ul_ * ul.dt;
    }
    e.d2 -= s_ul_ * e.dt;
    if (backend_ == Backend::exact) {
        const double g = std::exp(e.d1);
        map_.slope = g * map_.slope;
        map_.intercept = g * map_.intercept + e.d2 * phi1(e.d1);
    } else {
        const double m = std::exp(e.d1 - 0.5 * s_uu_ * e.dt);
        map_.slope = m * map_.slope;
        map_.intercept = m * (map_.intercept + e.d2);
    }
    return e;
}

AffineMap sample_terminal_map(const LevyModel2& model, double horizon, Backend backend, double grid_dt,
                              RandomStream& rng, bool dual)
{
    FlowAccumulator acc(model, backend, dual);
    sample_events(model, horizon, backend, grid_dt, rng, [&acc](const Event& e) { acc.push(e); });
    return acc.map();
}

const char* to_string(FunctionalKind k) noexcept { return k == FunctionalKind::causal ? "causal" : "noncausal"; }

FunctionalSample exp_functional(const SamplePath& path, const LevyModel2& model, FunctionalKind kind)
{
    const AlignedSeries e = stochastic_exponential(path, 0);
    FunctionalSample s;
    if (kind == FunctionalKind::causal) {
        s.value = stochastic_integral(e, path, 1).terminal();
        s.diagnostic = std::abs(e.terminal());
    } else {
        const EventPath eta = eta_path(path, model);
        const AlignedSeries inv = reciprocal(e);
        s.value = -stochastic_integral(inv, eta, 1).terminal();
        s.diagnostic = std::abs(inv.terminal());
    }
    return s;
}

FunctionalSample exp_functional(const LevyModel2& model, FunctionalKind kind, double horizon, Backend backend,
                                double grid_dt, RandomStream& rng)
{
    // Same per-event arithmetic as the path overload, accumulated on the fly.
    const double s_uu = model.cov().uu;
    const double s_ul = model.cov().ul;
    const bool causal = kind == FunctionalKind::causal;
    double e = 1.0;  // E(U), or its reciprocal for the noncausal kind
    double integral = 0.0;
    sample_events(model, horizon, backend, grid_dt, rng, [&](const Event& ev) {
        if (ev.is_jump()) {
            if (ev.d1 == -1.0) {
                throw ConditionViolation("condition (A)", "exp_functional: jump of size -1 in the driver");
            }
            const double dy = causal ? ev.d2 : ev.d2 / (1.0 + ev.d1);
            integral += e * dy;
            e = causal ? e * (1.0 + ev.d1) : e / (1.0 + ev.d1);
            return;
        }
        const double dy = causal ? ev.d2 : ev.d2 - s_ul * ev.dt;
        const double g = ev.d1 - 0.5 * s_uu * ev.dt;
        if (backend == Backend::exact) {
            const double growth = causal ? ev.d1 : -ev.d1;
            integral += e * dy * phi1(growth);
            e *= std::exp(growth);
        } else {
            integral += e * dy;
            e = causal ? e * std::exp(g) : e / std::exp(g);
        }
    });
    return {causal ? integral : -integral, std::abs(e)};
}

StationarySample stationary_sampler(const LevyModel2& model, FunctionalKind kind, std::size_t n, double horizon,
                                    std::uint64_t seed, const SamplerOptions& options)
{
    if (n == 0) {
        throw std::invalid_argument("stationary_sampler: need at least one path");
    }
    const auto samples = parallel_map(n, options.workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        return exp_functional(model, kind, horizon, options.backend, options.grid_dt, rng);
    });
    std::vector<double> values;
    values.reserve(n);
    std::size_t failures = 0;
    for (const auto& s : samples) {
        values.push_back(s.value);
        failures += s.diagnostic > options.tolerance || !std::isfinite(s.diagnostic);
    }
    const double fraction = static_cast<double>(failures) / static_cast<double>(n);
    StationarySample out{EmpiricalDistribution(std::move(values)), fraction,
                         fraction > options.max_failure_fraction};
    out.law.seed = seed;
    out.law.horizon = horizon;
    out.law.diagnostic_failure_fraction = fraction;
    return out;
}

double InverseGammaLaw::cdf(double v) const
{
    if (v <= 0.0) {
        return 0.0;
    }
    // P(scale / G <= v) = P(G >= scale / v).
    return boost::math::gamma_q(shape, scale / v);
}

std::optional<InverseGammaLaw> brownian_perpetuity_law(const LevyModel2& model)
{
    const Cov2& c = model.cov();
    const double b_l = model.drift()[1];
    const double mu = -model.drift()[0] + 0.5 * c.uu;
    if (model.has_jumps() || c.ul != 0.0 || c.ll != 0.0 || c.uu <= 0.0 || b_l <= 0.0 || mu <= 0.0) {
        return std::nullopt;
    }
    return InverseGammaLaw{2.0 * mu / c.uu, 2.0 * b_l / c.uu};
}

}  // namespace gouflow
