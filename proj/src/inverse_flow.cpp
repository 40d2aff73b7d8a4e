#include "gouflow/inverse_flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "gouflow/errors.hpp"

namespace gouflow {

namespace {

double mixed_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

double max_gap(const AlignedSeries& a, const AlignedSeries& b)
{
    double err = mixed_error(a.initial, b.initial);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        err = std::max(err, mixed_error(a.points[i].value, b.points[i].value));
    }
    return err;
}

}  // namespace

EventPath restrict_to(const EventPath& path, double t)
{
    EventPath out = slice_path(path, 0.0, std::min(t, path.horizon));
    while (!out.events.empty() && out.events.back().is_jump()) {
        out.events.pop_back();
    }
    return out;
}

InverseFlow inverse_flow_solve(const SamplePath& path, const LevyModel2& model, double t, double y)
{
    const EventPath sliced = restrict_to(path, t);
    InverseFlow f;
    f.t = sliced.horizon;
    f.reversed = reverse_path(sliced, sliced.horizon);
    f.t_driver = t_path(f.reversed, model.cov().uu);
    f.eta_tilde = eta_tilde_path(f.reversed, model.cov().ul);
    f.r = explicit_solution(f.t_driver, y);

    const DerivedPath sde_driver = combine(f.t_driver, 0, f.eta_tilde, 1, model.cov().ul, "T,eta~");
    f.sde_residual = max_gap(f.r.value, solve_sde_on_path(sde_driver, y).value);

    const DerivedPath eta_reversed = reverse_path(eta_path(sliced, model), sliced.horizon);
    for (std::size_t i = 0; i < eta_reversed.events.size(); ++i) {
        f.eta_tilde_discrepancy =
            std::max(f.eta_tilde_discrepancy, mixed_error(eta_reversed.events[i].d2, f.eta_tilde.events[i].d2));
    }
    return f;
}

PathwiseIdentityReport verify_pathwise_identity(const SamplePath& path, const LevyModel2& model, double x, double t)
{
    const EventPath sliced = restrict_to(path, t);
    const GouTrajectory v = solve_forward(sliced, model, x);
    PathwiseIdentityReport rep;
    rep.x = x;
    rep.t = sliced.horizon;
    rep.v_t = v.terminal();
    const InverseFlow f = inverse_flow_solve(sliced, model, sliced.horizon, rep.v_t);

    // Reversed event j undoes forward event n-1-j.
    const auto& fwd = v.value.points;
    const auto& rev = f.r.value.points;
    const std::size_t n = fwd.size();
    for (std::size_t j = 0; j < n; ++j) {
        rep.max_error = std::max(rep.max_error, mixed_error(fwd[n - 1 - j].left, rev[j].value));
    }
    rep.checked = n;
    return rep;
}

double FlowMap::inverse(double y) const
{
    if (slope == 0.0) {
        throw std::domain_error("FlowMap::inverse: zero slope");
    }
    return (y - intercept) / slope;
}

FlowMap compose(const FlowMap& later, const FlowMap& earlier)
{
    if (later.u != earlier.t) {
        throw std::invalid_argument("compose: maps do not meet");
    }
    return {earlier.u, later.t, later.slope * earlier.slope, later.slope * earlier.intercept + later.intercept};
}

FlowMap flow_map(const SamplePath& path, const LevyModel2& model, double u, double t)
{
    if (u < 0.0 || u > t) {
        throw std::out_of_range("flow_map: need 0 <= u <= t");
    }
    FlowMap m{u, t, 1.0, 0.0};
    if (u == t) {
        return m;
    }
    FlowAccumulator acc(model, path.backend, false);
    for (const auto& e : slice_path(path, u, t).events) {
        acc.push(e);
    }
    m.slope = acc.map().slope;
    m.intercept = acc.map().intercept;
    return m;
}

double state_at(const GouTrajectory& traj, double s, bool left)
{
    double v = traj.value.initial;
    double start = 0.0;
    const auto& pts = traj.value.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const double dt = p.time - start;
        if (dt == 0.0) {
            if (p.time < s || (p.time == s && !left)) {
                v = p.value;
                continue;
            }
            return v;
        }
        if (p.time <= s) {
            v = p.value;
            start = p.time;
            continue;
        }
        if (start < s) {
            if (traj.backend != Backend::exact) {
                return p.left;
            }
            const double r = s - start;
            const double kr = traj.rate[i] * r;
            return std::exp(kr) * p.left + traj.forcing[i] * r * phi1(kr);
        }
        return v;
    }
    return v;
}

FlowInverseReport flow_inverse_check(const SamplePath& path, const LevyModel2& model, double u, double t, double y)
{
    if (!model.condition_b()) {
        throw ConditionViolation("condition (B)", "flow_inverse_check: the flow is not increasing");
    }
    const EventPath sliced = restrict_to(path, t);
    FlowInverseReport rep;
    rep.map = flow_map(sliced, model, u, sliced.horizon);
    rep.flow_inverse = rep.map.inverse(y);
    const InverseFlow f = inverse_flow_solve(sliced, model, sliced.horizon, y);
    rep.r_left = state_at(f.r, std::max(0.0, sliced.horizon - u), true);
    rep.error = mixed_error(rep.flow_inverse, rep.r_left);
    return rep;
}

void write_csv(std::ostream& os, const std::vector<VerificationRow>& rows)
{
    os << "seed,path,t,x,max_error,backend,grid_dt\n";
    os << std::setprecision(10);
    for (const auto& r : rows) {
        os << r.seed << ',' << r.path << ',' << r.t << ',' << r.x << ',' << r.max_error << ','
           << to_string(r.backend) << ',' << r.grid_dt << '\n';
    }
}

}  // namespace gouflow
