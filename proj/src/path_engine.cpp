#include "gouflow/path.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gouflow/errors.hpp"

namespace gouflow {

namespace {

// Recompute event times as cumulative segment lengths and the horizon as
// their total.
void retime(EventPath& p)
{
    double t = 0.0;
    for (auto& e : p.events) {
        e.time = t;
        if (!e.is_jump()) {
            t += e.dt;
        }
    }
    p.horizon = t;
}

void require_not_minus_one(double du, const char* what)
{
    if (du == -1.0) {
        throw ConditionViolation("condition (A)", std::string(what) + ": jump of size -1 in the driver");
    }
}

struct Chol2 {
    double a = 0.0;
    double c = 0.0;
    double d = 0.0;
};

Chol2 cholesky(const Cov2& cov)
{
    Chol2 l;
    l.a = std::sqrt(cov.uu);
    if (l.a > 0.0) {
        l.c = cov.ul / l.a;
        l.d = std::sqrt(std::max(cov.ll - l.c * l.c, 0.0));
    } else {
        l.d = std::sqrt(cov.ll);
    }
    return l;
}

template <class JumpMap, class SegmentMap>
DerivedPath map_events(const EventPath& path, GaussianPart gaussian, std::string transform, JumpMap on_jump,
                       SegmentMap on_segment)
{
    DerivedPath out;
    out.horizon = path.horizon;
    out.backend = path.backend;
    out.gaussian = gaussian;
    out.grid_dt = path.grid_dt;
    out.transform = std::move(transform);
    out.events = path.events;
    for (auto& e : out.events) {
        if (e.is_jump()) {
            on_jump(e);
        } else {
            on_segment(e);
        }
    }
    return out;
}

}  // namespace

const char* to_string(Backend b) noexcept { return b == Backend::exact ? "exact" : "euler"; }

std::size_t EventPath::jump_count() const noexcept
{
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const Event& e) { return e.is_jump(); }));
}

double EventPath::terminal(int component) const noexcept
{
    double x = 0.0;
    for (const auto& e : events) {
        x += e.increment(component);
    }
    return x;
}

double EventPath::value_at(int component, double s, bool left) const
{
    if (s < 0.0 || s > horizon * (1.0 + 1e-12)) {
        throw std::out_of_range("value_at: time outside [0, horizon]");
    }
    double x = 0.0;
    for (const auto& e : events) {
        if (e.is_jump()) {
            if (e.time < s || (e.time == s && !left)) {
                x += e.increment(component);
                continue;
            }
            break;
        }
        if (e.end_time() <= s) {
            x += e.increment(component);
            continue;
        }
        if (e.time < s) {
            x += e.increment(component) * (s - e.time) / e.dt;
        }
        break;
    }
    return x;
}

namespace {

// Shared generator: emits events until the horizon or until `sink` returns
// false. Returns false when stopped early.
template <class Sink>
bool generate_events(const LevyModel2& model, double horizon, Backend backend, double grid_dt, RandomStream& rng,
                     Sink&& sink)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("sample_path: horizon must be positive and finite");
    }
    if (backend == Backend::exact && !model.cov().is_zero()) {
        throw std::invalid_argument("sample_path: the exact backend needs a model without Gaussian part");
    }
    if (backend == Backend::euler && !(grid_dt > 0.0)) {
        throw std::invalid_argument("sample_path: the Euler backend needs grid_dt > 0");
    }

    const auto& b = model.drift();
    const Chol2 chol = cholesky(model.cov());
    // A rank-one Gaussian part needs one normal per step.
    const bool two_normals = chol.d > 0.0 && chol.a > 0.0;
    const double rate = model.jump_intensity();

    // `clock` accumulates segment lengths in emission order, exactly as
    // retime() would.
    double clock = 0.0;
    auto segment = [&](double dt, double d1, double d2) {
        const bool more = sink(Event{EventKind::segment, clock, dt, d1, d2});
        clock += dt;
        return more;
    };
    auto fill = [&](double gap) {
        if (backend == Backend::exact) {
            return segment(gap, b[0] * gap, b[1] * gap);
        }
        const auto steps = std::max<long>(1, static_cast<long>(std::ceil(gap / grid_dt - 1e-9)));
        const double h = gap / static_cast<double>(steps);
        const double sh = std::sqrt(h);
        for (long k = 0; k < steps; ++k) {
            const double z1 = rng.normal();
            const double z2 = two_normals ? rng.normal() : z1;
            const double n2 = chol.a > 0.0 ? chol.c * z1 + chol.d * z2 : chol.d * z1;
            if (!segment(h, b[0] * h + chol.a * sh * z1, b[1] * h + n2 * sh)) {
                return false;
            }
        }
        return true;
    };

    double t = 0.0;
    while (true) {
        const double gap = rate > 0.0 ? rng.exponential(rate) : std::numeric_limits<double>::infinity();
        if (t + gap >= horizon) {
            return fill(horizon - t);
        }
        if (!fill(gap)) {
            return false;
        }
        t += gap;
        const Jump2 j = model.jump_law().sample(rng);
        if (!sink(Event{EventKind::jump, clock, 0.0, j.du, j.dl})) {
            return false;
        }
    }
}

}  // namespace

void sample_events(const LevyModel2& model, double horizon, Backend backend, double grid_dt, RandomStream& rng,
                   const std::function<void(const Event&)>& sink)
{
    generate_events(model, horizon, backend, grid_dt, rng, [&sink](const Event& e) {
        sink(e);
        return true;
    });
}

bool sample_events_until(const LevyModel2& model, double horizon, Backend backend, double grid_dt,
                         RandomStream& rng, const std::function<bool(const Event&)>& sink)
{
    return generate_events(model, horizon, backend, grid_dt, rng, sink);
}

SamplePath sample_path(const LevyModel2& model, double horizon, Backend backend, double grid_dt, RandomStream& rng)
{
    SamplePath p;
    p.backend = backend;
    p.grid_dt = backend == Backend::euler ? grid_dt : 0.0;
    p.gaussian = {model.cov().uu, model.cov().ul, model.cov().ll};
    p.transform = "U,L";
    generate_events(model, horizon, backend, grid_dt, rng, [&p](const Event& e) {
        p.events.push_back(e);
        return true;
    });
    retime(p);
    return p;
}

DerivedPath eta_path(const EventPath& path)
{
    const double s_ul = path.gaussian.cov12;
    return map_events(
        path, path.gaussian, "U,eta",
        [](Event& e) {
            require_not_minus_one(e.d1, "eta_path");
            e.d2 = e.d2 / (1.0 + e.d1);
        },
        [s_ul](Event& e) { e.d2 -= s_ul * e.dt; });
}

DerivedPath eta_path(const EventPath& path, const LevyModel2& model)
{
    EventPath p = path;
    p.gaussian.cov12 = model.cov().ul;
    return eta_path(p);
}

DerivedPath w_path(const EventPath& path)
{
    const double s_uu = path.gaussian.var1;
    GaussianPart g = path.gaussian;
    g.cov12 = -g.cov12;
    return map_events(
        path, g, "W,L",
        [](Event& e) {
            require_not_minus_one(e.d1, "w_path");
            e.d1 = -e.d1 / (1.0 + e.d1);
        },
        [s_uu](Event& e) { e.d1 = -e.d1 + s_uu * e.dt; });
}

DerivedPath dual_driver_path(const EventPath& path)
{
    const double s_uu = path.gaussian.var1;
    const double s_ul = path.gaussian.cov12;
    return map_events(
        path, path.gaussian, "W,K",
        [](Event& e) {
            require_not_minus_one(e.d1, "dual_driver_path");
            const double g = 1.0 + e.d1;
            e.d1 = -e.d1 / g;
            e.d2 = -e.d2 / g;
        },
        [s_uu, s_ul](Event& e) {
            e.d1 = -e.d1 + s_uu * e.dt;
            e.d2 = -e.d2 + s_ul * e.dt;
        });
}

DerivedPath xi_path(const EventPath& path)
{
    const double s_uu = path.gaussian.var1;
    GaussianPart g = path.gaussian;
    g.cov12 = -g.cov12;
    const auto comma = path.transform.find(',');
    const std::string second = comma == std::string::npos ? "L" : path.transform.substr(comma + 1);
    return map_events(
        path, g, "xi," + second,
        [](Event& e) {
            if (!(e.d1 > -1.0)) {
                throw ConditionViolation("condition (B)", "xi_path: jump dU <= -1 has no logarithm");
            }
            e.d1 = -std::log1p(e.d1);
        },
        [s_uu](Event& e) { e.d1 = -e.d1 + 0.5 * s_uu * e.dt; });
}

DerivedPath recover_ul_from_xi_eta(const EventPath& xi_eta, double sigma_xi_sq, double sigma_xi_eta)
{
    GaussianPart g = xi_eta.gaussian;
    g.cov12 = -g.cov12;
    return map_events(
        xi_eta, g, "U,L",
        [](Event& e) {
            const double factor = std::exp(-e.d1);
            e.d1 = std::expm1(-e.d1);
            e.d2 = factor * e.d2;
        },
        [sigma_xi_sq, sigma_xi_eta](Event& e) {
            e.d1 = -e.d1 + 0.5 * sigma_xi_sq * e.dt;
            e.d2 = e.d2 - sigma_xi_eta * e.dt;
        });
}

EventPath slice_path(const EventPath& path, double from, double to)
{
    if (from < 0.0 || !(to > from) || to > path.horizon * (1.0 + 1e-12)) {
        throw std::out_of_range("slice_path: need 0 <= from < to <= horizon");
    }
    EventPath out = path;
    out.events.clear();
    for (const auto& e : path.events) {
        if (e.is_jump()) {
            if (e.time > from && e.time <= to) {
                out.events.push_back(e);
            }
            if (e.time > to) {
                break;
            }
            continue;
        }
        const double lo = std::max(e.time, from);
        const double hi = std::min(e.end_time(), to);
        if (hi <= lo) {
            if (e.time >= to) {
                break;
            }
            continue;
        }
        if (lo == e.time && hi == e.end_time()) {
            out.events.push_back(e);
        } else {
            const double f = (hi - lo) / e.dt;
            out.events.push_back({EventKind::segment, lo, hi - lo, e.d1 * f, e.d2 * f});
        }
    }
    retime(out);
    return out;
}

DerivedPath reverse_path(const EventPath& path, double at)
{
    if (!(at > 0.0) || at > path.horizon * (1.0 + 1e-12)) {
        throw std::out_of_range("reverse_path: reversal time must lie in (0, horizon]");
    }
    std::vector<Event> kept = slice_path(path, 0.0, std::min(at, path.horizon)).events;
    while (!kept.empty() && kept.back().is_jump()) {
        kept.pop_back();  // a jump exactly at the reversal time
    }

    DerivedPath out;
    out.backend = path.backend;
    out.gaussian = path.gaussian;
    out.grid_dt = path.grid_dt;
    const auto tilde = [](const std::string& name) { return name.size() > 1 && name.back() == '~' ? name.substr(0, name.size() - 1) : name + "~"; };
    const auto comma = path.transform.find(',');
    out.transform = comma == std::string::npos
                        ? tilde(path.transform)
                        : tilde(path.transform.substr(0, comma)) + "," + tilde(path.transform.substr(comma + 1));
    out.events.reserve(kept.size());
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
        Event e = *it;
        e.d1 = -e.d1;
        e.d2 = -e.d2;
        out.events.push_back(e);
    }
    retime(out);
    return out;
}

DerivedPath t_path(const EventPath& reversed, double sigma_u_sq)
{
    GaussianPart g = reversed.gaussian;
    g.var1 = sigma_u_sq;
    const auto comma = reversed.transform.find(',');
    const std::string second = comma == std::string::npos ? "L~" : reversed.transform.substr(comma + 1);
    return map_events(
        reversed, g, "T," + second,
        [](Event& e) {
            if (e.d1 == 1.0) {
                throw ConditionViolation("condition (A)", "t_path: reversed jump of size 1");
            }
            e.d1 = e.d1 / (1.0 - e.d1);
        },
        [sigma_u_sq](Event& e) { e.d1 += sigma_u_sq * e.dt; });
}

DerivedPath eta_tilde_path(const EventPath& reversed, double sigma_ul)
{
    return map_events(
        reversed, reversed.gaussian, "U~,eta~",
        [](Event& e) {
            if (e.d1 == 1.0) {
                throw ConditionViolation("condition (A)", "eta_tilde_path: reversed jump of size 1");
            }
            e.d2 = e.d2 / (1.0 - e.d1);
        },
        [sigma_ul](Event& e) { e.d2 += sigma_ul * e.dt; });
}

DerivedPath combine(const EventPath& a, int ca, const EventPath& b, int cb, double cov12, std::string transform)
{
    if (!same_skeleton(a, b)) {
        throw std::invalid_argument("combine: paths do not share an event skeleton");
    }
    DerivedPath out;
    out.horizon = a.horizon;
    out.backend = a.backend;
    out.grid_dt = a.grid_dt;
    out.transform = std::move(transform);
    out.gaussian.var1 = ca == 0 ? a.gaussian.var1 : a.gaussian.var2;
    out.gaussian.var2 = cb == 0 ? b.gaussian.var1 : b.gaussian.var2;
    out.gaussian.cov12 = cov12;
    out.events = a.events;
    for (std::size_t i = 0; i < out.events.size(); ++i) {
        out.events[i].d1 = a.events[i].increment(ca);
        out.events[i].d2 = b.events[i].increment(cb);
    }
    return out;
}

EventPath coarsen(const EventPath& path, int factor)
{
    if (factor < 1) {
        throw std::invalid_argument("coarsen: factor must be at least 1");
    }
    EventPath out = path;
    out.grid_dt = path.grid_dt * factor;
    out.events.clear();
    int run = 0;
    for (const auto& e : path.events) {
        if (e.is_jump()) {
            out.events.push_back(e);
            run = 0;
            continue;
        }
        if (run > 0) {
            auto& last = out.events.back();
            last.dt += e.dt;
            last.d1 += e.d1;
            last.d2 += e.d2;
        } else {
            out.events.push_back(e);
        }
        run = (run + 1) % factor;
    }
    retime(out);
    return out;
}

void validate(const EventPath& path)
{
    double t = 0.0;
    double last_jump = -1.0;
    for (const auto& e : path.events) {
        if (!std::isfinite(e.d1) || !std::isfinite(e.d2)) {
            throw std::invalid_argument("path contains a non-finite increment");
        }
        if (std::abs(e.time - t) > 1e-12 * std::max(1.0, path.horizon)) {
            throw std::invalid_argument("event times are not cumulative segment lengths");
        }
        if (e.is_jump()) {
            if (e.dt != 0.0 || !(e.time > last_jump) || e.time <= 0.0) {
                throw std::invalid_argument("jump times must be positive and strictly increasing");
            }
            last_jump = e.time;
        } else {
            if (!(e.dt > 0.0)) {
                throw std::invalid_argument("segments need positive length");
            }
            t += e.dt;
        }
    }
    if (std::abs(t - path.horizon) > 1e-12 * std::max(1.0, path.horizon)) {
        throw std::invalid_argument("segment lengths do not sum to the horizon");
    }
}

bool same_skeleton(const EventPath& a, const EventPath& b) noexcept
{
    if (a.events.size() != b.events.size() || a.horizon != b.horizon) {
        return false;
    }
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const auto& x = a.events[i];
        const auto& y = b.events[i];
        if (x.kind != y.kind || x.time != y.time || x.dt != y.dt) {
            return false;
        }
    }
    return true;
}

void write_csv(std::ostream& os, const EventPath& path)
{
    os << "time,kind,d1,d2\n";
    const auto old = os.precision(17);
    for (const auto& e : path.events) {
        os << e.time << ',' << (e.is_jump() ? "jump" : "segment") << ',' << e.d1 << ',' << e.d2 << '\n';
    }
    os.precision(old);
}

}  // namespace gouflow
