#include "gouflow/duality.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gouflow/errors.hpp"
#include "gouflow/parallel.hpp"

namespace gouflow {

namespace {

// Sub-seed tags, so that independent estimators never share streams.
enum SeedTag : std::uint64_t {
    tag_forward = 1,
    tag_dual = 2,
    tag_causal = 3,
    tag_noncausal = 4,
    tag_bootstrap = 5,
    tag_grid = 16,
};

double mixed_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

// Offset r in [0, dt] at which V' = kappa V + c started at v0 > level reaches
// level. V is monotone inside the segment, so the root is unique whenever
// the segment ends at or below level.
double segment_crossing(double v0, double kappa, double c, double dt, double level)
{
    const double slope0 = kappa * v0 + c;  // V'(0)
    if (!(slope0 < 0.0)) {
        return dt;
    }
    // e^{kappa r} = 1 + q with q = kappa (level - v0) / V'(0).
    const double gap = (level - v0) / slope0;
    const double q = kappa * gap;
    const double ratio = q == 0.0 ? 1.0 : std::log1p(q) / q;
    const double r = gap * ratio;
    return std::clamp(std::isfinite(r) ? r : dt, 0.0, dt);
}

// Hit check across one applied (X, η) event, given V before and after it.
bool check_event(const Event& e, Backend backend, double start_time, double left, double value, double level,
                 HitRecord& rec)
{
    if (!(value <= level)) {
        return false;
    }
    rec.hit = true;
    if (!e.is_jump() && backend == Backend::exact) {
        const double r = segment_crossing(left, e.d1 / e.dt, e.d2 / e.dt, e.dt, level);
        rec.time = start_time + r;
        rec.overshoot = level;
    } else {
        rec.time = e.end_time();
        rec.overshoot = value;
    }
    return true;
}

void check_condition_b(const LevyModel2& model, const char* what)
{
    if (!model.condition_b()) {
        throw ConditionViolation("condition (B)", std::string(what) + ": the driver has jumps with ΔU <= -1");
    }
}

void check_subordinator(const ModelFlags& f, const char* what)
{
    if (!f.l_subordinator) {
        throw ConditionViolation("L subordinator", std::string(what) + ": L must be nondecreasing");
    }
}

SamplerOptions sampler_options(const RunOptions& o)
{
    SamplerOptions s;
    s.backend = o.backend;
    s.grid_dt = o.grid_dt;
    s.tolerance = o.diagnostic_tolerance;
    s.workers = o.workers;
    return s;
}

std::vector<HitRecord> sample_hits(const LevyModel2& model, double start, double horizon, std::size_t n,
                                   std::uint64_t seed, const RunOptions& o, bool dual)
{
    return parallel_map(n, o.workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        return sample_hitting_time(model, start, horizon, o.backend, o.grid_dt, rng, dual);
    });
}

std::vector<AffineMap> sample_maps(const LevyModel2& model, double t, std::size_t n, std::uint64_t seed,
                                   const RunOptions& o, bool dual)
{
    return parallel_map(n, o.workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        return sample_terminal_map(model, t, o.backend, o.grid_dt, rng, dual);
    });
}

void fill_hitting(HittingResult& r, std::vector<HitRecord> records)
{
    r.records = std::move(records);
    r.hits = static_cast<std::size_t>(
        std::count_if(r.records.begin(), r.records.end(), [](const HitRecord& h) { return h.hit; }));
    const MeanSe p = proportion(r.hits, r.records.size());
    r.estimate = p.mean;
    r.se = p.se;
    r.ci = binomial_ci(r.hits, r.records.size(), 0.95);
}

void finish_companion(HittingResult& r, const StationarySample& s, double level)
{
    r.companion = s.law.survival(level);
    r.companion_se = std::sqrt(r.companion * (1.0 - r.companion) / static_cast<double>(s.law.size()));
    r.discrepancy = r.estimate - r.companion;
    r.diagnostic_failure_fraction = s.failure_fraction;
    if (s.flagged) {
        r.warnings.push_back("stationary sample: truncation diagnostic failed on " +
                             std::to_string(s.failure_fraction) + " of paths");
    }
    if (s.law.max_atom() > 0.01) {
        r.warnings.push_back("stationary sample has an empirical atom of mass " + std::to_string(s.law.max_atom()));
    }
}

DualityRow make_row(std::string relation, double t, double x, double y, std::size_t hits_v, std::size_t hits_r,
                    std::size_t n_v, std::size_t n_r, double z_crit)
{
    DualityRow row;
    row.relation = std::move(relation);
    row.t = t;
    row.x = x;
    row.y = y;
    const MeanSe v = proportion(hits_v, n_v);
    const MeanSe r = proportion(hits_r, n_r);
    row.p_v = v.mean;
    row.se_v = v.se;
    row.p_r = r.mean;
    row.se_r = r.se;
    const double diff = std::abs(v.mean - r.mean);
    const double se = std::sqrt(v.se * v.se + r.se * r.se);
    if (se > 0.0) {
        row.z = diff / se;
        row.pass = row.z <= z_crit;
    } else {
        row.z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        row.pass = diff == 0.0;
    }
    return row;
}

}  // namespace

DualPair make_dual_pair(const LevyModel2& model)
{
    check_condition_b(model, "make_dual_pair");
    return {model, dual_model(model), model.flags(), detect_degeneracy(model).k};
}

DualSolution dual_solve(const SamplePath& path, const LevyModel2& model, double y)
{
    check_condition_b(model, "dual_solve");
    for (const auto& e : path.events) {
        if (e.is_jump() && !(e.d1 > -1.0)) {
            throw ConditionViolation("condition (B)", "dual_solve: path has a jump with ΔU <= -1");
        }
    }
    DualSolution out;
    out.trajectory = explicit_solution(eta_path(dual_driver_path(path)), y);

    const AlignedSeries ew = stochastic_exponential(w_path(path), 0);
    const AlignedSeries integral = stochastic_integral(reciprocal(ew), path, 1);
    const auto& r = out.trajectory.value.points;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double alt = ew.points[i].value * (y - integral.points[i].value);
        out.route_discrepancy = std::max(out.route_discrepancy, mixed_error(r[i].value, alt));
    }
    return out;
}

AlignedSeries killed_dual(const GouTrajectory& r, double y, const ModelFlags& flags)
{
    if (!flags.condition_b) {
        throw ConditionViolation("condition (B)", "killed_dual: the driver has jumps with ΔU <= -1");
    }
    check_subordinator(flags, "killed_dual");
    if (y < 0.0) {
        throw ConditionViolation("y >= 0", "killed_dual: the killed dual lives on [0, inf)");
    }
    AlignedSeries out = r.value;
    out.initial = std::max(out.initial, 0.0);
    for (auto& p : out.points) {
        p.left = std::max(p.left, 0.0);
        p.value = std::max(p.value, 0.0);
        p.log_growth = 0.0;
    }
    return out;
}

AlignedSeries killed_by_stopping(const GouTrajectory& r)
{
    const HitRecord h = hitting_time(r, 0.0);
    AlignedSeries out = r.value;
    for (auto& p : out.points) {
        p.log_growth = 0.0;
    }
    if (!h.hit) {
        return out;
    }
    const std::size_t first = h.event ? *h.event : 0;
    if (!h.event) {
        out.initial = 0.0;
    }
    for (std::size_t i = first; i < out.points.size(); ++i) {
        if (i > first || !h.event) {
            out.points[i].left = 0.0;
        }
        out.points[i].value = 0.0;
    }
    return out;
}

HitRecord hitting_time(const GouTrajectory& traj, double level)
{
    HitRecord rec;
    if (traj.x <= level) {
        rec.hit = true;
        rec.overshoot = traj.x;
        return rec;
    }
    const auto& pts = traj.value.points;
    double start = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (p.value <= level) {
            rec.hit = true;
            rec.event = i;
            const double dt = p.time - start;  // zero for a jump
            if (traj.backend == Backend::exact && dt > 0.0) {
                rec.time = start + segment_crossing(p.left, traj.rate[i], traj.forcing[i], dt, level);
                rec.overshoot = level;
            } else {
                rec.time = p.time;
                rec.overshoot = p.value;
            }
            return rec;
        }
        start = p.time;
    }
    return rec;
}

HitRecord sample_hitting_time(const LevyModel2& model, double start, double horizon, Backend backend,
                              double grid_dt, RandomStream& rng, bool dual, double level)
{
    HitRecord rec;
    if (start <= level) {
        rec.hit = true;
        rec.overshoot = start;
        return rec;
    }
    FlowAccumulator acc(model, backend, dual);
    sample_events_until(model, horizon, backend, grid_dt, rng, [&](const Event& ul) {
        const double left = acc.map()(start);
        const Event e = acc.push(ul);
        check_event(e, backend, ul.time, left, acc.map()(start), level, rec);
        return !rec.hit;
    });
    return rec;
}

HittingResult ruin_probability(const LevyModel2& model, double y, double horizon, std::size_t n,
                               std::uint64_t seed, const RunOptions& options)
{
    check_condition_b(model, "ruin_probability");
    check_subordinator(model.flags(), "ruin_probability");
    if (y < 0.0) {
        throw ConditionViolation("y >= 0", "ruin_probability: the killed dual lives on [0, inf)");
    }
    HittingResult r;
    r.horizon = horizon;
    fill_hitting(r, sample_hits(model, y, horizon, n, derive_seed(seed, tag_dual), options, true));
    const StationarySample s = stationary_sampler(model, FunctionalKind::causal, n, horizon,
                                                  derive_seed(seed, tag_causal), sampler_options(options));
    finish_companion(r, s, y);
    return r;
}

HittingResult forward_ruin_probability(const LevyModel2& model, double x, double horizon, std::size_t n,
                                       std::uint64_t seed, const RunOptions& options)
{
    check_condition_b(model, "forward_ruin_probability");
    if (!model.flags().neg_l_subordinator) {
        throw ConditionViolation("-L subordinator", "forward_ruin_probability: L must be nonincreasing");
    }
    HittingResult r;
    r.horizon = horizon;
    fill_hitting(r, sample_hits(model, x, horizon, n, derive_seed(seed, tag_forward), options, false));
    const StationarySample s = stationary_sampler(model, FunctionalKind::noncausal, n, horizon,
                                                  derive_seed(seed, tag_noncausal), sampler_options(options));
    finish_companion(r, s, x);
    return r;
}

RuinIdentityReport verify_ruin_identity(const LevyModel2& model, double x, double horizon, std::size_t n,
                                        std::uint64_t seed, const RunOptions& options, double z_crit,
                                        int bootstrap_replicates)
{
    const StationarySample h = stationary_sampler(model, FunctionalKind::noncausal, n, horizon,
                                                  derive_seed(seed, tag_noncausal), sampler_options(options));
    if (h.flagged) {
        throw ConditionViolation("E(U)^{-1} -> 0",
                                 "verify_ruin_identity: the noncausal integral does not settle by the horizon");
    }
    const double spread = h.law.max() - h.law.min();
    if (!(spread > 1e-12 * std::max(1.0, std::abs(h.law.max())))) {
        throw ConditionViolation("H non-degenerate",
                                 "verify_ruin_identity: the noncausal stationary law is a point mass");
    }
    const auto hits = sample_hits(model, x, horizon, n, derive_seed(seed, tag_forward), options, false);

    // H(-v) = P(R_∞ >= v), the survival function of the noncausal sample.
    auto lhs_of = [&hits](const EmpiricalDistribution& law, const std::vector<std::size_t>* idx) {
        const std::size_t m = hits.size();
        double sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const HitRecord& rec = hits[idx ? (*idx)[k] : k];
            if (rec.hit) {
                sum += law.survival(rec.overshoot);
            }
        }
        return sum / static_cast<double>(m);
    };

    RuinIdentityReport rep;
    rep.x = x;
    rep.diagnostic_failure_fraction = h.failure_fraction;
    const std::size_t hit_count = static_cast<std::size_t>(
        std::count_if(hits.begin(), hits.end(), [](const HitRecord& r) { return r.hit; }));
    rep.hit_fraction = static_cast<double>(hit_count) / static_cast<double>(n);
    rep.lhs = lhs_of(h.law, nullptr);
    rep.conditional_term = hit_count == 0 ? 0.0 : rep.lhs / rep.hit_fraction;
    rep.rhs = h.law.survival(x);

    // Joint bootstrap over both samples.
    const std::vector<double>& hv = h.law.sorted();
    RandomStream rng(derive_seed(seed, tag_bootstrap), 0);
    std::vector<double> ls, rs, ds;
    std::vector<std::size_t> idx(n);
    std::vector<double> resampled(hv.size());
    for (int b = 0; b < bootstrap_replicates; ++b) {
        for (auto& v : resampled) {
            v = hv[std::min<std::size_t>(hv.size() - 1, static_cast<std::size_t>(rng.uniform() * hv.size()))];
        }
        for (auto& i : idx) {
            i = std::min<std::size_t>(n - 1, static_cast<std::size_t>(rng.uniform() * n));
        }
        const EmpiricalDistribution law(resampled);
        const double l = lhs_of(law, &idx);
        const double r = law.survival(x);
        ls.push_back(l);
        rs.push_back(r);
        ds.push_back(l - r);
    }
    auto sd = [](const std::vector<double>& v) {
        const MeanSe m = mean_se(v);
        return m.se * std::sqrt(static_cast<double>(v.size()));
    };
    rep.lhs_se = sd(ls);
    rep.rhs_se = sd(rs);
    rep.diff_se = sd(ds);
    const double diff = std::abs(rep.lhs - rep.rhs);
    rep.z = rep.diff_se > 0.0 ? diff / rep.diff_se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    rep.pass = rep.z <= z_crit;
    return rep;
}

MonotonicityReport monotonicity_probe(const LevyModel2& model, double t, double y, std::vector<double> xs,
                                      std::size_t n, std::uint64_t seed, const RunOptions& options)
{
    if (xs.empty() || n < 2) {
        throw std::invalid_argument("monotonicity_probe: need probe points and at least two paths");
    }
    std::sort(xs.begin(), xs.end());
    const auto maps = sample_maps(model, t, n, derive_seed(seed, tag_forward), options, false);
    const std::size_t k = xs.size();

    MonotonicityReport rep;
    rep.t = t;
    rep.y = y;
    rep.xs = xs;
    std::vector<std::size_t> counts(k, 0);
    // Per pair (i < j): number of paths with indicator i above j, and below.
    std::vector<std::size_t> above(k * k, 0), below(k * k, 0);
    std::vector<char> ind(k);
    for (const auto& m : maps) {
        bool violated = false;
        for (std::size_t i = 0; i < k; ++i) {
            ind[i] = m(xs[i]) >= y;
            counts[i] += ind[i];
        }
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                if (ind[i] > ind[j]) {
                    ++above[i * k + j];
                    violated = true;
                } else if (ind[i] < ind[j]) {
                    ++below[i * k + j];
                }
            }
        }
        rep.coupled_violations += violated;
    }
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < k; ++i) {
        const MeanSe p = proportion(counts[i], n);
        rep.probabilities.push_back(p.mean);
        rep.standard_errors.push_back(p.se);
    }
    // Paired differences d = 1{i} - 1{j} take values in {-1, 0, 1}.
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double a = static_cast<double>(above[i * k + j]);
            const double b = static_cast<double>(below[i * k + j]);
            const double mean = (a - b) / nn;
            const double var = ((a + b) / nn - mean * mean) * nn / (nn - 1.0);
            const double se = std::sqrt(std::max(var, 0.0) / nn);
            double z = 0.0;
            if (se > 0.0) {
                z = mean / se;
            } else if (mean > 0.0) {
                z = std::numeric_limits<double>::infinity();
            }
            rep.max_violation_z = std::max(rep.max_violation_z, z);
        }
    }
    rep.monotone = rep.coupled_violations == 0;
    return rep;
}

DualityReport duality_probe(const LevyModel2& model, const DualityGrid& grid, std::size_t n, std::uint64_t seed,
                            const RunOptions& options, double z_crit)
{
    const DualPair pair = make_dual_pair(model);
    const bool killed = pair.flags.l_subordinator;
    DualityReport rep;
    for (std::size_t ti = 0; ti < grid.ts.size(); ++ti) {
        const double t = grid.ts[ti];
        const std::uint64_t base = derive_seed(seed, tag_grid + ti);
        const auto v = sample_maps(model, t, n, derive_seed(base, tag_forward), options, false);
        const auto r = sample_maps(model, t, n, derive_seed(base, tag_dual), options, true);
        for (const double x : grid.xs) {
            for (const double y : grid.ys) {
                std::size_t v_ge = 0, v_le = 0, r_le = 0, r_ge = 0, rk_le = 0;
                for (const auto& m : v) {
                    const double val = m(x);
                    v_ge += val >= y;
                    v_le += val <= y;
                }
                for (const auto& m : r) {
                    const double val = m(y);
                    r_le += val <= x;
                    r_ge += val >= x;
                    rk_le += std::max(val, 0.0) <= x;
                }
                rep.rows.push_back(make_row("dual", t, x, y, v_ge, r_le, n, n, z_crit));
                rep.rows.push_back(make_row("symmetric", t, x, y, v_le, r_ge, n, n, z_crit));
                if (killed && x >= 0.0 && y >= 0.0) {
                    rep.rows.push_back(make_row("killed", t, x, y, v_ge, rk_le, n, n, z_crit));
                }
            }
        }
    }
    rep.failures = static_cast<std::size_t>(
        std::count_if(rep.rows.begin(), rep.rows.end(), [](const DualityRow& r) { return !r.pass; }));
    return rep;
}

void write_csv(std::ostream& os, const DualityReport& report)
{
    os << "t,x,y,p_V,se_V,p_R,se_R,z,pass,relation\n";
    os << std::setprecision(10);
    for (const auto& r : report.rows) {
        os << r.t << ',' << r.x << ',' << r.y << ',' << r.p_v << ',' << r.se_v << ',' << r.p_r << ',' << r.se_r
           << ',' << r.z << ',' << (r.pass ? 1 : 0) << ',' << r.relation << '\n';
    }
}

}  // namespace gouflow
