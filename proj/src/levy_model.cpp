#include "gouflow/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gouflow/errors.hpp"

namespace gouflow {

namespace {

using cplx = std::complex<double>;

double quadratic_form(const Cov2& c, const Vec2& t)
{
    return c.uu * t[0] * t[0] + 2.0 * c.ul * t[0] * t[1] + c.ll * t[1] * t[1];
}

Vec2 truncated_jump_mean(const JumpLaw2& law)
{
    Vec2 sum{0.0, 0.0};
    for (const auto& a : law.atoms()) {
        if (std::hypot(a.du, a.dl) <= 1.0) {
            sum[0] += a.prob * a.du;
            sum[1] += a.prob * a.dl;
        }
    }
    return sum;
}

bool dl_zero(const JumpLaw2& law) { return law.dl_nonnegative() && law.dl_nonpositive(); }

}  // namespace

LevyModel2::LevyModel2(Vec2 drift, Cov2 cov, double jump_intensity, JumpLaw2 jump_law)
    : drift_(drift), cov_(cov), intensity_(jump_intensity), law_(std::move(jump_law))
{
    if (!std::isfinite(drift_[0]) || !std::isfinite(drift_[1])) {
        throw std::invalid_argument("drift must be finite");
    }
    if (!std::isfinite(cov_.uu) || !std::isfinite(cov_.ul) || !std::isfinite(cov_.ll) || cov_.uu < 0.0 ||
        cov_.ll < 0.0) {
        throw std::invalid_argument("gaussian covariance needs finite entries and nonnegative diagonal");
    }
    const double det = cov_.uu * cov_.ll - cov_.ul * cov_.ul;
    if (det < -1e-12 * std::max(1.0, cov_.uu * cov_.ll)) {
        throw std::invalid_argument("gaussian covariance is not positive semidefinite");
    }
    if (!(intensity_ >= 0.0) || !std::isfinite(intensity_)) {
        throw std::invalid_argument("jump intensity must be finite and nonnegative");
    }
}

LevyModel2 LevyModel2::zero()
{
    return LevyModel2({0.0, 0.0}, Cov2{}, 0.0, JumpLaw2::none());
}

LevyModel2 LevyModel2::from_triplet_location(Vec2 gamma, Cov2 cov, double jump_intensity, JumpLaw2 jump_law)
{
    const Vec2 m = truncated_jump_mean(jump_law);
    return LevyModel2({gamma[0] - jump_intensity * m[0], gamma[1] - jump_intensity * m[1]}, cov, jump_intensity,
                      std::move(jump_law));
}

Vec2 LevyModel2::triplet_location() const
{
    const Vec2 m = truncated_jump_mean(law_);
    return {drift_[0] + intensity_ * m[0], drift_[1] + intensity_ * m[1]};
}

double LevyModel2::marginal_location(int component) const
{
    return drift_.at(static_cast<std::size_t>(component)) +
           (intensity_ > 0.0 ? intensity_ * law_.marginal_truncated_mean(component) : 0.0);
}

bool LevyModel2::condition_b() const { return intensity_ == 0.0 || law_.condition_b(); }

ModelFlags LevyModel2::flags() const
{
    const bool jumps = intensity_ > 0.0;
    ModelFlags f;
    f.condition_b = condition_b();
    f.l_subordinator = drift_[1] >= 0.0 && cov_.ll == 0.0 && (!jumps || law_.dl_nonnegative());
    f.neg_l_subordinator = drift_[1] <= 0.0 && cov_.ll == 0.0 && (!jumps || law_.dl_nonpositive());
    f.u_zero = drift_[0] == 0.0 && cov_.uu == 0.0 && (!jumps || law_.du_zero());
    f.l_zero = drift_[1] == 0.0 && cov_.ll == 0.0 && (!jumps || dl_zero(law_));
    return f;
}

bool operator==(const LevyModel2& a, const LevyModel2& b)
{
    return a.drift() == b.drift() && a.cov() == b.cov() && a.jump_intensity() == b.jump_intensity() &&
           a.jump_law() == b.jump_law();
}

std::complex<double> characteristic_exponent(const LevyModel2& model, Vec2 theta)
{
    if (!std::isfinite(theta[0]) || !std::isfinite(theta[1])) {
        throw std::invalid_argument("characteristic exponent needs a finite argument");
    }
    const cplx i(0.0, 1.0);
    const auto& b = model.drift();
    cplx psi = i * (theta[0] * b[0] + theta[1] * b[1]) - 0.5 * quadratic_form(model.cov(), theta);
    if (model.has_jumps()) {
        psi += model.jump_intensity() * (model.jump_law().characteristic_function(theta[0], theta[1]) - 1.0);
    }
    return psi;
}

std::complex<double> characteristic_exponent_triplet_form(const LevyModel2& model, Vec2 theta)
{
    const cplx i(0.0, 1.0);
    const Vec2 gamma = model.triplet_location();
    cplx psi = i * (theta[0] * gamma[0] + theta[1] * gamma[1]) - 0.5 * quadratic_form(model.cov(), theta);
    if (model.has_jumps()) {
        cplx integral = 0.0;
        for (const auto& a : model.jump_law().atoms()) {
            const double dot = theta[0] * a.du + theta[1] * a.dl;
            const double small = std::hypot(a.du, a.dl) <= 1.0 ? 1.0 : 0.0;
            integral += a.prob * (std::exp(i * dot) - 1.0 - i * dot * small);
        }
        psi += model.jump_intensity() * integral;
    }
    return psi;
}

double dual_location_gamma_form(const LevyModel2& model)
{
    const double gamma_u = model.marginal_location(0);
    double integral = 0.0;
    if (model.has_jumps()) {
        integral = model.jump_intensity() * model.jump_law().expect([](double u, double) {
            const double small = std::abs(u) <= 1.0 ? u : 0.0;
            const double mapped = u >= -0.5 ? u / (1.0 + u) : 0.0;
            return small - mapped;
        });
    }
    return -gamma_u + model.cov().uu + integral;
}

LevyModel2 dual_model(const LevyModel2& model_ul)
{
    if (!model_ul.condition_b()) {
        throw ConditionViolation("condition (B)",
                                 "no Siegmund dual exists: the driver U has jumps dU <= -1 with positive probability");
    }
    const auto& b = model_ul.drift();
    const auto& c = model_ul.cov();
    const bool transform_law = model_ul.has_jumps() || model_ul.jump_law().condition_b();
    return LevyModel2({-b[0] + c.uu, -b[1] + c.ul}, c, model_ul.jump_intensity(),
                      transform_law ? model_ul.jump_law().dual() : model_ul.jump_law());
}

Degeneracy detect_degeneracy(const LevyModel2& model, double tol)
{
    const auto& b = model.drift();
    const auto& c = model.cov();
    const bool jumps = model.has_jumps();
    const JumpLaw2& law = model.jump_law();

    // Jump support, reduced either to finitely many points or to a line
    // through the origin {l = -k u}.
    std::vector<Jump2> points;
    std::optional<double> line_k;
    bool support_known = true;
    if (jumps) {
        if (law.is_point_mass()) {
            for (const auto& a : law.atoms()) {
                if (a.prob > 0.0) {
                    points.push_back({a.du, a.dl});
                }
            }
        } else if (const auto* lk = std::get_if<LinkedLaw>(&law.variant())) {
            if (lk->intercept == 0.0) {
                line_k = -lk->slope;
            } else {
                support_known = false;
            }
        } else if (const auto* ind = std::get_if<IndependentLaw>(&law.variant())) {
            const bool single = support_min(ind->du) == support_max(ind->du) &&
                                support_min(ind->dl) == support_max(ind->dl);
            if (single) {
                points.push_back({support_min(ind->du), support_min(ind->dl)});
            } else {
                support_known = false;
            }
        } else {
            const auto& base = std::get<DualImageLaw>(law.variant()).base;
            const auto* blk = std::get_if<LinkedLaw>(&base->variant());
            if (blk != nullptr && blk->intercept == 0.0) {
                // (-u/(1+u), -βu/(1+u)) lies on the same line as (u, βu).
                line_k = -blk->slope;
            } else {
                support_known = false;
            }
        }
    }
    if (!support_known) {
        return {};
    }

    // Candidate k from the first U-component that is not identically zero.
    std::optional<double> k;
    if (b[0] != 0.0) {
        k = -b[1] / b[0];
    } else if (c.uu > 0.0) {
        k = -c.ul / c.uu;
    } else if (line_k) {
        k = line_k;
    } else {
        for (const auto& p : points) {
            if (p.du != 0.0) {
                k = -p.dl / p.du;
                break;
            }
        }
    }
    if (!k || *k == 0.0 || !std::isfinite(*k)) {
        return {};
    }

    const double kk = *k;
    const auto rel = [](double residual, double scale) { return std::abs(residual) / std::max(1.0, scale); };
    double margin = 0.0;
    margin = std::max(margin, rel(kk * b[0] + b[1], std::abs(kk * b[0]) + std::abs(b[1])));
    margin = std::max(margin, rel(c.ll - kk * kk * c.uu, c.ll + kk * kk * c.uu));
    margin = std::max(margin, rel(c.ul + kk * c.uu, std::abs(c.ul) + std::abs(kk * c.uu)));
    if (line_k) {
        margin = std::max(margin, rel(*line_k - kk, std::abs(kk)));
    }
    for (const auto& p : points) {
        margin = std::max(margin, rel(p.dl + kk * p.du, std::abs(p.dl) + std::abs(kk * p.du)));
    }
    Degeneracy out;
    out.margin = margin;
    if (margin <= tol) {
        out.k = kk;
    }
    return out;
}

}  // namespace gouflow
