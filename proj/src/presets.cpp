#include "gouflow/presets.hpp"

#include <stdexcept>

namespace gouflow {

namespace {

Preset make(std::string name, std::string description, LevyModel2 model, Backend backend = Backend::exact)
{
    return Preset{std::move(name), std::move(description), std::move(model), backend, 1e-3, 30.0, {}};
}

std::vector<Preset> build()
{
    std::vector<Preset> out;

    {
        Preset p = make("zero", "U = L = 0; every process stays at its start value", LevyModel2::zero());
        p.horizon = 1.0;
        p.defaults.ruin_levels = {0.5, 1.0};
        out.push_back(p);
    }
    {
        // Classical OU with mean reversion 1, Brownian noise and mixed-sign
        // compound Poisson shocks.
        LevyModel2 m({-1.0, 0.0}, Cov2{0.0, 0.0, 1.0}, 1.0,
                     JumpLaw2(IndependentLaw{PointMasses{{0.0}, {1.0}}, Uniform{-1.0, 2.0}}));
        Preset p = make("drift-ou", "dV = -V dt + dB + dJ, J compound Poisson with U(-1, 2) marks", m, Backend::euler);
        p.horizon = 30.0;
        out.push_back(p);
    }
    {
        // Risky investment with two return atoms, premium rate 1 and
        // exponential claims.
        LevyModel2 m({0.3, 1.0}, Cov2{}, 1.0,
                     JumpLaw2(IndependentLaw{PointMasses{{-0.2, 0.25}, {0.5, 0.5}}, SignedExponential{1.0, -1}}));
        Preset p = make("cramer-paulsen", "premium 1, Exp(1) claims, investment returns in {-20%, +25%}", m);
        p.horizon = 80.0;
        p.defaults.ruin_levels = {0.5, 1.0};
        out.push_back(p);
    }
    {
        // ξ = -U + t/2 = 1.5 t - B_t, so 2μ/σ² = 3, and η_t = t.
        LevyModel2 m({-1.0, 1.0}, Cov2{1.0, 0.0, 0.0}, 0.0, JumpLaw2::none());
        Preset p = make("dufresne", "U = -t + B_t, L = t; V_inf = 2 / Gamma(3)", m, Backend::euler);
        p.horizon = 30.0;
        p.defaults.ruin_levels = {0.5, 1.0, 2.0};
        out.push_back(p);
    }
    {
        // k = 2: 2 * (0.5, 1, -0.5) = -(-1, -2, 1).
        LevyModel2 m({0.5, -1.0}, Cov2{}, 1.0,
                     JumpLaw2(PointMassLaw{{{1.0, -2.0, 0.5}, {-0.5, 1.0, 0.5}}}));
        Preset p = make("degenerate-k", "k U = -L with k = 2; V^2 stays at 2", m);
        p.horizon = 5.0;
        p.defaults.ruin_levels = {0.5, 1.0};
        out.push_back(p);
    }
    {
        LevyModel2 m({0.0, 1.0}, Cov2{}, 1.0, JumpLaw2(PointMassLaw{{{-2.0, 0.0, 0.5}, {0.5, 0.0, 0.5}}}));
        Preset p = make("nonmonotone", "jumps ΔU = -2 flip the sign of E(U); no stochastic monotonicity", m);
        p.horizon = 5.0;
        p.defaults.monotonicity = {1.0, -1.0, {0.0, 2.0, 4.0, 8.0}};
        out.push_back(p);
    }
    return out;
}

}  // namespace

const std::vector<Preset>& presets()
{
    static const std::vector<Preset> all = build();
    return all;
}

const Preset& find_preset(std::string_view name)
{
    for (const auto& p : presets()) {
        if (p.name == name) {
            return p;
        }
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace gouflow
