#include "doctest.h"

#include "gouflow/duality.hpp"
#include "gouflow/gou_process.hpp"
#include "gouflow/presets.hpp"
#include "support.hpp"

using namespace gouflow;
using testing::mixed;

namespace {

// P(V_∞ <= v) when V_∞ = 2/G, G ~ Gamma(3, 1): P(G >= 2/v) summed from the
// Erlang tail.
double dufresne_cdf(double v)
{
    const double a = 2.0 / v;
    return std::exp(-a) * (1.0 + a + 0.5 * a * a);
}

}  // namespace

TEST_SUITE("gou_process")
{
    TEST_CASE("forward solution examples")
    {
        RandomStream rng(1, 0);
        const SamplePath z = sample_path(LevyModel2::zero(), 2.0, Backend::exact, 0.0, rng);
        CHECK(solve_forward(z, LevyModel2::zero(), 1.7).terminal() == 1.7);

        const LevyModel2 ou({-1.0, 1.0}, Cov2{}, 0.0, JumpLaw2::none());
        const SamplePath p = sample_path(ou, 3.0, Backend::exact, 0.0, rng);
        CHECK(solve_forward(p, ou, 0.0).terminal() == doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-14));
    }

    TEST_CASE("degenerate pair stays at k")
    {
        const LevyModel2 m = find_preset("degenerate-k").model;
        for (std::uint64_t s = 0; s < 50; ++s) {
            RandomStream rng(2, s);
            const SamplePath p = sample_path(m, 5.0, Backend::exact, 0.0, rng);
            for (const auto& pt : solve_forward(p, m, 2.0).value.points) {
                REQUIRE(std::abs(pt.value - 2.0) <= 1e-10);
                REQUIRE(std::abs(pt.left - 2.0) <= 1e-10);
            }
            const AlignedSeries e = stochastic_exponential(p);
            const AlignedSeries i = stochastic_integral(e, p, 1);
            for (std::size_t k = 0; k < e.points.size(); ++k) {
                REQUIRE(std::abs(i.points[k].value - 2.0 * (1.0 - e.points[k].value)) <=
                        1e-10 * std::max(1.0, std::abs(i.points[k].value)));
            }
        }
    }

    TEST_CASE("the SDE holds at every jump")
    {
        for (const LevyModel2& m : {testing::mixed_jumps(), testing::sign_flipping()}) {
            for (std::uint64_t s = 0; s < 50; ++s) {
                RandomStream rng(3, s);
                const SamplePath p = sample_path(m, 4.0, Backend::exact, 0.0, rng);
                const GouTrajectory v = solve_forward(p, m, 0.5);
                for (std::size_t k = 0; k < p.events.size(); ++k) {
                    if (p.events[k].is_jump()) {
                        const auto& pt = v.value.points[k];
                        REQUIRE(std::abs(pt.value - pt.left - (pt.left * p.events[k].d1 + p.events[k].d2)) <=
                                1e-10 * std::max(1.0, std::abs(pt.value)));
                    }
                }
                // The direct recursion gives the same trajectory on the exact backend.
                const GouTrajectory d = solve_sde_on_path(p, 0.5);
                CHECK(mixed(v.terminal(), d.terminal()) <= 1e-10);
            }
        }
    }

    TEST_CASE("flow is affine in x with slope E(U)")
    {
        for (std::uint64_t s = 0; s < 30; ++s) {
            RandomStream rng(4, s);
            const LevyModel2 m = testing::sign_flipping();
            const SamplePath p = sample_path(m, 3.0, Backend::exact, 0.0, rng);
            const double e = stochastic_exponential(p).terminal();
            const double v0 = solve_forward(p, m, 0.0).terminal();
            for (double x : {-1.0, 0.5, 2.0}) {
                CHECK(mixed(solve_forward(p, m, x).terminal(), v0 + e * x) <= 1e-10);
            }
        }
    }

    TEST_CASE("monotone coupling under (B)")
    {
        const LevyModel2 m = testing::mixed_jumps();
        for (std::uint64_t s = 0; s < 100; ++s) {
            RandomStream rng(5, s);
            const SamplePath p = sample_path(m, 3.0, Backend::exact, 0.0, rng);
            CHECK(solve_forward(p, m, -0.3).terminal() <= solve_forward(p, m, 0.2).terminal());
        }
    }

    TEST_CASE("Euler scheme: zero model and convergence")
    {
        RandomStream z(6, 0);
        CHECK(solve_sde_euler(LevyModel2::zero(), 0.4, 1.0, 1e-2, z).terminal() == 0.4);

        // Euler recursion against the exact GBM-type flow on the same
        // increments; the RMS gap is O(sqrt(dt)). Jumps are applied exactly
        // by both, so a jump-free driver isolates the rate.
        const LevyModel2 m({0.1, 0.5}, Cov2{1.0, 0.0, 0.5}, 0.0, JumpLaw2::none());
        auto rms = [&](int factor) {
            double sum = 0.0;
            for (std::uint64_t s = 0; s < 500; ++s) {
                RandomStream rng(7, s);
                const EventPath p = coarsen(sample_path(m, 1.0, Backend::euler, 2.5e-3, rng), factor);
                const double gap = solve_sde_on_path(p, 1.0).terminal() - solve_forward(p, m, 1.0).terminal();
                sum += gap * gap;
            }
            return std::sqrt(sum / 500.0);
        };
        const double ratio = rms(4) / rms(2);
        CHECK(ratio >= 1.2);
        CHECK(ratio <= 1.7);
    }

    TEST_CASE("exponential functional examples")
    {
        const LevyModel2 ou({-1.0, 1.0}, Cov2{}, 0.0, JumpLaw2::none());
        RandomStream rng(8, 0);
        const FunctionalSample c = exp_functional(ou, FunctionalKind::causal, 5.0, Backend::exact, 0.0, rng);
        CHECK(c.value == doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-14));
        CHECK(c.diagnostic == doctest::Approx(std::exp(-5.0)));

        const StationarySample s = stationary_sampler(ou, FunctionalKind::causal, 100, 15.0, 9);
        CHECK(s.law.min() >= 1.0 - 1e-6);
        CHECK(s.law.max() <= 1.0);
        CHECK(s.flagged);  // e^{-15} is above the 1e-8 diagnostic threshold
        CHECK_FALSE(stationary_sampler(ou, FunctionalKind::causal, 100, 30.0, 9).flagged);

        // Degenerate pair with E(U) -> 0: point mass at k.
        const LevyModel2 k({-1.0, 2.0}, Cov2{}, 0.0, JumpLaw2::none());
        const StationarySample ks = stationary_sampler(k, FunctionalKind::causal, 20, 30.0, 10);
        CHECK(ks.law.min() == doctest::Approx(2.0));
        CHECK(ks.law.max() == doctest::Approx(2.0));
    }

    TEST_CASE("streaming evaluators match the materialized paths")
    {
        for (Backend b : {Backend::exact, Backend::euler}) {
            const LevyModel2 m = b == Backend::exact ? testing::mixed_jumps() : testing::brownian_jumps();
            for (std::uint64_t s = 0; s < 20; ++s) {
                for (FunctionalKind kind : {FunctionalKind::causal, FunctionalKind::noncausal}) {
                    RandomStream a(11, s), c(11, s);
                    const FunctionalSample streamed = exp_functional(m, kind, 3.0, b, 1e-2, a);
                    const FunctionalSample stored = exp_functional(sample_path(m, 3.0, b, 1e-2, c), m, kind);
                    CHECK(mixed(stored.value, streamed.value) <= 1e-12);
                    CHECK(mixed(stored.diagnostic, streamed.diagnostic) <= 1e-12);
                }
                RandomStream a(12, s), c(12, s);
                const AffineMap map = sample_terminal_map(m, 2.0, b, 1e-2, a);
                const SamplePath p = sample_path(m, 2.0, b, 1e-2, c);
                CHECK(mixed(solve_forward(p, m, 0.7).terminal(), map(0.7)) <= 1e-12);
                RandomStream d(12, s);
                const AffineMap dual = sample_terminal_map(m, 2.0, b, 1e-2, d, true);
                CHECK(mixed(dual_solve(p, m, -0.4).trajectory.terminal(), dual(-0.4)) <= 1e-12);
            }
        }
    }

    TEST_CASE("finite-horizon identity in law")
    {
        // E(U)_t ∫ E(U)^{-1} dη against ∫ E(U)_- dL at t = 1.
        const LevyModel2 m = testing::mixed_jumps();
        std::vector<double> a, b;
        for (std::uint64_t s = 0; s < 3000; ++s) {
            RandomStream r1(13, s);
            a.push_back(sample_terminal_map(m, 1.0, Backend::exact, 0.0, r1).intercept);
            RandomStream r2(14, s);
            b.push_back(exp_functional(m, FunctionalKind::causal, 1.0, Backend::exact, 0.0, r2).value);
        }
        CHECK(ks_two_sample(ecdf(quantize(a, 1e-9)), ecdf(quantize(b, 1e-9))).p_value > 1e-3);
    }

    TEST_CASE("Brownian perpetuity oracle")
    {
        const auto law = brownian_perpetuity_law(find_preset("dufresne").model);
        REQUIRE(law);
        CHECK(law->shape == doctest::Approx(3.0));
        CHECK(law->scale == doctest::Approx(2.0));
        for (double v : {0.25, 0.5, 1.0, 2.0, 5.0}) {
            CHECK(law->cdf(v) == doctest::Approx(dufresne_cdf(v)).epsilon(1e-12));
        }
        CHECK(1.0 - law->cdf(1.0) == doctest::Approx(0.3233).epsilon(1e-3));
        CHECK_FALSE(brownian_perpetuity_law(testing::mixed_jumps()));

        const StationarySample s =
            stationary_sampler(find_preset("dufresne").model, FunctionalKind::causal, 1500, 30.0, 15,
                               SamplerOptions{Backend::euler, 1e-2});
        CHECK(ks_one_sample(s.law, dufresne_cdf).p_value > 1e-3);
    }
}
