#include "doctest.h"

#include "gouflow/errors.hpp"
#include "gouflow/stochastic_calculus.hpp"
#include "support.hpp"

using namespace gouflow;
using testing::jump;
using testing::make_path;
using testing::seg;

TEST_SUITE("stochastic_calculus")
{
    TEST_CASE("stochastic exponential examples")
    {
        const AlignedSeries one = stochastic_exponential(make_path(1.0, {seg(0, 1, 0, 0)}));
        CHECK(one.terminal() == 1.0);
        CHECK(stochastic_exponential(make_path(1.0, {seg(0, 1, 1.0, 0)})).terminal() ==
              doctest::Approx(2.718281828459045));

        const EventPath j = make_path(1.0, {seg(0, 0.3, 0, 0), jump(0.3, -0.5, 0), seg(0.3, 0.7, 0, 0)});
        const AlignedSeries e = stochastic_exponential(j);
        REQUIRE(e.points.size() == 3);
        CHECK(e.points[0].value == 1.0);
        CHECK(e.points[1].left == 1.0);
        CHECK(e.points[1].value == 0.5);
        CHECK(e.points[2].value == 0.5);
        CHECK_THROWS_AS(stochastic_exponential(make_path(1.0, {jump(0.5, -1.0, 0)})), ConditionViolation);

        // Gaussian part: e^{X - σ² t/2}.
        const EventPath g = make_path(2.0, {seg(0, 2, 0.3, 0)}, GaussianPart{0.5, 0, 0});
        CHECK(stochastic_exponential(g).terminal() == doctest::Approx(std::exp(0.3 - 0.5)));
    }

    TEST_CASE("E(U) E(W) = 1 on exact paths")
    {
        for (std::uint64_t s = 0; s < 200; ++s) {
            RandomStream rng(31, s);
            const SamplePath p = sample_path(testing::mixed_jumps(), 5.0, Backend::exact, 0.0, rng);
            const AlignedSeries eu = stochastic_exponential(p);
            const AlignedSeries ew = stochastic_exponential(w_path(p));
            for (std::size_t i = 0; i < eu.points.size(); ++i) {
                REQUIRE(std::abs(eu.points[i].value * ew.points[i].value - 1.0) <= 1e-10);
                REQUIRE(std::abs(eu.points[i].left * ew.points[i].left - 1.0) <= 1e-10);
            }
        }
    }

    TEST_CASE("sign of E(U)")
    {
        std::size_t negative = 0;
        for (std::uint64_t s = 0; s < 200; ++s) {
            RandomStream a(32, s);
            for (const auto& p : stochastic_exponential(sample_path(testing::mixed_jumps(), 3.0, Backend::exact, 0.0, a)).points) {
                REQUIRE(p.value > 0.0);
            }
            RandomStream b(33, s);
            negative += stochastic_exponential(sample_path(testing::sign_flipping(), 3.0, Backend::exact, 0.0, b))
                            .terminal() < 0.0;
        }
        CHECK(negative > 20);
        CHECK(negative < 180);
    }

    TEST_CASE("stochastic integral examples")
    {
        AlignedSeries ones;
        ones.initial = 1.0;
        ones.points = {{1.0, 1.0, 1.0, 0.0}};
        const EventPath drift = make_path(1.0, {seg(0, 1, 0.0, 0.8)});
        CHECK(stochastic_integral(ones, drift, 1).terminal() == doctest::Approx(0.8));

        const EventPath j = make_path(1.0, {seg(0, 0.5, 0, 0), jump(0.5, 0, 2.0), seg(0.5, 0.5, 0, 0)});
        AlignedSeries h;
        h.initial = 3.0;
        h.points = {{0.5, 3.0, 3.0, 0.0}, {0.5, 3.0, 7.0, 0.0}, {1.0, 7.0, 7.0, 0.0}};
        const AlignedSeries i = stochastic_integral(h, j, 1);
        CHECK(i.points[1].value - i.points[1].left == doctest::Approx(6.0));
    }

    TEST_CASE("E(X) solves its defining equation on exact paths")
    {
        for (std::uint64_t s = 0; s < 100; ++s) {
            RandomStream rng(34, s);
            const SamplePath p = sample_path(testing::mixed_jumps(), 4.0, Backend::exact, 0.0, rng);
            const AlignedSeries e = stochastic_exponential(p);
            const AlignedSeries i = stochastic_integral(e, p, 0);
            for (std::size_t k = 0; k < e.points.size(); ++k) {
                REQUIRE(testing::mixed(e.points[k].value, 1.0 + i.points[k].value) <= 1e-12);
            }
        }
    }

    TEST_CASE("left-point integral of B against itself")
    {
        // Σ B_k ΔB_k = (B_1² - Σ ΔB_k²)/2 on the grid, so the error against
        // the Itô value (B_1² - 1)/2 has RMS sqrt(dt/2): halving dt divides
        // it by √2.
        const LevyModel2 bm({0.0, 0.0}, Cov2{0.0, 0.0, 1.0}, 0.0, JumpLaw2::none());
        auto rms = [&](int factor) {
            double sum = 0.0;
            for (std::uint64_t s = 0; s < 200; ++s) {
                RandomStream rng(35, s);
                EventPath p = coarsen(sample_path(bm, 1.0, Backend::euler, 1e-3, rng), factor);
                AlignedSeries b;
                b.backend = Backend::euler;
                double x = 0.0;
                for (const auto& e : p.events) {
                    b.points.push_back({e.end_time(), x, x + e.d2, 0.0});
                    x += e.d2;
                }
                const double ito = 0.5 * (x * x - 1.0);
                const double err = stochastic_integral(b, p, 1).terminal() - ito;
                sum += err * err;
            }
            return std::sqrt(sum / 200.0);
        };
        const double coarse = rms(8);
        const double fine = rms(4);
        CHECK(coarse / fine > 1.2);
        CHECK(coarse / fine < 1.7);
        CHECK(coarse == doctest::Approx(std::sqrt(8e-3 / 2.0)).epsilon(0.2));
    }

    TEST_CASE("quadratic covariation examples")
    {
        const EventPath a = make_path(2.0, {seg(0, 1, 0.1, 0), jump(1, 1.0, 0), seg(1, 1, 0, 0)});
        const EventPath b = make_path(2.0, {seg(0, 1, 0, 0.2), jump(1, 0.0, 2.0), seg(1, 1, 0, 0)});
        // Drift segments carry no covariation; the common jump at 1 does.
        CHECK(quadratic_covariation(a, 0, b, 1).terminal() == doctest::Approx(2.0));
        const EventPath d = make_path(2.0, {seg(0, 2, 0.4, 0.4)});
        CHECK(quadratic_covariation(d, 0, d, 1).terminal() == 0.0);
        const EventPath c = make_path(2.0, {seg(0, 1, 0, 0), jump(1, 1.0, 2.0), seg(1, 1, 0, 0)});
        CHECK(quadratic_covariation(c, 0, c, 1).terminal() == doctest::Approx(2.0));
        CHECK(quadratic_covariation(c, 0, c, 1, 0.5).terminal() == doctest::Approx(2.0 + 1.0));

        const LevyModel2 bm({0.0, 0.0}, Cov2{1.0, 0.0, 0.0}, 0.0, JumpLaw2::none());
        RandomStream rng(36, 0);
        const SamplePath p = sample_path(bm, 1.0, Backend::euler, 1e-4, rng);
        // Realized variance of 1e4 steps: sd sqrt(2e-4).
        CHECK(std::abs(quadratic_covariation(p, 0, p, 0).terminal() - 1.0) < 5.0 * std::sqrt(2e-4));
    }

    TEST_CASE("reciprocal")
    {
        RandomStream rng(37, 0);
        const SamplePath p = sample_path(testing::mixed_jumps(), 3.0, Backend::exact, 0.0, rng);
        const AlignedSeries e = stochastic_exponential(p);
        const AlignedSeries r = reciprocal(e);
        for (std::size_t i = 0; i < e.points.size(); ++i) {
            CHECK(r.points[i].value * e.points[i].value == doctest::Approx(1.0));
            CHECK(r.points[i].log_growth == -e.points[i].log_growth);
        }
    }
}
