#include "doctest.h"

#include <sstream>

#include "gouflow/errors.hpp"
#include "gouflow/path.hpp"
#include "gouflow/presets.hpp"
#include "gouflow/stats.hpp"
#include "support.hpp"

using namespace gouflow;
using testing::jump;
using testing::make_path;
using testing::seg;

namespace {

SamplePath sampled(const LevyModel2& m, double horizon, std::uint64_t stream, Backend b = Backend::exact,
                   double dt = 1e-2)
{
    RandomStream rng(2024, stream);
    return sample_path(m, horizon, b, dt, rng);
}

}  // namespace

TEST_SUITE("path_engine")
{
    TEST_CASE("zero model gives one empty segment")
    {
        const SamplePath p = sampled(LevyModel2::zero(), 1.0, 0);
        REQUIRE(p.events.size() == 1);
        CHECK(p.events[0] == seg(0.0, 1.0, 0.0, 0.0));
        validate(p);
    }

    TEST_CASE("pure drift")
    {
        const SamplePath p = sampled(LevyModel2({2.0, 0.0}, Cov2{}, 0.0, JumpLaw2::none()), 1.0, 0);
        CHECK(p.terminal(0) == doctest::Approx(2.0));
        CHECK(p.value_at(0, 0.25) == doctest::Approx(0.5));
    }

    TEST_CASE("Poisson jump count")
    {
        const LevyModel2 m({0.0, 0.0}, Cov2{}, 3.0, JumpLaw2(PointMassLaw{{{0.1, 0.1, 1.0}}}));
        const SamplePath p = sampled(m, 1000.0, 1);
        const double rate = static_cast<double>(p.jump_count()) / 1000.0;
        CHECK(std::abs(rate - 3.0) <= 3.0 * std::sqrt(3.0 / 1000.0));
        validate(p);
        double total = 0.0;
        for (const auto& e : p.events) {
            total += e.dt;
        }
        CHECK(std::abs(total - 1000.0) < 1e-9);
    }

    TEST_CASE("exact backend refuses a Gaussian part; Euler needs a step")
    {
        RandomStream rng(1, 0);
        CHECK_THROWS_AS(sample_path(testing::brownian_jumps(), 1.0, Backend::exact, 0.0, rng), std::invalid_argument);
        CHECK_THROWS_AS(sample_path(testing::brownian_jumps(), 1.0, Backend::euler, 0.0, rng), std::invalid_argument);
        CHECK_THROWS_AS(sample_path(LevyModel2::zero(), 0.0, Backend::exact, 0.0, rng), std::invalid_argument);
    }

    TEST_CASE("Euler steps never exceed grid_dt and carry the covariance")
    {
        const LevyModel2 m({0.0, 0.0}, Cov2{1.0, 0.6, 2.0}, 0.0, JumpLaw2::none());
        const SamplePath p = sampled(m, 200.0, 2, Backend::euler, 0.01);
        double suu = 0.0, sul = 0.0, sll = 0.0;
        for (const auto& e : p.events) {
            REQUIRE(e.dt <= 0.01 + 1e-15);
            suu += e.d1 * e.d1;
            sul += e.d1 * e.d2;
            sll += e.d2 * e.d2;
        }
        // Realized covariation over 2e4 steps: relative sd about 1%.
        CHECK(suu / 200.0 == doctest::Approx(1.0).epsilon(0.05));
        CHECK(sul / 200.0 == doctest::Approx(0.6).epsilon(0.08));
        CHECK(sll / 200.0 == doctest::Approx(2.0).epsilon(0.05));
    }

    TEST_CASE("streamed events equal the sampled path")
    {
        for (Backend b : {Backend::exact, Backend::euler}) {
            const LevyModel2 m = b == Backend::exact ? testing::mixed_jumps() : testing::brownian_jumps();
            for (std::uint64_t s = 0; s < 5; ++s) {
                const SamplePath p = sampled(m, 3.0, s, b);
                std::vector<Event> got;
                RandomStream rng(2024, s);
                sample_events(m, 3.0, b, 1e-2, rng, [&](const Event& e) { got.push_back(e); });
                CHECK(got == p.events);

                std::vector<Event> prefix;
                RandomStream rng2(2024, s);
                const bool finished = sample_events_until(m, 3.0, b, 1e-2, rng2, [&](const Event& e) {
                    prefix.push_back(e);
                    return prefix.size() < 3;
                });
                CHECK_FALSE(finished);
                REQUIRE(prefix.size() == 3);
                CHECK(std::equal(prefix.begin(), prefix.end(), p.events.begin()));
            }
        }
    }

    TEST_CASE("eta path examples")
    {
        // No common jumps and no Gaussian covariance: η = L.
        const EventPath a = make_path(2.0, {seg(0, 1, 0.3, 0.5), jump(1, 0.0, 2.0), jump(1, 1.0, 0.0), seg(1, 1, 0, 1)});
        const DerivedPath ea = eta_path(a);
        for (std::size_t i = 0; i < a.events.size(); ++i) {
            CHECK(ea.events[i].d2 == a.events[i].d2);
        }
        // Common jump (1, 2): Δη = 2 / (1 + 1) = 1.
        const EventPath b = make_path(1.0, {seg(0, 0.5, 0, 0), jump(0.5, 1.0, 2.0), seg(0.5, 0.5, 0, 0)});
        CHECK(eta_path(b).events[1].d2 == 1.0);
        // σ_UL = 0.5 on a continuous path: η_t = L_t - 0.5 t.
        const EventPath c = make_path(2.0, {seg(0, 2, 0.4, 1.0)}, GaussianPart{1.0, 0.5, 1.0});
        CHECK(eta_path(c).terminal(1) == doctest::Approx(1.0 - 1.0));
        const EventPath bad = make_path(1.0, {jump(0.5, -1.0, 1.0)});
        CHECK_THROWS(eta_path(bad));
    }

    TEST_CASE("W path examples")
    {
        const EventPath p = make_path(1.0, {seg(0, 0.5, 0.2, 0), jump(0.5, 1.0, 0), jump(0.5, -0.5, 0), seg(0.5, 0.5, -0.1, 0)});
        const DerivedPath w = w_path(p);
        CHECK(w.events[0].d1 == -0.2);
        CHECK(w.events[1].d1 == -0.5);
        CHECK(w.events[2].d1 == 1.0);
        CHECK(w.events[3].d1 == 0.1);
        // The Gaussian part of U adds σ_U² dt to the continuous part.
        const EventPath g = make_path(2.0, {seg(0, 2, 0.3, 0)}, GaussianPart{0.25, 0, 0});
        CHECK(w_path(g).events[0].d1 == doctest::Approx(-0.3 + 0.5));
    }

    TEST_CASE("xi path examples and recovery of (U, L)")
    {
        CHECK(xi_path(make_path(1.0, {seg(0, 1, 0, 0)})).terminal(0) == 0.0);
        const EventPath j = make_path(1.0, {seg(0, 0.5, 0, 0), jump(0.5, 1.0, 0), seg(0.5, 0.5, 0, 0)});
        CHECK(xi_path(j).events[1].d1 == doctest::Approx(-std::log(2.0)));
        const EventPath d = make_path(3.0, {seg(0, 3, 0.6, 0)});
        CHECK(xi_path(d).terminal(0) == doctest::Approx(-0.6));
        CHECK_THROWS_AS(xi_path(make_path(1.0, {jump(0.5, -1.5, 0)})), ConditionViolation);

        // A single jump Δξ = log 2 recovers ΔU = -1/2.
        const EventPath xe = make_path(1.0, {jump(0.5, std::log(2.0), 0.0)});
        CHECK(recover_ul_from_xi_eta(xe, 0.0, 0.0).events[0].d1 == doctest::Approx(-0.5));

        // No jumps: U_t = -ξ_t + σ_ξ² t/2.
        const EventPath c = make_path(2.0, {seg(0, 2, 0.7, 0.0)}, GaussianPart{0.5, 0.0, 0.0});
        CHECK(recover_ul_from_xi_eta(c, 0.5, 0.0).terminal(0) == doctest::Approx(-0.7 + 0.5));

        // Round trip through (ξ, η) on sampled paths.
        for (std::uint64_t s = 0; s < 20; ++s) {
            const SamplePath p = sampled(testing::mixed_jumps(), 5.0, s);
            const DerivedPath back = recover_ul_from_xi_eta(xi_path(eta_path(p)), 0.0, 0.0);
            REQUIRE(back.events.size() == p.events.size());
            for (std::size_t i = 0; i < p.events.size(); ++i) {
                CHECK(std::abs(back.events[i].d1 - p.events[i].d1) <= 1e-12);
                CHECK(std::abs(back.events[i].d2 - p.events[i].d2) <= 1e-12);
            }
        }
        const LevyModel2 bm = testing::brownian_jumps();
        const SamplePath p = sampled(bm, 2.0, 3, Backend::euler);
        const DerivedPath back = recover_ul_from_xi_eta(xi_path(eta_path(p)), bm.cov().uu, -bm.cov().ul);
        CHECK(std::abs(back.terminal(0) - p.terminal(0)) < 1e-10);
        CHECK(std::abs(back.terminal(1) - p.terminal(1)) < 1e-10);
    }

    TEST_CASE("reverse path examples")
    {
        const EventPath d = make_path(2.0, {seg(0, 2, 1.4, 0.0)});
        const DerivedPath rd = reverse_path(d, 2.0);
        CHECK(rd.terminal(0) == doctest::Approx(-1.4));
        CHECK(rd.value_at(0, 0.5) == doctest::Approx(-0.35));

        const EventPath j = make_path(3.0, {seg(0, 1, 0, 0), jump(1, 0.4, -0.2), seg(1, 2, 0, 0)});
        const DerivedPath rj = reverse_path(j, 3.0);
        std::size_t jumps = 0;
        for (const auto& e : rj.events) {
            if (e.is_jump()) {
                ++jumps;
                CHECK(e.time == doctest::Approx(2.0));
                CHECK(e.d1 == -0.4);
                CHECK(e.d2 == 0.2);
            }
        }
        CHECK(jumps == 1);
        // X̃_s = X_{(t-s)-} - X_{t-}.
        CHECK(rj.value_at(0, 1.0) == doctest::Approx(j.value_at(0, 2.0, true) - j.value_at(0, 3.0, true)));
        CHECK(rj.value_at(0, 2.5) == doctest::Approx(j.value_at(0, 0.5, true) - j.value_at(0, 3.0, true)));

        // A jump exactly at the reversal time is deleted.
        const EventPath at = make_path(1.0, {seg(0, 1, 0.5, 0), jump(1, 0.9, 0.9)});
        const DerivedPath ra = reverse_path(at, 1.0);
        CHECK(ra.jump_count() == 0);
        CHECK(ra.terminal(0) == doctest::Approx(-0.5));
        CHECK_THROWS(reverse_path(at, 1.5));
    }

    TEST_CASE("reversing twice restores the events")
    {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const SamplePath p = sampled(testing::mixed_jumps(), 4.0, s);
            const DerivedPath rr = reverse_path(reverse_path(p, 4.0), 4.0);
            // A jump at the horizon has probability zero; the sampled path has
            // none. Times are re-summed in the other order and the boundary
            // segment is re-cut at the horizon, so fields agree to rounding.
            REQUIRE(rr.events.size() == p.events.size());
            for (std::size_t i = 0; i < p.events.size(); ++i) {
                CHECK(rr.events[i].kind == p.events[i].kind);
                CHECK(std::abs(rr.events[i].dt - p.events[i].dt) <= 1e-12);
                CHECK(std::abs(rr.events[i].d1 - p.events[i].d1) <= 1e-12);
                CHECK(std::abs(rr.events[i].d2 - p.events[i].d2) <= 1e-12);
                CHECK(std::abs(rr.events[i].time - p.events[i].time) <= 1e-12);
            }
        }
    }

    TEST_CASE("T path examples")
    {
        CHECK(t_path(make_path(1.0, {seg(0, 1, 0, 0)}), 0.0).terminal(0) == 0.0);
        const EventPath r = make_path(1.0, {jump(0.5, -1.0, 0.0)});
        CHECK(t_path(r, 0.0).events[0].d1 == -0.5);
        CHECK_THROWS(t_path(make_path(1.0, {jump(0.5, 1.0, 0.0)}), 0.0));
        const EventPath c = make_path(2.0, {seg(0, 2, 0.3, 0)});
        CHECK(t_path(c, 0.25).terminal(0) == doctest::Approx(0.3 + 0.5));
    }

    TEST_CASE("eta of the dual driver path is -L")
    {
        for (std::uint64_t s = 0; s < 100; ++s) {
            const SamplePath p = sampled(testing::mixed_jumps(), 3.0, s);
            const DerivedPath e = eta_path(dual_driver_path(p));
            REQUIRE(e.events.size() == p.events.size());
            for (std::size_t i = 0; i < p.events.size(); ++i) {
                // ΔK / (1 + ΔW) undoes ΔK = -ΔL / (1 + ΔU) up to rounding.
                CHECK(e.events[i].time == p.events[i].time);
                CHECK(e.events[i].d2 == doctest::Approx(-p.events[i].d2).epsilon(1e-15));
            }
        }
    }

    TEST_CASE("reversed increments have the law of (-U, -L)")
    {
        const LevyModel2 m = testing::mixed_jumps();
        std::vector<double> ru, rl, du, dl;
        for (std::uint64_t s = 0; s < 2000; ++s) {
            RandomStream a(77, s);
            const DerivedPath r = reverse_path(sample_path(m, 2.0, Backend::exact, 0.0, a), 2.0);
            ru.push_back(r.value_at(0, 1.0));
            rl.push_back(r.value_at(1, 1.0));
            RandomStream b(78, s);
            const SamplePath f = sample_path(m, 1.0, Backend::exact, 0.0, b);
            du.push_back(-f.terminal(0));
            dl.push_back(-f.terminal(1));
        }
        CHECK(ks_two_sample(ecdf(quantize(ru, 1e-9)), ecdf(quantize(du, 1e-9))).p_value > 1e-3);
        CHECK(ks_two_sample(ecdf(quantize(rl, 1e-9)), ecdf(quantize(dl, 1e-9))).p_value > 1e-3);
    }

    TEST_CASE("T of a reversed path has the law of W")
    {
        const LevyModel2 m = testing::mixed_jumps();
        std::vector<double> t, w;
        for (std::uint64_t s = 0; s < 2000; ++s) {
            RandomStream a(79, s);
            t.push_back(t_path(reverse_path(sample_path(m, 1.0, Backend::exact, 0.0, a), 1.0), 0.0).terminal(0));
            RandomStream b(80, s);
            w.push_back(w_path(sample_path(m, 1.0, Backend::exact, 0.0, b)).terminal(0));
        }
        CHECK(ks_two_sample(ecdf(quantize(t, 1e-9)), ecdf(quantize(w, 1e-9))).p_value > 1e-3);
    }

    TEST_CASE("slice, coarsen and combine")
    {
        const SamplePath p = sampled(testing::mixed_jumps(), 4.0, 9);
        const EventPath a = slice_path(p, 0.0, 1.5);
        const EventPath b = slice_path(p, 1.5, 4.0);
        CHECK(a.terminal(0) + b.terminal(0) == doctest::Approx(p.terminal(0)));
        CHECK(a.horizon == 1.5);
        validate(a);
        validate(b);

        const LevyModel2 bm = testing::brownian_jumps();
        const SamplePath e = sampled(bm, 2.0, 4, Backend::euler);
        const EventPath c = coarsen(e, 4);
        CHECK(c.events.size() < e.events.size());
        CHECK(c.terminal(0) == doctest::Approx(e.terminal(0)));
        CHECK(c.jump_count() == e.jump_count());
        validate(c);

        const DerivedPath mixed = combine(w_path(p), 0, eta_path(p), 1, 0.0, "W,eta");
        CHECK(same_skeleton(mixed, p));
        CHECK(mixed.terminal(1) == doctest::Approx(eta_path(p).terminal(1)));
        std::ostringstream os;
        write_csv(os, p);
        CHECK(os.str().rfind("time,kind,d1,d2", 0) == 0);
    }
}
