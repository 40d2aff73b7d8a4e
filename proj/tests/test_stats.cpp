#include "doctest.h"

#include <boost/math/distributions/beta.hpp>
#include <sstream>

#include "gouflow/random.hpp"
#include "gouflow/stats.hpp"
#include "json.hpp"

using namespace gouflow;

TEST_SUITE("stats")
{
    TEST_CASE("empirical CDF examples")
    {
        const EmpiricalDistribution d = ecdf({3.0, 1.0, 2.0, 2.0});
        CHECK(d.sorted() == std::vector<double>{1.0, 2.0, 2.0, 3.0});
        CHECK(d.cdf(0.5) == 0.0);
        CHECK(d.cdf(2.0) == 0.75);
        CHECK(d.left_cdf(2.0) == 0.25);
        CHECK(d.survival(2.0) == 0.75);
        CHECK(d.cdf(3.0) == 1.0);
        CHECK(d.max_atom() == 0.5);
        CHECK(d.quantile(0.25) == 1.0);
        CHECK(d.quantile(0.5) == 2.0);
        CHECK(d.quantile(1.0) == 3.0);
        CHECK_THROWS_AS(ecdf({}), std::invalid_argument);
        CHECK_THROWS_AS(ecdf({1.0, std::nan("")}), std::invalid_argument);
    }

    TEST_CASE("KS statistic examples")
    {
        const KsResult r = ks_two_sample(ecdf({1.0, 2.0}), ecdf({1.5, 2.5}));
        CHECK(r.statistic == 0.5);
        CHECK(r.n == 2);
        CHECK(r.m == 2);
        CHECK(ks_two_sample(ecdf({1.0, 2.0, 3.0}), ecdf({1.0, 2.0, 3.0})).statistic == 0.0);
        CHECK(ks_two_sample(ecdf({0.0}), ecdf({1.0})).statistic == 1.0);

        const KsResult one = ks_one_sample(ecdf({0.5}), [](double x) { return std::clamp(x, 0.0, 1.0); });
        CHECK(one.statistic == 0.5);
        CHECK(one.m == 0);

        CHECK(kolmogorov_survival(0.0) == 1.0);
        // Tabulated critical value: P(K > 1.3581) = 0.05.
        CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    }

    TEST_CASE("KS symmetry and invariance under monotone maps")
    {
        RandomStream rng(1, 0);
        std::vector<double> a(300), b(200);
        for (auto& v : a) v = rng.normal();
        for (auto& v : b) v = 0.3 + rng.normal();
        const KsResult ab = ks_two_sample(ecdf(a), ecdf(b));
        const KsResult ba = ks_two_sample(ecdf(b), ecdf(a));
        CHECK(ab.statistic == ba.statistic);
        CHECK(ab.p_value == ba.p_value);
        for (auto& v : a) v = std::exp(v);
        for (auto& v : b) v = std::exp(v);
        CHECK(ks_two_sample(ecdf(a), ecdf(b)).statistic == ab.statistic);
    }

    TEST_CASE("KS rejection rate under the null")
    {
        int rejected = 0;
        for (std::uint64_t s = 0; s < 200; ++s) {
            RandomStream rng(2, s);
            std::vector<double> a(500), b(400);
            for (auto& v : a) v = rng.uniform();
            for (auto& v : b) v = rng.uniform();
            rejected += ks_two_sample(ecdf(a), ecdf(b)).p_value < 0.01;
        }
        // Binomial(200, 0.01) exceeds 8 with probability below 1e-3; the
        // asymptotic p-value is conservative at these sizes.
        CHECK(rejected <= 8);
    }

    TEST_CASE("one-sample KS detects a shifted law")
    {
        RandomStream rng(3, 0);
        std::vector<double> a(2000);
        for (auto& v : a) v = rng.uniform();
        CHECK(ks_one_sample(ecdf(a), [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value > 1e-3);
        for (auto& v : a) v += 0.1;
        CHECK(ks_one_sample(ecdf(a), [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value < 1e-6);
    }

    TEST_CASE("binomial intervals")
    {
        const Interval w = binomial_ci(50, 100);
        CHECK(w.lo == doctest::Approx(0.4038).epsilon(1e-3));
        CHECK(w.hi == doctest::Approx(0.5962).epsilon(1e-3));

        // Close to the exact Clopper-Pearson interval at this size.
        const boost::math::beta_distribution<> lo(50, 51), hi(51, 50);
        CHECK(std::abs(w.lo - boost::math::quantile(lo, 0.025)) < 0.01);
        CHECK(std::abs(w.hi - boost::math::quantile(hi, 0.975)) < 0.01);

        const Interval zero = binomial_ci(0, 100);
        CHECK(zero.lo == 0.0);
        CHECK(zero.hi > 0.0);
        CHECK(zero.hi < 0.05);
        const Interval all = binomial_ci(100, 100);
        CHECK(all.hi == doctest::Approx(1.0));
        CHECK(binomial_ci(30, 100, 0.99).lo < binomial_ci(30, 100, 0.95).lo);
    }

    TEST_CASE("normal quantile and moments")
    {
        CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
        CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054));
        CHECK(normal_quantile(0.9995) == doctest::Approx(3.290526731491926));

        const MeanSe m = mean_se({1.0, 2.0, 3.0, 4.0});
        CHECK(m.mean == 2.5);
        CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
        const MeanSe p = proportion(25, 100);
        CHECK(p.mean == 0.25);
        CHECK(p.se == doctest::Approx(std::sqrt(0.25 * 0.75 / 100.0)));
    }

    TEST_CASE("bootstrap standard error")
    {
        RandomStream rng(4, 0);
        std::vector<double> v(400);
        for (auto& x : v) x = rng.normal();
        auto mean = [](const std::vector<double>& s) {
            double t = 0.0;
            for (double x : s) t += x;
            return t / static_cast<double>(s.size());
        };
        const double a = bootstrap_se(v, mean, 400, 7);
        CHECK(a == bootstrap_se(v, mean, 400, 7));
        CHECK(a == doctest::Approx(mean_se(v).se).epsilon(0.15));
        CHECK(bootstrap_se(std::vector<double>(50, 1.0), mean, 100, 1) == 0.0);
    }

    TEST_CASE("quantize")
    {
        const auto q = quantize({1.0 + 1e-13, 1.0 - 1e-13, 0.25}, 1e-9);
        CHECK(q[0] == q[1]);
        CHECK(q[2] == 0.25);
    }

    TEST_CASE("sample export and sidecar")
    {
        EmpiricalDistribution d = ecdf({2.0, 1.0});
        d.seed = 42;
        d.horizon = 30.0;
        d.diagnostic_failure_fraction = 0.25;
        std::ostringstream os;
        write_sample_csv(os, d);
        CHECK(os.str().find("1\n2\n") != std::string::npos);
        const auto j = nlohmann::json::parse(sidecar_json(d));
        CHECK(j["n"] == 2);
        CHECK(j["seed"] == 42);
        CHECK(j["horizon"] == 30.0);
        CHECK(j["diagnostic_failure_fraction"] == 0.25);
    }
}
