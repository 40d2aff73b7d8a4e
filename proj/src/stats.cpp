#include "gouflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include "json.hpp"

#include "gouflow/random.hpp"

namespace gouflow {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values) : sorted_(std::move(values))
{
    if (sorted_.empty()) {
        throw std::invalid_argument("empirical distribution of an empty sample");
    }
    for (double v : sorted_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("empirical distribution of a non-finite value");
        }
    }
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double x) const noexcept
{
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::left_cdf(double x) const noexcept
{
    const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double p) const
{
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("quantile level must lie in (0, 1]");
    }
    const auto n = static_cast<double>(sorted_.size());
    auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-12));
    k = std::clamp<std::size_t>(k, 1, sorted_.size());
    return sorted_[k - 1];
}

double EmpiricalDistribution::max_atom() const noexcept
{
    std::size_t best = 0;
    std::size_t i = 0;
    while (i < sorted_.size()) {
        std::size_t j = i;
        while (j < sorted_.size() && sorted_[j] == sorted_[i]) {
            ++j;
        }
        best = std::max(best, j - i);
        i = j;
    }
    return static_cast<double>(best) / static_cast<double>(sorted_.size());
}

EmpiricalDistribution ecdf(std::vector<double> values) { return EmpiricalDistribution(std::move(values)); }

double kolmogorov_survival(double lambda) noexcept
{
    if (!(lambda > 0.0)) {
        return 1.0;
    }
    constexpr double pi = 3.14159265358979323846;
    if (lambda < 1.18) {
        // Theta-function form of the CDF converges fast for small lambda.
        const double y = -pi * pi / (8.0 * lambda * lambda);
        double sum = 0.0;
        for (int k = 1; k <= 6; ++k) {
            const double odd = 2.0 * k - 1.0;
            sum += std::exp(odd * odd * y);
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-17) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double effective_n)
{
    const double sn = std::sqrt(effective_n);
    return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

KsResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b)
{
    const auto& x = a.sorted();
    const auto& y = b.sorted();
    const auto n = static_cast<double>(x.size());
    const auto m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) {
            ++i;
        }
        while (j < y.size() && y[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    KsResult r;
    r.statistic = d;
    r.n = x.size();
    r.m = y.size();
    r.p_value = ks_p_value(d, n * m / (n + m));
    return r;
}

KsResult ks_one_sample(const EmpiricalDistribution& a, const std::function<double(double)>& cdf)
{
    const auto& x = a.sorted();
    const auto n = static_cast<double>(x.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < x.size()) {
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) {
            ++j;
        }
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(static_cast<double>(j) / n - f), std::abs(f - static_cast<double>(i) / n)});
        i = j;
    }
    KsResult r;
    r.statistic = d;
    r.n = x.size();
    r.p_value = ks_p_value(d, n);
    return r;
}

double normal_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval binomial_ci(std::size_t hits, std::size_t n, double level)
{
    if (n == 0) {
        throw std::invalid_argument("binomial_ci: no trials");
    }
    if (hits > n) {
        throw std::invalid_argument("binomial_ci: more hits than trials");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("binomial_ci: level must lie in (0, 1)");
    }
    const double z = normal_quantile(0.5 + 0.5 * level);
    const auto nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == n ? 1.0 : std::min(1.0, centre + half)};
}

MeanSe mean_se(const std::vector<double>& values)
{
    if (values.empty()) {
        throw std::invalid_argument("mean_se: empty sample");
    }
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

MeanSe proportion(std::size_t hits, std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("proportion: no trials");
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

double bootstrap_se(const std::vector<double>& values,
                    const std::function<double(const std::vector<double>&)>& statistic, int replicates,
                    std::uint64_t seed)
{
    if (values.empty() || replicates < 2) {
        throw std::invalid_argument("bootstrap_se: need a sample and at least two replicates");
    }
    RandomStream rng(seed, 0);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(replicates));
    std::vector<double> resample(values.size());
    const auto n = static_cast<double>(values.size());
    for (int r = 0; r < replicates; ++r) {
        for (auto& v : resample) {
            auto k = static_cast<std::size_t>(rng.uniform() * n);
            v = values[std::min(k, values.size() - 1)];
        }
        stats.push_back(statistic(resample));
    }
    return mean_se(stats).se * std::sqrt(static_cast<double>(replicates));
}

void write_sample_csv(std::ostream& os, const EmpiricalDistribution& d)
{
    const auto old = os.precision(17);
    for (double v : d.sorted()) {
        os << v << '\n';
    }
    os.precision(old);
}

std::string sidecar_json(const EmpiricalDistribution& d)
{
    nlohmann::ordered_json j;
    j["n"] = d.size();
    j["horizon"] = d.horizon;
    j["diagnostic_failure_fraction"] = d.diagnostic_failure_fraction;
    j["seed"] = d.seed;
    return j.dump(2);
}

std::vector<double> quantize(std::vector<double> values, double quantum)
{
    for (auto& v : values) {
        v = std::round(v / quantum) * quantum;
    }
    return values;
}

}  // namespace gouflow
