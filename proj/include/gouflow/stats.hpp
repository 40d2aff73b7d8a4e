#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gouflow {

/// Sorted sample with right-continuous empirical CDF.
class EmpiricalDistribution {
  public:
    /// Throws std::invalid_argument on an empty or non-finite sample.
    explicit EmpiricalDistribution(std::vector<double> values);

    std::size_t size() const noexcept { return sorted_.size(); }
    const std::vector<double>& sorted() const noexcept { return sorted_; }

    /// #{v <= x} / n.
    double cdf(double x) const noexcept;
    /// #{v < x} / n.
    double left_cdf(double x) const noexcept;
    /// #{v >= x} / n.
    double survival(double x) const noexcept { return 1.0 - left_cdf(x); }
    /// Smallest sample value v with cdf(v) >= p, p in (0, 1].
    double quantile(double p) const;
    double min() const noexcept { return sorted_.front(); }
    double max() const noexcept { return sorted_.back(); }
    /// Largest probability carried by a single sample value.
    double max_atom() const noexcept;

    // Provenance carried into exports.
    std::uint64_t seed = 0;
    double horizon = 0.0;
    double diagnostic_failure_fraction = 0.0;

  private:
    std::vector<double> sorted_;
};

EmpiricalDistribution ecdf(std::vector<double> values);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    std::size_t m = 0;  ///< second sample size; 0 for a one-sample test
};

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda) noexcept;

/// Two-sample Kolmogorov-Smirnov test by merge scan; asymptotic p-value with
/// effective size nm/(n+m).
KsResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// One-sample test of `a` against a continuous CDF.
KsResult ks_one_sample(const EmpiricalDistribution& a, const std::function<double(double)>& cdf);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// Wilson score interval for a binomial proportion.
Interval binomial_ci(std::size_t hits, std::size_t n, double level = 0.95);

/// Standard normal quantile.
double normal_quantile(double p);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& values);

/// Proportion with its binomial standard error sqrt(p(1-p)/n).
MeanSe proportion(std::size_t hits, std::size_t n);

/// Bootstrap standard error of `statistic` under resampling with
/// replacement; deterministic in `seed`.
double bootstrap_se(const std::vector<double>& values,
                    const std::function<double(const std::vector<double>&)>& statistic, int replicates,
                    std::uint64_t seed);

/// Sorted sample, one value per line.
void write_sample_csv(std::ostream& os, const EmpiricalDistribution& d);
/// JSON sidecar with n, horizon, diagnostic failure fraction and seed.
std::string sidecar_json(const EmpiricalDistribution& d);

/// Round to a grid of `quantum` so that values equal up to floating-point
/// noise compare equal (used before tests on laws with atoms).
std::vector<double> quantize(std::vector<double> values, double quantum);

}  // namespace gouflow
