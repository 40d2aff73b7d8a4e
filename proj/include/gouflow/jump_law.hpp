#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "gouflow/random.hpp"

namespace gouflow {

/// One jump (ΔU, ΔL) of the bivariate driver.
struct Jump2 {
    double du = 0.0;
    double dl = 0.0;
};

// --- one-dimensional marginal laws -----------------------------------------

/// Finite mixture of point masses.
struct PointMasses {
    std::vector<double> values;
    std::vector<double> probs;
    friend bool operator==(const PointMasses&, const PointMasses&) = default;
};

/// sign * Exp(rate): supported on [0, inf) for sign = +1, (-inf, 0] for sign = -1.
struct SignedExponential {
    double rate = 1.0;
    int sign = 1;
    friend bool operator==(const SignedExponential&, const SignedExponential&) = default;
};

struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const Uniform&, const Uniform&) = default;
};

/// N(mean, sd^2) conditioned on exceeding `lower` (use -inf for no truncation).
/// With lower >= -1 on the ΔU coordinate the law is supported in (-1, inf).
struct TruncatedGaussian {
    double mean = 0.0;
    double sd = 1.0;
    double lower = -std::numeric_limits<double>::infinity();
    friend bool operator==(const TruncatedGaussian&, const TruncatedGaussian&) = default;
};

using Marginal = std::variant<PointMasses, SignedExponential, Uniform, TruncatedGaussian>;

double sample(const Marginal& m, RandomStream& rng);
/// E exp(i theta X); closed form where one exists, adaptive quadrature otherwise.
std::complex<double> characteristic_function(const Marginal& m, double theta);
/// E[g(X)] by exact summation (atoms) or adaptive quadrature (densities).
std::complex<double> expectation(const Marginal& m,
                                 const std::function<std::complex<double>(double)>& g);
/// P(a <= X <= b).
double partial_mass(const Marginal& m, double a, double b);
/// E[X; a <= X <= b].
double partial_mean(const Marginal& m, double a, double b);
double support_min(const Marginal& m);
double support_max(const Marginal& m);
/// Probability of the single value `v` (nonzero only for atoms).
double atom_mass(const Marginal& m, double v);

// --- bivariate jump laws ----------------------------------------------------

class JumpLaw2;

struct PointMassAtom {
    double du = 0.0;
    double dl = 0.0;
    double prob = 0.0;
    friend bool operator==(const PointMassAtom&, const PointMassAtom&) = default;
};

struct PointMassLaw {
    std::vector<PointMassAtom> atoms;
    friend bool operator==(const PointMassLaw&, const PointMassLaw&) = default;
};

struct IndependentLaw {
    Marginal du;
    Marginal dl;
    friend bool operator==(const IndependentLaw&, const IndependentLaw&) = default;
};

/// ΔL = intercept + slope * ΔU.
struct LinkedLaw {
    Marginal du;
    double intercept = 0.0;
    double slope = 0.0;
    friend bool operator==(const LinkedLaw&, const LinkedLaw&) = default;
};

/// Image of `base` under (u, l) -> (-u/(1+u), -l/(1+u)). Produced by
/// JumpLaw2::dual() for laws whose image is not in one of the closed families.
struct DualImageLaw {
    std::shared_ptr<const JumpLaw2> base;
    friend bool operator==(const DualImageLaw& a, const DualImageLaw& b);
};

/// Law of a single jump (ΔU, ΔL) of a finite-activity bivariate Lévy process.
///
/// The support never contains ΔU = -1. Immutable once constructed.
class JumpLaw2 {
  public:
    using Variant = std::variant<PointMassLaw, IndependentLaw, LinkedLaw, DualImageLaw>;

    JumpLaw2(PointMassLaw law);
    JumpLaw2(IndependentLaw law);
    JumpLaw2(LinkedLaw law);
    JumpLaw2(DualImageLaw law);

    /// Point mass at the origin; the law used when a model has no jumps.
    static JumpLaw2 none();

    const Variant& variant() const noexcept { return law_; }
    bool is_point_mass() const noexcept
    {
        return std::holds_alternative<PointMassLaw>(law_);
    }
    /// Atoms of a point-mass law; throws std::logic_error for other variants.
    const std::vector<PointMassAtom>& atoms() const;

    Jump2 sample(RandomStream& rng) const;

    /// ΔU > -1 almost surely.
    bool condition_b() const;
    /// ΔU has positive probability below -1.
    bool has_mass_below_minus_one() const;
    bool dl_nonnegative() const;
    bool dl_nonpositive() const;
    /// ΔU = 0 almost surely.
    bool du_zero() const;

    /// E exp(i (theta_u ΔU + theta_l ΔL)).
    std::complex<double> characteristic_function(double theta_u, double theta_l) const;

    /// E f(ΔU, ΔL), exact for point-mass laws only.
    double expect(const std::function<double(double, double)>& f) const;

    /// E[ΔU; |ΔU| <= 1] (component 0) or E[ΔL; |ΔL| <= 1] (component 1).
    /// Not available for DualImageLaw.
    double marginal_truncated_mean(int component) const;

    /// Law of (ΔW, ΔK) = (-ΔU/(1+ΔU), -ΔL/(1+ΔU)). Requires condition_b().
    JumpLaw2 dual() const;

  private:
    Variant law_;
};

/// Structural equality (field-exact); dual images compare their bases.
bool operator==(const JumpLaw2& a, const JumpLaw2& b);

}  // namespace gouflow
