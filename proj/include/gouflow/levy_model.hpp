#pragma once

#include <array>
#include <complex>
#include <optional>

#include "gouflow/jump_law.hpp"

namespace gouflow {

using Vec2 = std::array<double, 2>;

/// Gaussian covariance per unit time of (U, L).
struct Cov2 {
    double uu = 0.0;
    double ul = 0.0;
    double ll = 0.0;

    bool is_zero() const noexcept { return uu == 0.0 && ul == 0.0 && ll == 0.0; }
    friend bool operator==(const Cov2&, const Cov2&) = default;
};

/// Hypothesis flags of a driver, checked before running any construction
/// that needs them.
struct ModelFlags {
    bool condition_b = false;     ///< ΔU > -1 a.s.
    bool l_subordinator = false;  ///< L nondecreasing
    bool neg_l_subordinator = false;  ///< -L nondecreasing
    bool u_zero = false;          ///< U is the zero process
    bool l_zero = false;          ///< L is the zero process
};

/// Bivariate finite-activity Lévy process (U, L).
///
/// `drift` is the genuine linear drift b of the finite-variation
/// decomposition (jumps carried uncompensated). The compensated location γ of
/// the characteristic triplet is available through triplet_location() and
/// relates to b by γ = b + ∫_{|z|<=1} z ν(dz), ν = intensity * jump law.
class LevyModel2 {
  public:
    LevyModel2(Vec2 drift, Cov2 cov, double jump_intensity, JumpLaw2 jump_law);

    /// Zero process.
    static LevyModel2 zero();

    /// Build from the compensated triplet location γ (point-mass laws only).
    static LevyModel2 from_triplet_location(Vec2 gamma, Cov2 cov, double jump_intensity, JumpLaw2 jump_law);

    const Vec2& drift() const noexcept { return drift_; }
    const Cov2& cov() const noexcept { return cov_; }
    double jump_intensity() const noexcept { return intensity_; }
    const JumpLaw2& jump_law() const noexcept { return law_; }
    bool has_jumps() const noexcept { return intensity_ > 0.0; }

    /// γ with the Euclidean |z| <= 1 truncation; point-mass laws only.
    Vec2 triplet_location() const;
    /// One-dimensional location γ_U (component 0) or γ_L (component 1) with
    /// the |z| <= 1 truncation of the marginal jump measure.
    double marginal_location(int component) const;

    bool condition_b() const;
    ModelFlags flags() const;

  private:
    Vec2 drift_;
    Cov2 cov_;
    double intensity_;
    JumpLaw2 law_;
};

bool operator==(const LevyModel2& a, const LevyModel2& b);

/// ψ(θ) with E exp(i θ·(U_t, L_t)) = exp(t ψ(θ)).
std::complex<double> characteristic_exponent(const LevyModel2& model, Vec2 theta);

/// The same exponent assembled from the compensated triplet (γ, Σ, ν) with
/// the 1{|z| <= 1} compensator; point-mass laws only. Agrees with
/// characteristic_exponent() up to rounding.
std::complex<double> characteristic_exponent_triplet_form(const LevyModel2& model, Vec2 theta);

/// Law of the dual driver (W, K) = (-U + σ_U² t + Σ ΔU²/(1+ΔU), -η).
/// Throws ConditionViolation unless ΔU > -1 a.s.
LevyModel2 dual_model(const LevyModel2& model_ul);

/// Location γ_W of W with E(W) = E(U)^{-1}, assembled the way the triplet
/// of W is usually written: -γ_U + σ_U² + ∫ (z 1{|z| <= 1} - z/(1+z)
/// 1{z >= -1/2}) ν_U(dz). Point-mass laws only. Under ΔU > -1 the cutoff
/// z >= -1/2 is exactly |z/(1+z)| <= 1, so this equals
/// dual_model(m).marginal_location(0).
double dual_location_gamma_form(const LevyModel2& model);

struct Degeneracy {
    std::optional<double> k;  ///< k with k U = -L a.s., if any
    double margin = 0.0;      ///< worst relative residual of the line conditions for the candidate k
};

/// Detect k != 0 with k U_t = -L_t a.s. Relative tolerance applies to drift,
/// Gaussian and jump-support conditions alike.
Degeneracy detect_degeneracy(const LevyModel2& model, double tol = 1e-9);

}  // namespace gouflow
