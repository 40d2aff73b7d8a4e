#include "gouflow/jump_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gouflow/errors.hpp"

namespace gouflow {

namespace {

using cplx = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-10;
constexpr double kQuadAccept = 1e-7;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double integrate(const std::function<double(double)>& f, double a, double b, const char* what)
{
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, 15, kQuadTol, &error, &l1);
    if (!(error <= kQuadAccept * std::max(1.0, l1))) {
        throw QuadratureError(std::string("quadrature did not converge for ") + what, error);
    }
    return value;
}

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b, const char* what)
{
    const double re = integrate([&](double x) { return f(x).real(); }, a, b, what);
    const double im = integrate([&](double x) { return f(x).imag(); }, a, b, what);
    return {re, im};
}

double tg_mass_above_lower(const TruncatedGaussian& g)
{
    if (std::isinf(g.lower)) {
        return 1.0;
    }
    return 1.0 - std_normal_cdf((g.lower - g.mean) / g.sd);
}

void validate(const Marginal& m, const char* coordinate)
{
    const std::string where = std::string(" (") + coordinate + " marginal)";
    std::visit(overloaded{
                   [&](const PointMasses& p) {
                       if (p.values.empty() || p.values.size() != p.probs.size()) {
                           throw std::invalid_argument("point masses need matching, nonempty values/probs" + where);
                       }
                       double total = 0.0;
                       for (std::size_t i = 0; i < p.values.size(); ++i) {
                           if (!std::isfinite(p.values[i]) || !(p.probs[i] >= 0.0)) {
                               throw std::invalid_argument("point masses need finite values and nonnegative probabilities" + where);
                           }
                           total += p.probs[i];
                       }
                       if (std::abs(total - 1.0) > 1e-9) {
                           throw std::invalid_argument("point mass probabilities must sum to 1" + where);
                       }
                   },
                   [&](const SignedExponential& e) {
                       if (!(e.rate > 0.0) || !std::isfinite(e.rate) || (e.sign != 1 && e.sign != -1)) {
                           throw std::invalid_argument("signed exponential needs rate > 0 and sign +-1" + where);
                       }
                   },
                   [&](const Uniform& u) {
                       if (!(u.lo < u.hi) || !std::isfinite(u.lo) || !std::isfinite(u.hi)) {
                           throw std::invalid_argument("uniform needs finite lo < hi" + where);
                       }
                   },
                   [&](const TruncatedGaussian& g) {
                       if (!(g.sd > 0.0) || !std::isfinite(g.mean) || std::isnan(g.lower) || g.lower == kInf) {
                           throw std::invalid_argument("truncated gaussian needs sd > 0 and a finite mean" + where);
                       }
                       if (tg_mass_above_lower(g) < 1e-6) {
                           throw std::invalid_argument("truncated gaussian keeps less than 1e-6 of its mass" + where);
                       }
                   },
               },
               m);
}

void validate_du(const Marginal& m)
{
    validate(m, "dU");
    if (atom_mass(m, -1.0) > 0.0) {
        throw ConditionViolation("condition (A)", "jump law puts mass on dU = -1");
    }
}

double sample_du(const Marginal& m, RandomStream& rng)
{
    double u = sample(m, rng);
    while (u == -1.0) {
        u = sample(m, rng);
    }
    return u;
}

double dual_map(double u) { return -u / (1.0 + u); }

}  // namespace

// --- marginals --------------------------------------------------------------

double sample(const Marginal& m, RandomStream& rng)
{
    return std::visit(overloaded{
                          [&](const PointMasses& p) {
                              double r = rng.uniform();
                              for (std::size_t i = 0; i + 1 < p.values.size(); ++i) {
                                  if (r < p.probs[i]) {
                                      return p.values[i];
                                  }
                                  r -= p.probs[i];
                              }
                              return p.values.back();
                          },
                          [&](const SignedExponential& e) { return e.sign * rng.exponential(e.rate); },
                          [&](const Uniform& u) { return u.lo + (u.hi - u.lo) * rng.uniform(); },
                          [&](const TruncatedGaussian& g) {
                              double x = g.mean + g.sd * rng.normal();
                              while (!(x > g.lower)) {
                                  x = g.mean + g.sd * rng.normal();
                              }
                              return x;
                          },
                      },
                      m);
}

std::complex<double> characteristic_function(const Marginal& m, double theta)
{
    const cplx i(0.0, 1.0);
    return std::visit(overloaded{
                          [&](const PointMasses& p) {
                              cplx sum = 0.0;
                              for (std::size_t k = 0; k < p.values.size(); ++k) {
                                  sum += p.probs[k] * std::exp(i * theta * p.values[k]);
                              }
                              return sum;
                          },
                          [&](const SignedExponential& e) {
                              return cplx(e.rate) / (e.rate - i * theta * static_cast<double>(e.sign));
                          },
                          [&](const Uniform& u) {
                              if (theta == 0.0) {
                                  return cplx(1.0);
                              }
                              return (std::exp(i * theta * u.hi) - std::exp(i * theta * u.lo)) /
                                     (i * theta * (u.hi - u.lo));
                          },
                          [&](const TruncatedGaussian& g) {
                              if (std::isinf(g.lower)) {
                                  return std::exp(i * theta * g.mean - 0.5 * theta * theta * g.sd * g.sd);
                              }
                              return expectation(m, [&](double x) { return std::exp(i * theta * x); });
                          },
                      },
                      m);
}

std::complex<double> expectation(const Marginal& m, const std::function<std::complex<double>(double)>& g)
{
    return std::visit(overloaded{
                          [&](const PointMasses& p) {
                              cplx sum = 0.0;
                              for (std::size_t k = 0; k < p.values.size(); ++k) {
                                  if (p.probs[k] > 0.0) {
                                      sum += p.probs[k] * g(p.values[k]);
                                  }
                              }
                              return sum;
                          },
                          [&](const SignedExponential& e) {
                              // Substitute x = sign * y / rate, y ~ Exp(1).
                              return integrate_complex(
                                  [&](double y) { return std::exp(-y) * g(e.sign * y / e.rate); }, 0.0, kInf,
                                  "signed exponential expectation");
                          },
                          [&](const Uniform& u) {
                              return integrate_complex([&](double x) { return g(x) / (u.hi - u.lo); }, u.lo, u.hi,
                                                       "uniform expectation");
                          },
                          [&](const TruncatedGaussian& tg) {
                              const double z = tg_mass_above_lower(tg);
                              const double a = std::max(tg.lower, tg.mean - 12.0 * tg.sd);
                              const double b = tg.mean + 12.0 * tg.sd;
                              return integrate_complex(
                                  [&](double x) { return g(x) * std_normal_pdf((x - tg.mean) / tg.sd) / (tg.sd * z); },
                                  a, b, "truncated gaussian expectation");
                          },
                      },
                      m);
}

double partial_mass(const Marginal& m, double a, double b)
{
    if (!(a <= b)) {
        return 0.0;
    }
    return std::visit(overloaded{
                          [&](const PointMasses& p) {
                              double sum = 0.0;
                              for (std::size_t k = 0; k < p.values.size(); ++k) {
                                  if (p.values[k] >= a && p.values[k] <= b) {
                                      sum += p.probs[k];
                                  }
                              }
                              return sum;
                          },
                          [&](const SignedExponential& e) {
                              // Work with Y = sign * X >= 0.
                              double lo = e.sign > 0 ? a : -b;
                              double hi = e.sign > 0 ? b : -a;
                              lo = std::max(lo, 0.0);
                              hi = std::max(hi, 0.0);
                              return std::exp(-e.rate * lo) - std::exp(-e.rate * hi);
                          },
                          [&](const Uniform& u) {
                              const double lo = std::max(a, u.lo);
                              const double hi = std::min(b, u.hi);
                              return hi > lo ? (hi - lo) / (u.hi - u.lo) : 0.0;
                          },
                          [&](const TruncatedGaussian& g) {
                              const double lo = std::max(a, g.lower);
                              if (!(lo < b)) {
                                  return 0.0;
                              }
                              return (std_normal_cdf((b - g.mean) / g.sd) - std_normal_cdf((lo - g.mean) / g.sd)) /
                                     tg_mass_above_lower(g);
                          },
                      },
                      m);
}

double partial_mean(const Marginal& m, double a, double b)
{
    if (!(a <= b)) {
        return 0.0;
    }
    return std::visit(overloaded{
                          [&](const PointMasses& p) {
                              double sum = 0.0;
                              for (std::size_t k = 0; k < p.values.size(); ++k) {
                                  if (p.values[k] >= a && p.values[k] <= b) {
                                      sum += p.probs[k] * p.values[k];
                                  }
                              }
                              return sum;
                          },
                          [&](const SignedExponential& e) {
                              double lo = e.sign > 0 ? a : -b;
                              double hi = e.sign > 0 ? b : -a;
                              lo = std::max(lo, 0.0);
                              hi = std::max(hi, 0.0);
                              const double inv = 1.0 / e.rate;
                              const double tail_lo = (lo + inv) * std::exp(-e.rate * lo);
                              const double tail_hi = std::isinf(hi) ? 0.0 : (hi + inv) * std::exp(-e.rate * hi);
                              return e.sign * (tail_lo - tail_hi);
                          },
                          [&](const Uniform& u) {
                              const double lo = std::max(a, u.lo);
                              const double hi = std::min(b, u.hi);
                              return hi > lo ? (hi * hi - lo * lo) / (2.0 * (u.hi - u.lo)) : 0.0;
                          },
                          [&](const TruncatedGaussian& g) {
                              const double lo = std::max(a, g.lower);
                              if (!(lo < b)) {
                                  return 0.0;
                              }
                              const double alpha = (lo - g.mean) / g.sd;
                              const double beta = (b - g.mean) / g.sd;
                              const double pdf_beta = std::isinf(beta) ? 0.0 : std_normal_pdf(beta);
                              const double pdf_alpha = std::isinf(alpha) ? 0.0 : std_normal_pdf(alpha);
                              return (g.mean * (std_normal_cdf(beta) - std_normal_cdf(alpha)) +
                                      g.sd * (pdf_alpha - pdf_beta)) /
                                     tg_mass_above_lower(g);
                          },
                      },
                      m);
}

double support_min(const Marginal& m)
{
    return std::visit(overloaded{
                          [](const PointMasses& p) {
                              double lo = kInf;
                              for (std::size_t k = 0; k < p.values.size(); ++k) {
                                  if (p.probs[k] > 0.0) {
                                      lo = std::min(lo, p.values[k]);
                                  }
                              }
                              return lo;
                          },
                          [](const SignedExponential& e) { return e.sign > 0 ? 0.0 : -kInf; },
                          [](const Uniform& u) { return u.lo; },
                          [](const TruncatedGaussian& g) { return g.lower; },
                      },
                      m);
}

double support_max(const Marginal& m)
{
    return std::visit(overloaded{
                          [](const PointMasses& p) {
                              double hi = -kInf;
                              for (std::size_t k = 0; k < p.values.size(); ++k) {
                                  if (p.probs[k] > 0.0) {
                                      hi = std::max(hi, p.values[k]);
                                  }
                              }
                              return hi;
                          },
                          [](const SignedExponential& e) { return e.sign > 0 ? kInf : 0.0; },
                          [](const Uniform& u) { return u.hi; },
                          [](const TruncatedGaussian&) { return kInf; },
                      },
                      m);
}

double atom_mass(const Marginal& m, double v)
{
    if (const auto* p = std::get_if<PointMasses>(&m)) {
        double mass = 0.0;
        for (std::size_t k = 0; k < p->values.size(); ++k) {
            if (p->values[k] == v) {
                mass += p->probs[k];
            }
        }
        return mass;
    }
    return 0.0;
}

// --- JumpLaw2 ---------------------------------------------------------------

bool operator==(const DualImageLaw& a, const DualImageLaw& b)
{
    return a.base == b.base || (a.base && b.base && *a.base == *b.base);
}

bool operator==(const JumpLaw2& a, const JumpLaw2& b)
{
    return a.variant() == b.variant();
}

JumpLaw2::JumpLaw2(PointMassLaw law) : law_(std::move(law))
{
    const auto& atoms = std::get<PointMassLaw>(law_).atoms;
    if (atoms.empty()) {
        throw std::invalid_argument("point-mass jump law needs at least one atom");
    }
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!std::isfinite(a.du) || !std::isfinite(a.dl) || !(a.prob >= 0.0)) {
            throw std::invalid_argument("point-mass atoms need finite jumps and nonnegative probabilities");
        }
        if (a.du == -1.0) {
            throw ConditionViolation("condition (A)", "jump law puts mass on dU = -1");
        }
        total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("point-mass probabilities must sum to 1");
    }
}

JumpLaw2::JumpLaw2(IndependentLaw law) : law_(std::move(law))
{
    const auto& l = std::get<IndependentLaw>(law_);
    validate_du(l.du);
    validate(l.dl, "dL");
}

JumpLaw2::JumpLaw2(LinkedLaw law) : law_(std::move(law))
{
    const auto& l = std::get<LinkedLaw>(law_);
    validate_du(l.du);
    if (!std::isfinite(l.intercept) || !std::isfinite(l.slope)) {
        throw std::invalid_argument("linked jump law needs a finite affine link");
    }
}

JumpLaw2::JumpLaw2(DualImageLaw law) : law_(std::move(law))
{
    const auto& l = std::get<DualImageLaw>(law_);
    if (!l.base) {
        throw std::invalid_argument("dual image law needs a base law");
    }
    if (!l.base->condition_b()) {
        throw ConditionViolation("condition (B)", "dual image of a law with dU <= -1 mass");
    }
}

JumpLaw2 JumpLaw2::none()
{
    return JumpLaw2(PointMassLaw{{{0.0, 0.0, 1.0}}});
}

const std::vector<PointMassAtom>& JumpLaw2::atoms() const
{
    if (const auto* p = std::get_if<PointMassLaw>(&law_)) {
        return p->atoms;
    }
    throw std::logic_error("atoms() requires a point-mass jump law");
}

Jump2 JumpLaw2::sample(RandomStream& rng) const
{
    return std::visit(overloaded{
                          [&](const PointMassLaw& p) {
                              double r = rng.uniform();
                              for (std::size_t k = 0; k + 1 < p.atoms.size(); ++k) {
                                  if (r < p.atoms[k].prob) {
                                      return Jump2{p.atoms[k].du, p.atoms[k].dl};
                                  }
                                  r -= p.atoms[k].prob;
                              }
                              return Jump2{p.atoms.back().du, p.atoms.back().dl};
                          },
                          [&](const IndependentLaw& l) {
                              const double u = sample_du(l.du, rng);
                              return Jump2{u, gouflow::sample(l.dl, rng)};
                          },
                          [&](const LinkedLaw& l) {
                              const double u = sample_du(l.du, rng);
                              return Jump2{u, l.intercept + l.slope * u};
                          },
                          [&](const DualImageLaw& l) {
                              const Jump2 z = l.base->sample(rng);
                              return Jump2{dual_map(z.du), -z.dl / (1.0 + z.du)};
                          },
                      },
                      law_);
}

bool JumpLaw2::condition_b() const
{
    return std::visit(overloaded{
                          [](const PointMassLaw& p) {
                              return std::all_of(p.atoms.begin(), p.atoms.end(),
                                                 [](const auto& a) { return a.prob == 0.0 || a.du > -1.0; });
                          },
                          [](const IndependentLaw& l) { return support_min(l.du) >= -1.0; },
                          [](const LinkedLaw& l) { return support_min(l.du) >= -1.0; },
                          [](const DualImageLaw&) { return true; },
                      },
                      law_);
}

bool JumpLaw2::has_mass_below_minus_one() const
{
    return std::visit(overloaded{
                          [](const PointMassLaw& p) {
                              return std::any_of(p.atoms.begin(), p.atoms.end(),
                                                 [](const auto& a) { return a.prob > 0.0 && a.du < -1.0; });
                          },
                          [](const IndependentLaw& l) { return support_min(l.du) < -1.0; },
                          [](const LinkedLaw& l) { return support_min(l.du) < -1.0; },
                          [](const DualImageLaw&) { return false; },
                      },
                      law_);
}

bool JumpLaw2::dl_nonnegative() const
{
    return std::visit(overloaded{
                          [](const PointMassLaw& p) {
                              return std::all_of(p.atoms.begin(), p.atoms.end(),
                                                 [](const auto& a) { return a.prob == 0.0 || a.dl >= 0.0; });
                          },
                          [](const IndependentLaw& l) { return support_min(l.dl) >= 0.0; },
                          [](const LinkedLaw& l) {
                              if (l.slope == 0.0) {
                                  return l.intercept >= 0.0;
                              }
                              const double edge = l.slope > 0.0 ? support_min(l.du) : support_max(l.du);
                              return std::isfinite(edge) && l.intercept + l.slope * edge >= 0.0;
                          },
                          [](const DualImageLaw& l) { return l.base->dl_nonpositive(); },
                      },
                      law_);
}

bool JumpLaw2::dl_nonpositive() const
{
    return std::visit(overloaded{
                          [](const PointMassLaw& p) {
                              return std::all_of(p.atoms.begin(), p.atoms.end(),
                                                 [](const auto& a) { return a.prob == 0.0 || a.dl <= 0.0; });
                          },
                          [](const IndependentLaw& l) { return support_max(l.dl) <= 0.0; },
                          [](const LinkedLaw& l) {
                              if (l.slope == 0.0) {
                                  return l.intercept <= 0.0;
                              }
                              const double edge = l.slope > 0.0 ? support_max(l.du) : support_min(l.du);
                              return std::isfinite(edge) && l.intercept + l.slope * edge <= 0.0;
                          },
                          [](const DualImageLaw& l) { return l.base->dl_nonnegative(); },
                      },
                      law_);
}

bool JumpLaw2::du_zero() const
{
    const auto zero_marginal = [](const Marginal& m) {
        return std::holds_alternative<PointMasses>(m) && support_min(m) == 0.0 && support_max(m) == 0.0;
    };
    return std::visit(overloaded{
                          [](const PointMassLaw& p) {
                              return std::all_of(p.atoms.begin(), p.atoms.end(),
                                                 [](const auto& a) { return a.prob == 0.0 || a.du == 0.0; });
                          },
                          [&](const IndependentLaw& l) { return zero_marginal(l.du); },
                          [&](const LinkedLaw& l) { return zero_marginal(l.du); },
                          [](const DualImageLaw& l) { return l.base->du_zero(); },
                      },
                      law_);
}

std::complex<double> JumpLaw2::characteristic_function(double theta_u, double theta_l) const
{
    const cplx i(0.0, 1.0);
    return std::visit(
        overloaded{
            [&](const PointMassLaw& p) {
                cplx sum = 0.0;
                for (const auto& a : p.atoms) {
                    sum += a.prob * std::exp(i * (theta_u * a.du + theta_l * a.dl));
                }
                return sum;
            },
            [&](const IndependentLaw& l) {
                return gouflow::characteristic_function(l.du, theta_u) *
                       gouflow::characteristic_function(l.dl, theta_l);
            },
            [&](const LinkedLaw& l) {
                return std::exp(i * theta_l * l.intercept) *
                       gouflow::characteristic_function(l.du, theta_u + l.slope * theta_l);
            },
            [&](const DualImageLaw& l) {
                return std::visit(
                    overloaded{
                        [&](const PointMassLaw& p) {
                            cplx sum = 0.0;
                            for (const auto& a : p.atoms) {
                                sum += a.prob * std::exp(i * (theta_u * dual_map(a.du) - theta_l * a.dl / (1.0 + a.du)));
                            }
                            return sum;
                        },
                        [&](const IndependentLaw& b) {
                            return expectation(b.du, [&](double u) {
                                return std::exp(i * theta_u * dual_map(u)) *
                                       gouflow::characteristic_function(b.dl, -theta_l / (1.0 + u));
                            });
                        },
                        [&](const LinkedLaw& b) {
                            return expectation(b.du, [&](double u) {
                                return std::exp(i * (theta_u * dual_map(u) -
                                                     theta_l * (b.intercept + b.slope * u) / (1.0 + u)));
                            });
                        },
                        [&](const DualImageLaw& b) { return b.base->characteristic_function(theta_u, theta_l); },
                    },
                    l.base->variant());
            },
        },
        law_);
}

double JumpLaw2::expect(const std::function<double(double, double)>& f) const
{
    double sum = 0.0;
    for (const auto& a : atoms()) {
        sum += a.prob * f(a.du, a.dl);
    }
    return sum;
}

double JumpLaw2::marginal_truncated_mean(int component) const
{
    if (component != 0 && component != 1) {
        throw std::invalid_argument("component must be 0 (U) or 1 (L)");
    }
    return std::visit(
        overloaded{
            [&](const PointMassLaw& p) {
                double sum = 0.0;
                for (const auto& a : p.atoms) {
                    const double z = component == 0 ? a.du : a.dl;
                    if (std::abs(z) <= 1.0) {
                        sum += a.prob * z;
                    }
                }
                return sum;
            },
            [&](const IndependentLaw& l) { return partial_mean(component == 0 ? l.du : l.dl, -1.0, 1.0); },
            [&](const LinkedLaw& l) {
                if (component == 0) {
                    return partial_mean(l.du, -1.0, 1.0);
                }
                if (l.slope == 0.0) {
                    return std::abs(l.intercept) <= 1.0 ? l.intercept : 0.0;
                }
                double a = (-1.0 - l.intercept) / l.slope;
                double b = (1.0 - l.intercept) / l.slope;
                if (a > b) {
                    std::swap(a, b);
                }
                return l.intercept * partial_mass(l.du, a, b) + l.slope * partial_mean(l.du, a, b);
            },
            [&](const DualImageLaw&) -> double {
                throw std::logic_error("truncated means are not available for dual-image jump laws");
            },
        },
        law_);
}

JumpLaw2 JumpLaw2::dual() const
{
    if (!condition_b()) {
        throw ConditionViolation("condition (B)", "the dual jump law needs dU > -1 almost surely");
    }
    return std::visit(overloaded{
                          [](const PointMassLaw& p) {
                              PointMassLaw out;
                              out.atoms.reserve(p.atoms.size());
                              for (const auto& a : p.atoms) {
                                  out.atoms.push_back({dual_map(a.du), -a.dl / (1.0 + a.du), a.prob});
                              }
                              return JumpLaw2(std::move(out));
                          },
                          [](const DualImageLaw& l) { return *l.base; },
                          [this](const auto&) { return JumpLaw2(DualImageLaw{std::make_shared<const JumpLaw2>(*this)}); },
                      },
                      law_);
}

}  // namespace gouflow
