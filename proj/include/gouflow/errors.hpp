#pragma once

#include <stdexcept>
#include <string>

namespace gouflow {

/// A theorem hypothesis does not hold for the supplied model or path, e.g.
/// a duality construction requested for a driver with jumps ΔU <= -1.
class ConditionViolation : public std::domain_error {
  public:
    ConditionViolation(std::string condition, const std::string& what)
        : std::domain_error(what + " [violates " + condition + "]"),
          condition_(std::move(condition))
    {
    }

    const std::string& condition() const noexcept { return condition_; }

  private:
    std::string condition_;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved)
    {
    }

    double achieved() const noexcept { return achieved_; }

  private:
    double achieved_;
};

}  // namespace gouflow
