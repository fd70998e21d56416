#pragma once

#include <stdexcept>
#include <string>

namespace cpld {

// Invalid argument or precondition violation caused by the caller.
class usage_error : public std::invalid_argument {
public:
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// An exponential moment was requested at or beyond the abscissa of
// convergence; carries the offending lambda and the abscissa.
class divergence_error : public std::domain_error {
public:
    divergence_error(double lambda, double lambda_max)
        : std::domain_error("exponential moment diverges: lambda=" + std::to_string(lambda) +
                            " >= lambda_max=" + std::to_string(lambda_max)),
          lambda_(lambda),
          lambda_max_(lambda_max) {}

    double lambda() const noexcept { return lambda_; }
    double lambda_max() const noexcept { return lambda_max_; }

private:
    double lambda_;
    double lambda_max_;
};

// Iterative numerics failed to converge; carries the last bracket.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, double bracket_lo, double bracket_hi)
        : std::runtime_error(what + " [bracket " + std::to_string(bracket_lo) + ", " +
                             std::to_string(bracket_hi) + "]"),
          bracket_lo_(bracket_lo),
          bracket_hi_(bracket_hi) {}

    double bracket_lo() const noexcept { return bracket_lo_; }
    double bracket_hi() const noexcept { return bracket_hi_; }

private:
    double bracket_lo_;
    double bracket_hi_;
};

// The requested drift level u lies beyond the reachable steepness boundary.
class boundary_error : public std::domain_error {
public:
    boundary_error(double u, double u_max)
        : std::domain_error("u=" + std::to_string(u) +
                            " is beyond the reachable drift limit u_max=" + std::to_string(u_max)),
          u_(u),
          u_max_(u_max) {}

    double u() const noexcept { return u_; }
    double u_max() const noexcept { return u_max_; }

private:
    double u_;
    double u_max_;
};

}  // namespace cpld
