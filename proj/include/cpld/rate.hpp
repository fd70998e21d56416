#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "cpld/cumulant.hpp"

namespace cpld {

struct SolverConfig {
    double tol_lambda = 1e-12;    // absolute tolerance on lambda*
    double tol_residual = 1e-10;  // |g'(lambda) - u| <= tol_residual * u
    int max_iter = 200;
    // Lower search cap; NaN means the default -745 / max(u, 1), below which
    // e^{lambda x} underflows and further search is pointless.
    double lambda_floor = std::numeric_limits<double>::quiet_NaN();
};

enum class TiltStatus {
    Converged,   // lambda_star solves g'(lambda) = u within tolerance
    FloorCapped, // the root lies below lambda_floor; lambda_star holds the floor
    Boundary,    // u is at or beyond the reachable drift limit u_max
};

struct TiltResult {
    TiltStatus status = TiltStatus::Converged;
    double lambda_star = 0.0;  // meaningful for Converged and FloorCapped
    double u_max = std::numeric_limits<double>::infinity();  // for Boundary
    double residual = 0.0;
    int iterations = 0;

    bool solved() const noexcept { return status == TiltStatus::Converged; }
};

enum class RateBranch { Interior, ZeroAtom, BoundaryLinear, Infinite };

const char* to_string(RateBranch branch) noexcept;

struct RateFunctionResult {
    double u = 0.0;
    double value = 0.0;  // I(u), in [0, +inf]
    std::optional<double> lambda_star;  // present on the Interior branch
    RateBranch branch = RateBranch::Interior;
};

// Solves g_c'(lambda) = u (u > 0) for the optimal tilt of the compound
// Poisson model. g_c' is strictly increasing, so the root is bracketed by
// expanding search and then polished with safeguarded Newton steps falling
// back to bisection.
TiltResult solve_tilt(const CompoundPoissonModel& model, double u, const SolverConfig& cfg = {});

// Same solver against the single-mark log-MGF derivative (Legendre transform
// of g rather than g_c).
TiltResult solve_tilt_discrete(const MarkDistribution& dist, double u,
                               const SolverConfig& cfg = {});

// Continuous-time rate function
//   I(u) = sup_{lambda < lambda_max} [lambda u - g_c(lambda)], u > 0
//   I(0) = r * (1 - G(0+))
RateFunctionResult rate_function(const CompoundPoissonModel& model, double u,
                                 const SolverConfig& cfg = {});

// Discrete-time (i.i.d. mean) rate function
//   I(u) = sup_{lambda < lambda_max} [lambda u - g(lambda)], u > 0
//   I(0) = -log P(xi = 0)  (+inf when there is no atom at zero)
RateFunctionResult rate_function_discrete(const MarkDistribution& dist, double u,
                                          const SolverConfig& cfg = {});

// Closed forms for Exponential(1) marks: (sqrt(r) - sqrt(u))^2 with I(0) = r,
// and u - 1 - log(u) with I(0) = +inf.
double closed_form_rate_exp_continuous(double r, double u);
double closed_form_rate_exp_discrete(double u);

// Grid-search lower bound for I(u): max over the grid of lambda*u - g_c(lambda).
// Every grid point must lie strictly below lambda_max.
double brute_force_rate(const CompoundPoissonModel& model, double u,
                        const std::vector<double>& lambda_grid);

}  // namespace cpld
