#include "cpld/rate.hpp"

#include <cmath>

#include "cpld/errors.hpp"

namespace cpld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this cap e^{lambda x} underflows for unit-scale marks and searching
// further is pointless; callers fall back to the analytic limit.
double default_floor(double u) { return -745.0 / std::max(u, 1.0); }

// Root of f(lambda) = u for strictly increasing f on (-inf, lam_max).
// Brackets by expanding search (geometric approach to a finite lam_max,
// doubling otherwise), then safeguarded Newton with bisection fallback.
template <typename F, typename DF>
TiltResult solve_increasing(F&& f, DF&& df, double u, double lam_max, const SolverConfig& cfg) {
    if (!(std::isfinite(u) && u > 0.0)) throw usage_error("target drift u must be > 0");
    if (cfg.max_iter < 1) throw usage_error("max_iter must be >= 1");
    const double floor =
        std::isnan(cfg.lambda_floor) ? default_floor(u) : cfg.lambda_floor;

    auto within = [&](double fx) { return std::abs(fx - u) <= cfg.tol_residual * u; };
    auto converged = [&](double lam, double fx, int iters) {
        return TiltResult{TiltStatus::Converged, lam, kInf, std::abs(fx - u), iters};
    };

    const double f0 = f(0.0);
    if (within(f0)) return converged(0.0, f0, 0);

    double lo, hi, flo;
    if (f0 < u) {
        lo = 0.0;
        flo = f0;
        if (std::isfinite(lam_max)) {
            for (int j = 1;; ++j) {
                const double cand = lam_max - std::ldexp(lam_max, -j);
                if (!(cand > lo) || cand >= lam_max || j > 1100)
                    return TiltResult{TiltStatus::Boundary, lo, flo, 0.0, j};
                const double fc = f(cand);
                if (!(fc < u)) {
                    hi = cand;
                    break;
                }
                lo = cand;
                flo = fc;
            }
        } else {
            hi = 1.0;
            double fhi = f(hi);
            while (fhi < u) {
                if (hi >= 0x1p60)
                    return TiltResult{TiltStatus::Boundary, hi, fhi, 0.0, 0};
                lo = hi;
                flo = fhi;
                hi *= 2.0;
                fhi = f(hi);
                if (within(fhi)) return converged(hi, fhi, 0);
            }
        }
    } else {
        hi = 0.0;
        lo = std::max(-1.0, floor);
        flo = f(lo);
        while (flo > u) {
            if (within(flo)) return converged(lo, flo, 0);
            if (lo <= floor)
                return TiltResult{TiltStatus::FloorCapped, floor, kInf,
                                  std::abs(flo - u), 0};
            hi = lo;
            lo = std::max(lo * 2.0, floor);
            flo = f(lo);
        }
    }

    double x = 0.5 * (lo + hi);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const double fx = f(x);
        if (within(fx)) return converged(x, fx, iter);
        if (fx < u)
            lo = x;
        else
            hi = x;  // also captures NaN
        if (hi - lo <= cfg.tol_lambda) {
            const double mid = 0.5 * (lo + hi);
            return converged(mid, f(mid), iter);
        }
        const double slope = df(x);
        const double newton = x - (fx - u) / slope;
        x = (std::isfinite(newton) && newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    }
    throw numeric_error("tilt solver did not converge", lo, hi);
}

}  // namespace

const char* to_string(RateBranch branch) noexcept {
    switch (branch) {
        case RateBranch::Interior: return "interior";
        case RateBranch::ZeroAtom: return "zero_atom";
        case RateBranch::BoundaryLinear: return "boundary_linear";
        default: return "infinite";
    }
}

TiltResult solve_tilt(const CompoundPoissonModel& model, double u, const SolverConfig& cfg) {
    auto f = [&](double lam) { return model.rate() * model.marks().exponential_moment(lam, 1); };
    auto df = [&](double lam) { return model.rate() * model.marks().exponential_moment(lam, 2); };
    return solve_increasing(f, df, u, model.marks().lambda_max(), cfg);
}

TiltResult solve_tilt_discrete(const MarkDistribution& dist, double u, const SolverConfig& cfg) {
    auto f = [&](double lam) { return dist.tilted_mean(lam); };
    auto df = [&](double lam) {
        const double m1 = dist.tilted_mean(lam);
        return std::max(dist.tilted_second_moment(lam) - m1 * m1, 0.0);
    };
    return solve_increasing(f, df, u, dist.lambda_max(), cfg);
}

namespace {

// Shared boundary handling: linear continuation when the cumulant stays
// finite at a finite abscissa, +inf otherwise.
RateFunctionResult boundary_result(double u, double lam_max, double g_at_boundary) {
    if (std::isfinite(lam_max) && std::isfinite(g_at_boundary)) {
        const double value = std::max(lam_max * u - g_at_boundary, 0.0);
        return {u, value, std::nullopt, RateBranch::BoundaryLinear};
    }
    return {u, kInf, std::nullopt, RateBranch::Infinite};
}

double just_inside(double lam_max) {
    return lam_max - std::max(std::abs(lam_max), 1.0) * 1e-13;
}

}  // namespace

RateFunctionResult rate_function(const CompoundPoissonModel& model, double u,
                                 const SolverConfig& cfg) {
    if (!(std::isfinite(u) && u >= 0.0)) throw usage_error("u must be finite and >= 0");
    const double atom = model.marks().atom_at_zero();
    const double zero_value = model.rate() * (1.0 - atom);
    if (u == 0.0) return {u, zero_value, std::nullopt, RateBranch::ZeroAtom};

    const TiltResult tilt = solve_tilt(model, u, cfg);
    switch (tilt.status) {
        case TiltStatus::Converged: {
            const double value =
                std::max(tilt.lambda_star * u - cumulant(model, tilt.lambda_star), 0.0);
            return {u, value, tilt.lambda_star, RateBranch::Interior};
        }
        case TiltStatus::FloorCapped:
            // The supremum sits below the underflow floor; by continuity the
            // value is indistinguishable from the u = 0 limit.
            return {u, zero_value, std::nullopt, RateBranch::ZeroAtom};
        default: {
            const double lam_max = model.marks().lambda_max();
            const double g = std::isfinite(lam_max)
                                 ? model.rate() *
                                       model.marks().mgf_minus_one(just_inside(lam_max))
                                 : kInf;
            return boundary_result(u, lam_max, g);
        }
    }
}

RateFunctionResult rate_function_discrete(const MarkDistribution& dist, double u,
                                          const SolverConfig& cfg) {
    if (!(std::isfinite(u) && u >= 0.0)) throw usage_error("u must be finite and >= 0");
    if (u == 0.0) {
        const double atom = dist.atom_at_zero();
        if (atom > 0.0) return {u, -std::log(atom), std::nullopt, RateBranch::ZeroAtom};
        return {u, kInf, std::nullopt, RateBranch::Infinite};
    }
    // Below the bottom of the support the objective grows without bound as
    // lambda -> -inf.
    if (u < dist.support_min()) return {u, kInf, std::nullopt, RateBranch::Infinite};

    const TiltResult tilt = solve_tilt_discrete(dist, u, cfg);
    switch (tilt.status) {
        case TiltStatus::Converged: {
            const double value =
                std::max(tilt.lambda_star * u - dist.log_mgf(tilt.lambda_star), 0.0);
            return {u, value, tilt.lambda_star, RateBranch::Interior};
        }
        case TiltStatus::FloorCapped: {
            // No analytic limit here; report the objective at the floor,
            // a monotone lower bound on the supremum.
            const double value =
                std::max(tilt.lambda_star * u - dist.log_mgf(tilt.lambda_star), 0.0);
            return {u, value, tilt.lambda_star, RateBranch::Interior};
        }
        default: {
            const double lam_max = dist.lambda_max();
            const double g =
                std::isfinite(lam_max) ? dist.log_mgf(just_inside(lam_max)) : kInf;
            return boundary_result(u, lam_max, g);
        }
    }
}

double closed_form_rate_exp_continuous(double r, double u) {
    if (!(std::isfinite(r) && r > 0.0)) throw usage_error("r must be > 0");
    if (!(std::isfinite(u) && u >= 0.0)) throw usage_error("u must be >= 0");
    if (u == 0.0) return r;
    const double d = std::sqrt(r) - std::sqrt(u);
    return d * d;
}

double closed_form_rate_exp_discrete(double u) {
    if (!(std::isfinite(u) && u >= 0.0)) throw usage_error("u must be >= 0");
    if (u == 0.0) return kInf;
    return u - 1.0 - std::log(u);
}

double brute_force_rate(const CompoundPoissonModel& model, double u,
                        const std::vector<double>& lambda_grid) {
    if (!(std::isfinite(u) && u > 0.0)) throw usage_error("u must be > 0");
    if (lambda_grid.empty()) throw usage_error("lambda grid must be nonempty");
    const double lam_max = model.marks().lambda_max();
    double best = -kInf;
    for (double lam : lambda_grid) {
        if (!(lam < lam_max))
            throw usage_error("grid point " + std::to_string(lam) +
                              " is not strictly below lambda_max");
        best = std::max(best, lam * u - model.rate() * model.marks().mgf_minus_one(lam));
    }
    return best;
}

}  // namespace cpld
