#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpld/rate.hpp"
#include "cpld/simulate.hpp"

namespace cpld {

enum class EstimateMethod { CrudeMC, ImportanceSampling, Exact };

const char* to_string(EstimateMethod method) noexcept;

// The event {|S_t - u| <= delta}. u - delta may be negative; the event then
// reads S_t <= u + delta since S_t >= 0.
struct EventWindow {
    double u = 0.0;
    double delta = 0.0;

    bool contains(double s) const noexcept { return s >= u - delta && s <= u + delta; }
};

struct EstimateResult {
    double p_hat = 0.0;    // may exceed 1 through IS weight variance; never clamped
    double std_err = 0.0;
    std::int64_t n_paths = 0;
    EstimateMethod method = EstimateMethod::CrudeMC;
    // -(1/t) log p_hat; absent when p_hat == 0 (no observed hits).
    std::optional<double> log_decay;
    double t = 0.0;
};

struct LaplaceEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::int64_t n_paths = 0;
};

struct DecayPoint {
    double t = 0.0;
    std::optional<double> log_decay;
    std::optional<double> std_err_log;  // delta method: std_err / (t * p_hat)
    EstimateResult estimate;
};

// Crude Monte Carlo frequency of the window event over n nominal paths.
EstimateResult mc_probability(const CompoundPoissonModel& model, const EventWindow& window,
                              double t, std::int64_t n, std::uint64_t seed, int workers = 0);

// Importance sampling under the exponential tilt at lambda* = solve_tilt(u):
// average of 1_window * exp(-log_likelihood_ratio) over tilted paths.
// Throws boundary_error when u is beyond the reachable drift limit.
EstimateResult is_probability(const CompoundPoissonModel& model, const EventWindow& window,
                              double t, std::int64_t n, std::uint64_t seed, int workers = 0);

// Exact probability of seeing no positive jump: exp(-t r (1 - G(0+))).
EstimateResult zero_probability(const CompoundPoissonModel& model, double t);

// Upper bound exp(t (g_c(tilt) - tilt * j)) for P(S_t > j), capped at 1.
// Default tilt: 0.5 * lambda_max when finite (else the optimal tilt at j).
double chernoff_tail_bound(const CompoundPoissonModel& model, double j, double t,
                           std::optional<double> tilt = std::nullopt);

// Monte Carlo mean of exp(lambda t S_t) over nominal paths. Rejects
// lambda >= lambda_max / 2, where the estimator's variance is infinite.
LaplaceEstimate empirical_laplace(const CompoundPoissonModel& model, double lambda, double t,
                                  std::int64_t n, std::uint64_t seed, int workers = 0);

// -(1/t) log p_hat over a grid of horizons, via is_probability. Point k uses
// the derived seed derive_seed(seed, k).
std::vector<DecayPoint> decay_rate_curve(const CompoundPoissonModel& model,
                                         const EventWindow& window,
                                         const std::vector<double>& t_grid, std::int64_t n,
                                         std::uint64_t seed, int workers = 0);

// JSON record {method, u, delta, t, n, seed, p_hat, std_err, log_decay};
// absent values are omitted.
std::string to_json_record(const EstimateResult& result, std::optional<double> u,
                           std::optional<double> delta, std::optional<std::uint64_t> seed);

}  // namespace cpld
