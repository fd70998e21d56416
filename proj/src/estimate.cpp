#include "cpld/estimate.hpp"

#include <cmath>
#include <sstream>

#include "cpld/config.hpp"
#include "cpld/errors.hpp"
#include "cpld/parallel.hpp"

namespace cpld {

namespace {

void check_window(const EventWindow& window) {
    if (!(std::isfinite(window.u) && window.u >= 0.0))
        throw usage_error("window center u must be >= 0");
    if (!(window.delta > 0.0)) throw usage_error("window half-width delta must be > 0");
}

void check_counts(double t, std::int64_t n) {
    if (!(std::isfinite(t) && t > 0.0)) throw usage_error("horizon t must be > 0");
    if (n < 1) throw usage_error("path count must be >= 1");
}

std::optional<double> decay_of(double p_hat, double t) {
    if (p_hat <= 0.0) return std::nullopt;
    return -std::log(p_hat) / t;
}

}  // namespace

const char* to_string(EstimateMethod method) noexcept {
    switch (method) {
        case EstimateMethod::CrudeMC: return "crude_mc";
        case EstimateMethod::ImportanceSampling: return "importance_sampling";
        default: return "exact";
    }
}

EstimateResult mc_probability(const CompoundPoissonModel& model, const EventWindow& window,
                              double t, std::int64_t n, std::uint64_t seed, int workers) {
    check_window(window);
    check_counts(t, n);
    const auto sums = chunked_sum<1>(n, workers, [&](std::int64_t i, std::array<double, 1>& acc) {
        RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
        const PathStats stats = simulate_path_stats(model, t, rng);
        if (window.contains(stats.total / t)) acc[0] += 1.0;
    });
    const double p = sums[0] / static_cast<double>(n);
    EstimateResult result;
    result.p_hat = p;
    result.std_err = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
    result.n_paths = n;
    result.method = EstimateMethod::CrudeMC;
    result.log_decay = decay_of(p, t);
    result.t = t;
    return result;
}

EstimateResult is_probability(const CompoundPoissonModel& model, const EventWindow& window,
                              double t, std::int64_t n, std::uint64_t seed, int workers) {
    check_window(window);
    check_counts(t, n);
    if (!(window.u > 0.0)) throw usage_error("importance sampling needs window center u > 0");

    const TiltResult tilt = solve_tilt(model, window.u);
    if (tilt.status == TiltStatus::Boundary) throw boundary_error(window.u, tilt.u_max);
    const double lambda = tilt.lambda_star;
    const CompoundPoissonModel tilted = model.tilted(lambda);
    const double g = cumulant(model, lambda);

    const auto sums = chunked_sum<2>(n, workers, [&](std::int64_t i, std::array<double, 2>& acc) {
        RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
        const PathStats stats = simulate_path_stats(tilted, t, rng);
        if (window.contains(stats.total / t)) {
            const double w = std::exp(-(lambda * stats.total - t * g));
            acc[0] += w;
            acc[1] += w * w;
        }
    });
    const double nn = static_cast<double>(n);
    const double p = sums[0] / nn;
    const double var = n > 1 ? std::max(sums[1] - nn * p * p, 0.0) / (nn - 1.0) : 0.0;

    EstimateResult result;
    result.p_hat = p;
    result.std_err = std::sqrt(var / nn);
    result.n_paths = n;
    result.method = EstimateMethod::ImportanceSampling;
    result.log_decay = decay_of(p, t);
    result.t = t;
    return result;
}

EstimateResult zero_probability(const CompoundPoissonModel& model, double t) {
    if (!(std::isfinite(t) && t > 0.0)) throw usage_error("horizon t must be > 0");
    const double rate_positive = model.rate() * (1.0 - model.marks().atom_at_zero());
    const double p = std::exp(-t * rate_positive);
    EstimateResult result;
    result.p_hat = p;
    result.std_err = 0.0;
    result.n_paths = 0;
    result.method = EstimateMethod::Exact;
    if (p > 0.0) result.log_decay = rate_positive;
    result.t = t;
    return result;
}

double chernoff_tail_bound(const CompoundPoissonModel& model, double j, double t,
                           std::optional<double> tilt) {
    if (!(std::isfinite(j) && j > 0.0)) throw usage_error("tail level j must be > 0");
    if (!(std::isfinite(t) && t > 0.0)) throw usage_error("horizon t must be > 0");
    const double lam_max = model.marks().lambda_max();

    double lam;
    if (tilt.has_value()) {
        lam = *tilt;
        if (!(lam > 0.0 && lam < lam_max))
            throw usage_error("chernoff tilt must lie in (0, lambda_max)");
    } else if (std::isfinite(lam_max)) {
        lam = 0.5 * lam_max;
    } else {
        const TiltResult solved = solve_tilt(model, j);
        if (solved.status != TiltStatus::Converged || solved.lambda_star <= 0.0)
            return 1.0;  // j at or below the mean drift: the bound is vacuous
        lam = solved.lambda_star;
    }
    const double exponent = t * (cumulant(model, lam) - lam * j);
    return std::min(1.0, std::exp(exponent));
}

LaplaceEstimate empirical_laplace(const CompoundPoissonModel& model, double lambda, double t,
                                  std::int64_t n, std::uint64_t seed, int workers) {
    check_counts(t, n);
    const double lam_max = model.marks().lambda_max();
    if (std::isfinite(lam_max) && lambda >= 0.5 * lam_max)
        throw usage_error(
            "empirical Laplace transform rejected: lambda >= lambda_max/2 makes the "
            "estimator's variance infinite; use laplace_transform for the exact value");

    const auto sums = chunked_sum<2>(n, workers, [&](std::int64_t i, std::array<double, 2>& acc) {
        RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
        const PathStats stats = simulate_path_stats(model, t, rng);
        const double y = std::exp(lambda * stats.total);
        acc[0] += y;
        acc[1] += y * y;
    });
    const double nn = static_cast<double>(n);
    const double mean = sums[0] / nn;
    const double var = n > 1 ? std::max(sums[1] - nn * mean * mean, 0.0) / (nn - 1.0) : 0.0;
    return LaplaceEstimate{mean, std::sqrt(var / nn), n};
}

std::vector<DecayPoint> decay_rate_curve(const CompoundPoissonModel& model,
                                         const EventWindow& window,
                                         const std::vector<double>& t_grid, std::int64_t n,
                                         std::uint64_t seed, int workers) {
    if (t_grid.empty()) throw usage_error("t grid must be nonempty");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1])) throw usage_error("t grid must be increasing");

    std::vector<DecayPoint> curve;
    curve.reserve(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        DecayPoint point;
        point.t = t;
        point.estimate = is_probability(model, window, t, n,
                                        derive_seed(seed, static_cast<std::uint64_t>(k)), workers);
        point.log_decay = point.estimate.log_decay;
        if (point.estimate.p_hat > 0.0)
            point.std_err_log = point.estimate.std_err / (t * point.estimate.p_hat);
        curve.push_back(point);
    }
    return curve;
}

std::string to_json_record(const EstimateResult& result, std::optional<double> u,
                           std::optional<double> delta, std::optional<std::uint64_t> seed) {
    std::ostringstream out;
    out << "{\"method\":\"" << to_string(result.method) << '"';
    if (u.has_value()) out << ",\"u\":" << fmt17(*u);
    if (delta.has_value()) out << ",\"delta\":" << fmt17(*delta);
    out << ",\"t\":" << fmt17(result.t);
    out << ",\"n\":" << result.n_paths;
    if (seed.has_value()) out << ",\"seed\":" << *seed;
    out << ",\"p_hat\":" << fmt17(result.p_hat);
    out << ",\"std_err\":" << fmt17(result.std_err);
    if (result.log_decay.has_value()) out << ",\"log_decay\":" << fmt17(*result.log_decay);
    out << '}';
    return out.str();
}

}  // namespace cpld
