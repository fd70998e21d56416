#include "cpld/stats.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "cpld/errors.hpp"

namespace cpld::stats {

double poisson_pmf(std::int64_t k, double mean) {
    if (k < 0) return 0.0;
    if (mean <= 0.0) return k == 0 ? 1.0 : 0.0;
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(mean) - mean - std::lgamma(kk + 1.0));
}

double chi_square_upper_tail(double stat, int dof) {
    if (dof < 1) throw usage_error("chi-square dof must be >= 1");
    if (stat <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

PoissonFit poisson_fit(const std::vector<std::int64_t>& histogram, double mean) {
    if (!(mean > 0.0)) throw usage_error("poisson mean must be > 0");
    PoissonFit fit;
    for (std::size_t k = 0; k < histogram.size(); ++k) {
        fit.n += histogram[k];
        fit.sample_mean += static_cast<double>(histogram[k]) * static_cast<double>(k);
    }
    if (fit.n < 2) throw usage_error("poisson fit needs at least two observations");
    const double nn = static_cast<double>(fit.n);
    fit.sample_mean /= nn;
    for (std::size_t k = 0; k < histogram.size(); ++k) {
        const double d = static_cast<double>(k) - fit.sample_mean;
        fit.sample_variance += static_cast<double>(histogram[k]) * d * d;
    }
    fit.sample_variance /= (nn - 1.0);

    // Merge count values left to right until each bin expects >= 5; whatever
    // is left becomes the tail bin (including the mass above the histogram).
    std::vector<double> observed, expected;
    double obs_acc = 0.0, exp_acc = 0.0, exp_seen = 0.0;
    for (std::size_t k = 0; k < histogram.size(); ++k) {
        const double e = nn * poisson_pmf(static_cast<std::int64_t>(k), mean);
        obs_acc += static_cast<double>(histogram[k]);
        exp_acc += e;
        exp_seen += e;
        if (exp_acc >= 5.0) {
            observed.push_back(obs_acc);
            expected.push_back(exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    // Tail: everything beyond the last closed bin.
    const double tail_expected = exp_acc + (nn - exp_seen);
    if (!observed.empty() && tail_expected > 0.0) {
        observed.back() += obs_acc;
        expected.back() += tail_expected;
    } else if (tail_expected > 0.0) {
        observed.push_back(obs_acc);
        expected.push_back(tail_expected);
    }
    if (observed.size() < 2) throw usage_error("poisson fit: too few populated bins");

    for (std::size_t b = 0; b < observed.size(); ++b) {
        const double d = observed[b] - expected[b];
        fit.chi_square += d * d / expected[b];
    }
    fit.dof = static_cast<int>(observed.size()) - 1;
    fit.p_value = chi_square_upper_tail(fit.chi_square, fit.dof);
    return fit;
}

}  // namespace cpld::stats
