#pragma once

#include <cstdint>
#include <vector>

namespace cpld::stats {

double poisson_pmf(std::int64_t k, double mean);

// Upper tail P(Chi2_dof > stat).
double chi_square_upper_tail(double stat, int dof);

struct PoissonFit {
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 0.0;
    std::int64_t n = 0;
};

// Goodness of fit of an observed count histogram (index = count value)
// against Poisson(mean). Bins are merged left to right until each carries
// expected mass >= 5; the remainder forms the tail bin.
PoissonFit poisson_fit(const std::vector<std::int64_t>& histogram, double mean);

}  // namespace cpld::stats
