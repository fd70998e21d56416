#include "cpld/cumulant.hpp"

#include <cmath>

#include "cpld/errors.hpp"

namespace cpld {

double cumulant(const CompoundPoissonModel& model, double lambda) {
    return model.rate() * model.marks().mgf_minus_one(lambda);
}

double cumulant_derivative(const CompoundPoissonModel& model, double lambda, int order) {
    if (order != 1 && order != 2) throw usage_error("cumulant derivative order must be 1 or 2");
    return model.rate() * model.marks().exponential_moment(lambda, order);
}

double laplace_transform(const CompoundPoissonModel& model, double lambda, double t) {
    if (!(std::isfinite(t) && t > 0.0)) throw usage_error("horizon t must be > 0");
    return std::exp(t * cumulant(model, lambda));
}

double discrete_logmgf(const MarkDistribution& dist, double lambda) {
    return dist.log_mgf(lambda);
}

double discrete_logmgf_derivative(const MarkDistribution& dist, double lambda, int order) {
    if (order != 1 && order != 2) throw usage_error("log-MGF derivative order must be 1 or 2");
    const double m1 = dist.tilted_mean(lambda);
    if (order == 1) return m1;
    return dist.tilted_second_moment(lambda) - m1 * m1;
}

}  // namespace cpld
