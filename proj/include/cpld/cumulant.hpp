#pragma once

#include "cpld/model.hpp"

namespace cpld {

// Cumulant of S_t per unit time: g_c(lambda) = r * (L(lambda) - 1) where
// L(lambda) = E e^{lambda xi}. Requires lambda < lambda_max of the marks.
double cumulant(const CompoundPoissonModel& model, double lambda);

// d^order/dlambda^order g_c(lambda) = r * E[xi^order e^{lambda xi}], order 1 or 2.
double cumulant_derivative(const CompoundPoissonModel& model, double lambda, int order);

// E e^{lambda t S_t} = exp(t * g_c(lambda)), t > 0.
double laplace_transform(const CompoundPoissonModel& model, double lambda, double t);

// Log moment generating function of a single mark: g(lambda) = log E e^{lambda xi}.
double discrete_logmgf(const MarkDistribution& dist, double lambda);

// d^order/dlambda^order g(lambda): the tilted mean (order 1) or tilted
// variance (order 2).
double discrete_logmgf_derivative(const MarkDistribution& dist, double lambda, int order);

}  // namespace cpld
