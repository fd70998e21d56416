#include "cpld/model.hpp"

#include <cmath>

#include "cpld/errors.hpp"

namespace cpld {

CompoundPoissonModel::CompoundPoissonModel(double rate, MarkDistribution marks)
    : rate_(rate), marks_(std::move(marks)) {
    if (!(std::isfinite(rate_) && rate_ > 0.0))
        throw usage_error("jump intensity r must be > 0");
    if (marks_.family() == MarkFamily::PointMass && marks_.atom_at_zero() == 1.0)
        throw usage_error("point mass at 0 is degenerate: the process is identically zero");
}

CompoundPoissonModel CompoundPoissonModel::tilted(double lambda) const {
    const double norm = marks_.exponential_moment(lambda, 0);
    return CompoundPoissonModel(rate_ * norm, marks_.tilt(lambda));
}

}  // namespace cpld
