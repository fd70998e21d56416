#pragma once

#include "cpld/marks.hpp"

namespace cpld {

// Compound Poisson model: jump intensity r and mark law G. The induced jump
// intensity measure is r * dt * dG(x). Immutable and shareable.
class CompoundPoissonModel {
public:
    CompoundPoissonModel(double rate, MarkDistribution marks);

    double rate() const noexcept { return rate_; }
    const MarkDistribution& marks() const noexcept { return marks_; }

    // r * E xi, the long-run drift of S_t.
    double mean_drift() const { return rate_ * marks_.mean(); }

    // Esscher transform: jump rate r * L(lambda), marks tilted by lambda.
    CompoundPoissonModel tilted(double lambda) const;

private:
    double rate_;
    MarkDistribution marks_;
};

}  // namespace cpld
