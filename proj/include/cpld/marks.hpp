#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cpld/rng.hpp"

namespace cpld {

class MarkDistribution;

enum class MarkFamily { Exponential, Gamma, PointMass, ZeroInflated, Empirical };

struct ExponentialMarks {
    double mean;  // theta > 0
};

struct GammaMarks {
    double shape;  // k > 0
    double scale;  // theta > 0
};

struct PointMassMarks {
    double value;  // c >= 0
};

struct ZeroInflatedMarks {
    double p0;  // mass at zero
    std::shared_ptr<const MarkDistribution> base;  // base law, no zero atom
};

struct EmpiricalMarks {
    std::vector<double> values;       // support points, all >= 0
    std::vector<double> weights;      // normalized, sum to 1
    std::vector<double> cum_weights;  // inclusive prefix sums, last == 1
    std::string source_path;          // nonempty when loaded from a file
};

// The law G of the nonnegative jump marks. Immutable after construction and
// safe to share across concurrent workers. Every supported family has exact
// closed-form exponential moments; no quadrature anywhere.
class MarkDistribution {
public:
    using Law = std::variant<ExponentialMarks, GammaMarks, PointMassMarks, ZeroInflatedMarks,
                             EmpiricalMarks>;

    static MarkDistribution exponential(double mean);
    static MarkDistribution gamma(double shape, double scale);
    static MarkDistribution point_mass(double value);
    static MarkDistribution zero_inflated(double p0, MarkDistribution base);
    static MarkDistribution empirical(std::vector<double> values, std::vector<double> weights);
    static MarkDistribution empirical(std::vector<double> values);  // uniform weights
    // One nonnegative value per line, uniform weights, duplicates allowed.
    static MarkDistribution empirical_from_file(const std::string& path);
    // Spec strings: exp:<theta> | gamma:<k>:<theta> | point:<c> |
    // zeroinf:<p0>:<base spec> | emp:<path>
    static MarkDistribution from_spec(const std::string& spec);

    MarkFamily family() const noexcept;
    const Law& law() const noexcept { return law_; }

    // Abscissa of convergence: inf{lambda > 0 : E e^{lambda X} = inf}.
    double lambda_max() const noexcept { return lambda_max_; }
    // P(X = 0).
    double atom_at_zero() const noexcept { return atom_at_zero_; }

    double mean() const;
    double support_min() const;
    double support_max() const;

    // Integral x^order e^{lambda x} dG(x) for order in {0,1,2}; requires
    // lambda < lambda_max(). The zero atom contributes only for order 0.
    double exponential_moment(double lambda, int order) const;
    // E e^{lambda X} - 1 without cancellation near lambda = 0.
    double mgf_minus_one(double lambda) const;
    // log E e^{lambda X}, stable for large |lambda| on discrete supports.
    double log_mgf(double lambda) const;
    // First / second moment of the tilted law e^{lambda x}dG / L(lambda);
    // computed as ratios so they stay finite where the raw moments overflow.
    double tilted_mean(double lambda) const;
    double tilted_second_moment(double lambda) const;

    // Exponentially tilted distribution dG~(x) = e^{lambda x} dG(x) / L(lambda).
    MarkDistribution tilt(double lambda) const;

    double sample(RandomStream& rng) const;
    double cdf(double x) const;

    std::string to_spec() const;

private:
    explicit MarkDistribution(Law law);

    void require_convergent(double lambda, int order) const;

    Law law_;
    double lambda_max_;
    double atom_at_zero_;
};

}  // namespace cpld
