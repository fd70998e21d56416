#include "cpld/marks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "cpld/config.hpp"
#include "cpld/errors.hpp"

namespace cpld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_positive(double x, const char* what) {
    if (!(std::isfinite(x) && x > 0.0)) throw usage_error(std::string(what) + " must be > 0");
    return x;
}

// Largest lambda*x over the positive-weight support; shifting by it keeps
// every exponent <= 0.
double empirical_shift(const EmpiricalMarks& e, double lambda) {
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        if (e.weights[i] <= 0.0) continue;
        lo = std::min(lo, e.values[i]);
        hi = std::max(hi, e.values[i]);
    }
    return lambda >= 0.0 ? lambda * hi : lambda * lo;
}

}  // namespace

MarkDistribution::MarkDistribution(Law law) : law_(std::move(law)) {
    lambda_max_ = std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>) return 1.0 / l.mean;
            if constexpr (std::is_same_v<T, GammaMarks>) return 1.0 / l.scale;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) return l.base->lambda_max();
            return kInf;  // PointMass, Empirical
        },
        law_);
    atom_at_zero_ = std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMassMarks>) return l.value == 0.0 ? 1.0 : 0.0;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) return l.p0;
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                double a = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    if (l.values[i] == 0.0) a += l.weights[i];
                return a;
            }
            return 0.0;  // Exponential, Gamma
        },
        law_);
}

MarkFamily MarkDistribution::family() const noexcept {
    return static_cast<MarkFamily>(law_.index());
}

MarkDistribution MarkDistribution::exponential(double mean) {
    checked_positive(mean, "exponential mean");
    return MarkDistribution(ExponentialMarks{mean});
}

MarkDistribution MarkDistribution::gamma(double shape, double scale) {
    checked_positive(shape, "gamma shape");
    checked_positive(scale, "gamma scale");
    return MarkDistribution(GammaMarks{shape, scale});
}

MarkDistribution MarkDistribution::point_mass(double value) {
    if (!(std::isfinite(value) && value >= 0.0)) throw usage_error("point mass must be >= 0");
    return MarkDistribution(PointMassMarks{value});
}

MarkDistribution MarkDistribution::zero_inflated(double p0, MarkDistribution base) {
    if (!(std::isfinite(p0) && p0 >= 0.0 && p0 <= 1.0))
        throw usage_error("zero-inflation probability must be in [0, 1]");
    if (base.atom_at_zero() != 0.0)
        throw usage_error("zero-inflated base distribution must have no atom at zero");
    return MarkDistribution(
        ZeroInflatedMarks{p0, std::make_shared<const MarkDistribution>(std::move(base))});
}

MarkDistribution MarkDistribution::empirical(std::vector<double> values,
                                             std::vector<double> weights) {
    if (values.empty()) throw usage_error("empirical distribution needs at least one value");
    if (weights.size() != values.size())
        throw usage_error("empirical values and weights must have equal length");
    for (double v : values)
        if (!(std::isfinite(v) && v >= 0.0))
            throw usage_error("empirical values must be finite and >= 0");
    double sum = 0.0;
    for (double w : weights) {
        if (!(std::isfinite(w) && w >= 0.0))
            throw usage_error("empirical weights must be finite and >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw usage_error("empirical weights must sum to 1 within 1e-12");
    for (double& w : weights) w /= sum;

    std::vector<double> cum(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;
    return MarkDistribution(
        EmpiricalMarks{std::move(values), std::move(weights), std::move(cum), {}});
}

MarkDistribution MarkDistribution::empirical(std::vector<double> values) {
    std::vector<double> weights(values.size(), values.empty() ? 0.0 : 1.0 / values.size());
    return empirical(std::move(values), std::move(weights));
}

MarkDistribution MarkDistribution::empirical_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open empirical data file: " + path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(begin, end - begin + 1);
        double v;
        try {
            v = parse_double(token);
        } catch (const usage_error&) {
            throw usage_error(path + ":" + std::to_string(line_no) + ": invalid value '" + token +
                              "'");
        }
        if (!(std::isfinite(v) && v >= 0.0))
            throw usage_error(path + ":" + std::to_string(line_no) + ": value must be >= 0");
        values.push_back(v);
    }
    if (values.empty()) throw usage_error("empirical data file is empty: " + path);
    auto dist = empirical(std::move(values));
    std::get<EmpiricalMarks>(dist.law_).source_path = path;
    return dist;
}

MarkDistribution MarkDistribution::from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "exp") return exponential(parse_double(rest));
    if (head == "point") return point_mass(parse_double(rest));
    if (head == "gamma") {
        const auto sep = rest.find(':');
        if (sep == std::string::npos)
            throw usage_error("distribution spec 'gamma' needs <shape>:<scale>: " + spec);
        return gamma(parse_double(rest.substr(0, sep)), parse_double(rest.substr(sep + 1)));
    }
    if (head == "zeroinf") {
        const auto sep = rest.find(':');
        if (sep == std::string::npos)
            throw usage_error("distribution spec 'zeroinf' needs <p0>:<base spec>: " + spec);
        return zero_inflated(parse_double(rest.substr(0, sep)), from_spec(rest.substr(sep + 1)));
    }
    if (head == "emp") {
        if (rest.empty()) throw usage_error("distribution spec 'emp' needs a file path");
        return empirical_from_file(rest);
    }
    throw usage_error("unknown distribution spec: '" + head + "'");
}

std::string MarkDistribution::to_spec() const {
    return std::visit(
        [](const auto& l) -> std::string {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>) return "exp:" + fmt17(l.mean);
            if constexpr (std::is_same_v<T, GammaMarks>)
                return "gamma:" + fmt17(l.shape) + ":" + fmt17(l.scale);
            if constexpr (std::is_same_v<T, PointMassMarks>) return "point:" + fmt17(l.value);
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>)
                return "zeroinf:" + fmt17(l.p0) + ":" + l.base->to_spec();
            if constexpr (std::is_same_v<T, EmpiricalMarks>) return "emp:" + l.source_path;
        },
        law_);
}

double MarkDistribution::mean() const {
    return std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>) return l.mean;
            if constexpr (std::is_same_v<T, GammaMarks>) return l.shape * l.scale;
            if constexpr (std::is_same_v<T, PointMassMarks>) return l.value;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>)
                return (1.0 - l.p0) * l.base->mean();
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                double m = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    m += l.weights[i] * l.values[i];
                return m;
            }
        },
        law_);
}

double MarkDistribution::support_min() const {
    return std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMassMarks>) return l.value;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>)
                return l.p0 > 0.0 ? 0.0 : l.base->support_min();
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                double lo = kInf;
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    if (l.weights[i] > 0.0) lo = std::min(lo, l.values[i]);
                return lo;
            }
            return 0.0;  // Exponential, Gamma
        },
        law_);
}

double MarkDistribution::support_max() const {
    return std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMassMarks>) return l.value;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) return l.base->support_max();
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                double hi = -kInf;
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    if (l.weights[i] > 0.0) hi = std::max(hi, l.values[i]);
                return hi;
            }
            return kInf;  // Exponential, Gamma
        },
        law_);
}

void MarkDistribution::require_convergent(double lambda, int order) const {
    if (order < 0 || order > 2) throw usage_error("moment order must be 0, 1 or 2");
    if (!std::isfinite(lambda)) throw usage_error("lambda must be finite");
    if (lambda >= lambda_max_) throw divergence_error(lambda, lambda_max_);
}

double MarkDistribution::exponential_moment(double lambda, int order) const {
    require_convergent(lambda, order);
    if (lambda == 0.0 && order == 0) return 1.0;
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>) {
                const double b = 1.0 - lambda * l.mean;
                switch (order) {
                    case 0: return 1.0 / b;
                    case 1: return l.mean / (b * b);
                    default: return 2.0 * l.mean * l.mean / (b * b * b);
                }
            }
            if constexpr (std::is_same_v<T, GammaMarks>) {
                const double b = 1.0 - lambda * l.scale;
                switch (order) {
                    case 0: return std::pow(b, -l.shape);
                    case 1: return l.shape * l.scale * std::pow(b, -l.shape - 1.0);
                    default:
                        return l.shape * (l.shape + 1.0) * l.scale * l.scale *
                               std::pow(b, -l.shape - 2.0);
                }
            }
            if constexpr (std::is_same_v<T, PointMassMarks>) {
                const double e = std::exp(lambda * l.value);
                return order == 0 ? e : std::pow(l.value, order) * e;
            }
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) {
                const double base = l.base->exponential_moment(lambda, order);
                return order == 0 ? l.p0 + (1.0 - l.p0) * base : (1.0 - l.p0) * base;
            }
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                double s = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i) {
                    const double x = l.values[i];
                    const double xk = order == 0 ? 1.0 : std::pow(x, order);
                    s += l.weights[i] * xk * std::exp(lambda * x);
                }
                return s;
            }
        },
        law_);
}

double MarkDistribution::mgf_minus_one(double lambda) const {
    require_convergent(lambda, 0);
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>) {
                const double b = 1.0 - lambda * l.mean;
                return lambda * l.mean / b;
            }
            if constexpr (std::is_same_v<T, GammaMarks>) {
                const double b = 1.0 - lambda * l.scale;
                return std::expm1(-l.shape * std::log(b));
            }
            if constexpr (std::is_same_v<T, PointMassMarks>) return std::expm1(lambda * l.value);
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>)
                return (1.0 - l.p0) * l.base->mgf_minus_one(lambda);
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                double s = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    s += l.weights[i] * std::expm1(lambda * l.values[i]);
                return s;
            }
        },
        law_);
}

double MarkDistribution::log_mgf(double lambda) const {
    require_convergent(lambda, 0);
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>)
                return -std::log(1.0 - lambda * l.mean);
            if constexpr (std::is_same_v<T, GammaMarks>)
                return -l.shape * std::log(1.0 - lambda * l.scale);
            if constexpr (std::is_same_v<T, PointMassMarks>) return lambda * l.value;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) {
                if (l.p0 == 0.0) return l.base->log_mgf(lambda);
                if (l.p0 == 1.0) return 0.0;
                const double lb = l.base->log_mgf(lambda);
                const double q = 1.0 - l.p0;
                if (lb >= 0.0) return lb + std::log(q + l.p0 * std::exp(-lb));
                return std::log(l.p0 + q * std::exp(lb));
            }
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                const double shift = empirical_shift(l, lambda);
                double s = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    s += l.weights[i] * std::exp(lambda * l.values[i] - shift);
                return shift + std::log(s);
            }
        },
        law_);
}

double MarkDistribution::tilted_mean(double lambda) const {
    require_convergent(lambda, 0);
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>)
                return l.mean / (1.0 - lambda * l.mean);
            if constexpr (std::is_same_v<T, GammaMarks>)
                return l.shape * l.scale / (1.0 - lambda * l.scale);
            if constexpr (std::is_same_v<T, PointMassMarks>) return l.value;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) {
                if (l.p0 >= 1.0) return 0.0;
                const double m0 = l.base->exponential_moment(lambda, 0);
                const double s = l.p0 / ((1.0 - l.p0) * m0);
                return l.base->tilted_mean(lambda) / (1.0 + s);
            }
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                const double shift = empirical_shift(l, lambda);
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i) {
                    const double e = l.weights[i] * std::exp(lambda * l.values[i] - shift);
                    num += e * l.values[i];
                    den += e;
                }
                return num / den;
            }
        },
        law_);
}

double MarkDistribution::tilted_second_moment(double lambda) const {
    require_convergent(lambda, 0);
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>) {
                const double b = 1.0 - lambda * l.mean;
                return 2.0 * l.mean * l.mean / (b * b);
            }
            if constexpr (std::is_same_v<T, GammaMarks>) {
                const double b = 1.0 - lambda * l.scale;
                return l.shape * (l.shape + 1.0) * l.scale * l.scale / (b * b);
            }
            if constexpr (std::is_same_v<T, PointMassMarks>) return l.value * l.value;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) {
                if (l.p0 >= 1.0) return 0.0;
                const double m0 = l.base->exponential_moment(lambda, 0);
                const double s = l.p0 / ((1.0 - l.p0) * m0);
                return l.base->tilted_second_moment(lambda) / (1.0 + s);
            }
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                const double shift = empirical_shift(l, lambda);
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i) {
                    const double e = l.weights[i] * std::exp(lambda * l.values[i] - shift);
                    num += e * l.values[i] * l.values[i];
                    den += e;
                }
                return num / den;
            }
        },
        law_);
}

MarkDistribution MarkDistribution::tilt(double lambda) const {
    require_convergent(lambda, 0);
    if (lambda == 0.0) return *this;
    return std::visit(
        [&](const auto& l) -> MarkDistribution {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>)
                return exponential(l.mean / (1.0 - lambda * l.mean));
            if constexpr (std::is_same_v<T, GammaMarks>)
                return gamma(l.shape, l.scale / (1.0 - lambda * l.scale));
            if constexpr (std::is_same_v<T, PointMassMarks>) return point_mass(l.value);
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>) {
                const double norm = exponential_moment(lambda, 0);
                return zero_inflated(l.p0 / norm, l.base->tilt(lambda));
            }
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                const double shift = empirical_shift(l, lambda);
                std::vector<double> w(l.weights.size());
                double sum = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i) {
                    w[i] = l.weights[i] * std::exp(lambda * l.values[i] - shift);
                    sum += w[i];
                }
                for (double& wi : w) wi /= sum;
                return empirical(l.values, std::move(w));
            }
        },
        law_);
}

double MarkDistribution::sample(RandomStream& rng) const {
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>) return rng.exponential(l.mean);
            if constexpr (std::is_same_v<T, GammaMarks>) return rng.gamma(l.shape, l.scale);
            if constexpr (std::is_same_v<T, PointMassMarks>) return l.value;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>)
                return rng.uniform01() < l.p0 ? 0.0 : l.base->sample(rng);
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                const double u = rng.uniform01();
                const auto it =
                    std::upper_bound(l.cum_weights.begin(), l.cum_weights.end(), u);
                const auto idx = static_cast<std::size_t>(it - l.cum_weights.begin());
                return l.values[std::min(idx, l.values.size() - 1)];
            }
        },
        law_);
}

double MarkDistribution::cdf(double x) const {
    if (std::isnan(x)) throw usage_error("cdf argument must not be NaN");
    if (x < 0.0) return 0.0;
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialMarks>)
                return -std::expm1(-x / l.mean);
            if constexpr (std::is_same_v<T, GammaMarks>)
                return boost::math::gamma_p(l.shape, x / l.scale);
            if constexpr (std::is_same_v<T, PointMassMarks>) return x >= l.value ? 1.0 : 0.0;
            if constexpr (std::is_same_v<T, ZeroInflatedMarks>)
                return l.p0 + (1.0 - l.p0) * l.base->cdf(x);
            if constexpr (std::is_same_v<T, EmpiricalMarks>) {
                double c = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    if (l.values[i] <= x) c += l.weights[i];
                return std::min(c, 1.0);
            }
        },
        law_);
}

}  // namespace cpld
