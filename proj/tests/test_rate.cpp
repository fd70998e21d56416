#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cpld/errors.hpp"
#include "cpld/rate.hpp"
#include "test_util.hpp"

using namespace cpld;
using namespace cpld::testutil;

namespace {

CompoundPoissonModel exp_model(double r = 1.0) {
    return CompoundPoissonModel(r, MarkDistribution::exponential(1.0));
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return grid;
}

}  // namespace

TEST_CASE("solve_tilt: closed-form oracle for exponential marks") {
    // g_c'(lambda) = r / (1 - lambda)^2 = u  =>  lambda* = 1 - sqrt(r / u).
    const auto model = exp_model();
    const TiltResult at4 = solve_tilt(model, 4.0);
    CHECK(at4.status == TiltStatus::Converged);
    CHECK(at4.lambda_star == doctest::Approx(0.5).epsilon(1e-9));

    const TiltResult at_mean = solve_tilt(model, 1.0);
    CHECK(at_mean.status == TiltStatus::Converged);
    CHECK(at_mean.lambda_star == 0.0);

    const TiltResult low = solve_tilt(model, 0.25);
    CHECK(low.lambda_star == doctest::Approx(-1.0).epsilon(1e-9));

    for (double u : {0.05, 0.6, 2.0, 9.0, 100.0}) {
        const TiltResult res = solve_tilt(model, u);
        CHECK(res.lambda_star == doctest::Approx(1.0 - std::sqrt(1.0 / u)).epsilon(1e-8));
        CHECK(res.lambda_star < model.marks().lambda_max());
    }
    CHECK_THROWS_AS(solve_tilt(model, 0.0), usage_error);
    CHECK_THROWS_AS(solve_tilt(model, -1.0), usage_error);
}

TEST_CASE("solve_tilt: residual satisfies the configured tolerance") {
    const auto model = CompoundPoissonModel(2.0, MarkDistribution::gamma(1.7, 0.6));
    for (double u : {0.5, 1.0, 3.0, 10.0}) {
        const TiltResult res = solve_tilt(model, u);
        REQUIRE(res.status == TiltStatus::Converged);
        const double resid = std::abs(cumulant_derivative(model, res.lambda_star, 1) - u);
        CHECK(resid <= 1e-10 * u * (1.0 + 1e-6) + 1e-12);
    }
}

TEST_CASE("solve_tilt: non-convergence raises numeric_error with the bracket") {
    SolverConfig cfg;
    cfg.max_iter = 1;
    cfg.tol_lambda = 1e-300;
    cfg.tol_residual = 1e-300;
    try {
        solve_tilt(exp_model(), 4.0, cfg);
        CHECK(false);
    } catch (const numeric_error& e) {
        CHECK(e.bracket_lo() < e.bracket_hi());
    }
}

TEST_CASE("rate_function: worked values for exponential marks") {
    const auto model = exp_model();
    const RateFunctionResult at4 = rate_function(model, 4.0);
    CHECK(at4.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(at4.branch == RateBranch::Interior);
    CHECK(at4.lambda_star.value() == doctest::Approx(0.5).epsilon(1e-8));

    const RateFunctionResult at0 = rate_function(model, 0.0);
    CHECK(at0.value == 1.0);
    CHECK(at0.branch == RateBranch::ZeroAtom);
    CHECK_FALSE(at0.lambda_star.has_value());

    const RateFunctionResult at_mean = rate_function(model, 1.0);
    CHECK(at_mean.value == doctest::Approx(0.0));
    CHECK(at_mean.value >= 0.0);
}

TEST_CASE("closed forms: continuous and discrete") {
    CHECK(closed_form_rate_exp_continuous(1.0, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(closed_form_rate_exp_continuous(1.0, 1.0) == 0.0);
    CHECK(closed_form_rate_exp_continuous(2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(closed_form_rate_exp_continuous(1.0, 0.0) == 1.0);
    // continuity at u = 0
    CHECK(closed_form_rate_exp_continuous(1.7, 1e-14) ==
          doctest::Approx(1.7).epsilon(1e-6));

    CHECK(closed_form_rate_exp_discrete(1.0) == 0.0);
    const double e = std::exp(1.0);
    CHECK(closed_form_rate_exp_discrete(e) == doctest::Approx(e - 2.0).epsilon(1e-14));
    CHECK(std::isinf(closed_form_rate_exp_discrete(0.0)));
    CHECK_THROWS_AS(closed_form_rate_exp_continuous(0.0, 1.0), usage_error);
    CHECK_THROWS_AS(closed_form_rate_exp_discrete(-1.0), usage_error);
}

TEST_CASE("rate_function matches the closed form on a grid of u and r") {
    for (double r : {0.5, 1.0, 2.0}) {
        const auto model = exp_model(r);
        for (int i = 1; i <= 80; ++i) {
            const double u = 0.05 * i;
            CHECK(std::abs(rate_function(model, u).value -
                           closed_form_rate_exp_continuous(r, u)) <= 1e-8);
        }
    }
}

TEST_CASE("rate_function_discrete: worked values") {
    const auto exp1 = MarkDistribution::exponential(1.0);
    CHECK(rate_function_discrete(exp1, 2.0).value ==
          doctest::Approx(2.0 - 1.0 - std::log(2.0)).epsilon(1e-10));
    CHECK(rate_function_discrete(exp1, 1.0).value == doctest::Approx(0.0));
    const RateFunctionResult at0 = rate_function_discrete(exp1, 0.0);
    CHECK(std::isinf(at0.value));
    CHECK(at0.branch == RateBranch::Infinite);

    for (int i = 1; i <= 40; ++i) {
        const double u = 0.1 * i;
        CHECK(std::abs(rate_function_discrete(exp1, u).value -
                       closed_form_rate_exp_discrete(u)) <= 1e-8);
    }

    // an atom at zero gives I(0) = -log P(xi = 0)
    const auto zi = MarkDistribution::zero_inflated(0.4, MarkDistribution::exponential(1.0));
    const RateFunctionResult zi0 = rate_function_discrete(zi, 0.0);
    CHECK(zi0.value == doctest::Approx(-std::log(0.4)).epsilon(1e-14));
    CHECK(zi0.branch == RateBranch::ZeroAtom);
}

TEST_CASE("rate_function_discrete: bounded supports") {
    const auto point = MarkDistribution::point_mass(2.0);
    CHECK(rate_function_discrete(point, 2.0).value == doctest::Approx(0.0));
    CHECK(rate_function_discrete(point, 1.0).branch == RateBranch::Infinite);
    CHECK(rate_function_discrete(point, 3.0).branch == RateBranch::Infinite);

    // at the top of the support, I(u) = -log P(xi = max)
    const auto emp = MarkDistribution::empirical({1.0, 3.0}, {0.5, 0.5});
    CHECK(rate_function_discrete(emp, 3.0).value ==
          doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(rate_function_discrete(emp, 1.0).value ==
          doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(rate_function_discrete(emp, 2.0).value == doctest::Approx(0.0));
    CHECK(rate_function_discrete(emp, 3.5).branch == RateBranch::Infinite);
}

TEST_CASE("brute force grid search: worked values") {
    const auto model = exp_model();
    CHECK(brute_force_rate(model, 4.0, {0.0}) == 0.0);  // single point: -g_c(0)

    const auto grid = linspace(-5.0, 0.9, 59001);  // step 1e-4
    CHECK(std::abs(brute_force_rate(model, 4.0, grid) - 1.0) <= 1e-6);

    const CompoundPoissonModel gamma_model(1.0, MarkDistribution::gamma(2.0, 1.0));
    const RateFunctionResult solved = rate_function(gamma_model, 3.0);
    const auto dense = linspace(solved.lambda_star.value() - 2.0,
                                std::min(1.0 - 1e-6, solved.lambda_star.value() + 2.0), 1000000);
    CHECK(std::abs(brute_force_rate(gamma_model, 3.0, dense) - solved.value) <= 1e-6);

    CHECK_THROWS_AS(brute_force_rate(model, 4.0, {0.5, 1.0}), usage_error);
    CHECK_THROWS_AS(brute_force_rate(model, 4.0, {}), usage_error);
    CHECK_THROWS_AS(brute_force_rate(model, 0.0, {0.0}), usage_error);
}

TEST_CASE("solver agrees with the grid-search supremum on random configurations") {
    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int c = 0; c < 10; ++c) {
        MarkDistribution marks = MarkDistribution::exponential(0.5 + 1.5 * unif(gen));
        if (c % 3 == 1) marks = MarkDistribution::gamma(0.5 + 2.0 * unif(gen), 0.4 + unif(gen));
        if (c % 3 == 2)
            marks = MarkDistribution::zero_inflated(0.5 * unif(gen),
                                                    MarkDistribution::exponential(0.5 + unif(gen)));
        const CompoundPoissonModel model(0.5 + 2.0 * unif(gen), marks);
        const double u = (0.4 + 2.0 * unif(gen)) * model.mean_drift();
        const RateFunctionResult solved = rate_function(model, u);
        const double lam_star = solved.lambda_star.value();
        const double lam_max = marks.lambda_max();
        const double hi =
            std::isfinite(lam_max) ? std::min(lam_max * (1.0 - 1e-6), lam_star + 2.0)
                                   : lam_star + 2.0;
        const double oracle = brute_force_rate(model, u, linspace(lam_star - 2.0, hi, 400001));
        CHECK(std::abs(solved.value - oracle) <= 1e-6);
    }
}

TEST_CASE("zero-atom continuity at the underflow floor") {
    const auto model = exp_model();
    const RateFunctionResult tiny = rate_function(model, 1e-6);
    CHECK(std::abs(tiny.value - rate_function(model, 0.0).value) <= 1e-3);
    CHECK(tiny.branch == RateBranch::ZeroAtom);  // capped below lambda_floor

    const CompoundPoissonModel mixed(
        2.0, MarkDistribution::zero_inflated(0.3, MarkDistribution::exponential(1.0)));
    CHECK(std::abs(rate_function(mixed, 1e-7).value - 2.0 * 0.7) <= 1e-3);
}

TEST_CASE("rate function is convex in u") {
    for (const auto& model :
         {exp_model(1.0), CompoundPoissonModel(2.0, MarkDistribution::gamma(2.0, 0.5))}) {
        std::vector<double> values;
        for (int i = 1; i <= 200; ++i) values.push_back(rate_function(model, 0.02 * i).value);
        for (std::size_t i = 1; i + 1 < values.size(); ++i)
            CHECK(values[i] <= 0.5 * (values[i - 1] + values[i + 1]) + 1e-10);
    }
}

TEST_CASE("envelope identity: dI/du equals lambda*") {
    const auto model = exp_model();
    for (double u : {0.5, 1.5, 3.0}) {
        const double fd = central_diff(
            [&](double x) { return rate_function(model, x).value; }, u, 1e-5);
        CHECK(fd == doctest::Approx(rate_function(model, u).lambda_star.value()).epsilon(1e-4));
    }
}

TEST_CASE("mark scale: Exp(theta) marks satisfy I_theta(u) = I_1(u / theta)") {
    for (double theta : {0.5, 2.0}) {
        const CompoundPoissonModel scaled(1.3, MarkDistribution::exponential(theta));
        const CompoundPoissonModel unit(1.3, MarkDistribution::exponential(1.0));
        for (double u : linspace(0.1, 4.0, 40)) {
            CHECK(std::abs(rate_function(scaled, u).value -
                           rate_function(unit, u / theta).value) <= 1e-8);
        }
    }
}

TEST_CASE("boundary branches: degenerate all-zero marks") {
    // Finite abscissa with a vanishing cumulant: linear continuation A*u.
    const CompoundPoissonModel frozen(
        2.0, MarkDistribution::zero_inflated(1.0, MarkDistribution::exponential(1.0)));
    const RateFunctionResult lin = rate_function(frozen, 3.0);
    CHECK(lin.branch == RateBranch::BoundaryLinear);
    CHECK(lin.value == doctest::Approx(3.0).epsilon(1e-12));  // lambda_max = 1
    CHECK_FALSE(lin.lambda_star.has_value());

    // Infinite abscissa: nothing to continue along, I(u) = +inf.
    const CompoundPoissonModel frozen_inf(1.0, MarkDistribution::empirical({0.0}, {1.0}));
    const RateFunctionResult inf_res = rate_function(frozen_inf, 1.0);
    CHECK(inf_res.branch == RateBranch::Infinite);
    CHECK(std::isinf(inf_res.value));

    CHECK(rate_function(frozen, 0.0).value == 0.0);  // no positive jumps at all
}

TEST_CASE("usage guards") {
    CHECK_THROWS_AS(rate_function(exp_model(), -0.5), usage_error);
    CHECK_THROWS_AS(rate_function_discrete(MarkDistribution::exponential(1.0), -1.0),
                    usage_error);
    SolverConfig bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(solve_tilt(exp_model(), 2.0, bad), usage_error);
}
