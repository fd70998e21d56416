#include "cpld/validation.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "cpld/config.hpp"
#include "cpld/estimate.hpp"
#include "cpld/parallel.hpp"
#include "cpld/rate.hpp"
#include "cpld/stats.hpp"

namespace cpld {

namespace {

struct Reporter {
    std::vector<CheckResult> checks;
    std::ostream* progress = nullptr;

    void add(std::string criterion, std::string name, bool pass, double observed,
             std::string requirement, std::string detail = "") {
        CheckResult check{std::move(criterion), std::move(name), pass, observed,
                          std::move(requirement), std::move(detail)};
        if (progress) {
            *progress << (check.pass ? "PASS " : "FAIL ") << 'c' << check.criterion << '.'
                      << check.name << "  observed=" << fmt17(check.observed) << "  required "
                      << check.requirement;
            if (!check.detail.empty()) *progress << "  (" << check.detail << ')';
            *progress << '\n' << std::flush;
        }
        checks.push_back(std::move(check));
    }
};

CompoundPoissonModel exp_model(double r) {
    return CompoundPoissonModel(r, MarkDistribution::exponential(1.0));
}

// 1. Continuous closed form: I(u) = (sqrt(r) - sqrt(u))^2 for Exp(1) marks.
void criterion_1(Reporter& rep, int) {
    double max_diff = 0.0;
    double zero_diff = 0.0;
    for (double r : {0.5, 1.0, 2.0}) {
        const CompoundPoissonModel model = exp_model(r);
        for (int i = 1; i <= 80; ++i) {
            const double u = 0.05 * i;
            const double got = rate_function(model, u).value;
            max_diff = std::max(max_diff, std::abs(got - closed_form_rate_exp_continuous(r, u)));
        }
        zero_diff = std::max(zero_diff, std::abs(rate_function(model, 0.0).value - r));
    }
    rep.add("1", "rate_continuous_closed_form", max_diff <= 1e-8, max_diff, "<= 1e-08",
            "u in {0.05..4.00}, r in {0.5,1,2}");
    rep.add("1", "rate_continuous_zero_atom", zero_diff == 0.0, zero_diff, "== 0", "I(0) = r");
}

// 2. Discrete closed form: I(u) = u - 1 - log u, I(0) = +inf.
void criterion_2(Reporter& rep, int) {
    const MarkDistribution marks = MarkDistribution::exponential(1.0);
    double max_diff = 0.0;
    for (int i = 1; i <= 40; ++i) {
        const double u = 0.1 * i;
        const double got = rate_function_discrete(marks, u).value;
        max_diff = std::max(max_diff, std::abs(got - closed_form_rate_exp_discrete(u)));
    }
    rep.add("2", "rate_discrete_closed_form", max_diff <= 1e-8, max_diff, "<= 1e-08",
            "u in {0.1..4.0}");
    const RateFunctionResult at_zero = rate_function_discrete(marks, 0.0);
    const bool inf_ok =
        std::isinf(at_zero.value) && at_zero.branch == RateBranch::Infinite;
    rep.add("2", "rate_discrete_zero_infinite", inf_ok, at_zero.value, "== +inf",
            "no atom at zero");
}

// 3. Solver vs grid-search supremum over randomized configurations.
void criterion_3(Reporter& rep, int) {
    std::mt19937_64 gen(977113ull);
    auto unif = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(gen);
    };
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
        MarkDistribution marks = MarkDistribution::exponential(1.0);
        switch (c % 5) {
            case 0: marks = MarkDistribution::exponential(unif(0.5, 2.0)); break;
            case 1: marks = MarkDistribution::gamma(unif(0.5, 3.0), unif(0.5, 2.0)); break;
            case 2: marks = MarkDistribution::point_mass(unif(0.5, 2.0)); break;
            case 3:
                marks = MarkDistribution::zero_inflated(
                    unif(0.05, 0.5), MarkDistribution::exponential(unif(0.5, 2.0)));
                break;
            default: {
                const std::size_t m = 3 + static_cast<std::size_t>(gen() % 6);
                std::vector<double> values(m), weights(m);
                double sum = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    values[i] = unif(0.05, 4.0);
                    weights[i] = unif(0.1, 1.0);
                    sum += weights[i];
                }
                for (double& w : weights) w /= sum;
                marks = MarkDistribution::empirical(std::move(values), std::move(weights));
            }
        }
        const CompoundPoissonModel model(unif(0.5, 3.0), marks);
        const double u = unif(0.3, 3.0) * model.mean_drift();
        const RateFunctionResult solved = rate_function(model, u);
        const double lam_star = solved.lambda_star.value();
        const double lam_max = marks.lambda_max();
        const double lo = lam_star - 2.0;
        const double hi = std::isfinite(lam_max)
                              ? std::min(lam_max - 1e-6 * std::max(1.0, lam_max), lam_star + 2.0)
                              : lam_star + 2.0;
        constexpr std::size_t kPoints = 1000000;
        std::vector<double> grid(kPoints);
        for (std::size_t i = 0; i < kPoints; ++i)
            grid[i] = lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1);
        const double oracle = brute_force_rate(model, u, grid);
        worst = std::max(worst, std::abs(solved.value - oracle));
    }
    rep.add("3", "solver_vs_grid_supremum", worst <= 1e-6, worst, "<= 1e-06",
            "50 randomized (family, r, u) cases, 1e6-point grids");
}

// 4. Monte Carlo check of the transform E e^{lambda t S_t}.
void criterion_4(Reporter& rep, int workers) {
    {
        const CompoundPoissonModel model = exp_model(1.0);
        const LaplaceEstimate est = empirical_laplace(model, 0.3, 2.0, 1000000, 41, workers);
        const double target = std::exp(2.0 * 0.3 / 0.7);
        const double diff = std::abs(est.mean - target);
        rep.add("4", "laplace_exponential_marks", diff <= 4.0 * est.std_err, diff,
                "<= 4*se = " + fmt17(4.0 * est.std_err), "Exp(1), r=1, lambda=0.3, t=2, n=1e6");
    }
    {
        const CompoundPoissonModel model(1.0, MarkDistribution::point_mass(1.0));
        const LaplaceEstimate est = empirical_laplace(model, 0.5, 1.0, 1000000, 42, workers);
        const double target = std::exp(std::exp(0.5) - 1.0);
        const double diff = std::abs(est.mean - target);
        rep.add("4", "laplace_point_marks", diff <= 4.0 * est.std_err, diff,
                "<= 4*se = " + fmt17(4.0 * est.std_err), "PointMass(1), r=1, lambda=0.5, t=1, n=1e6");
    }
}

// 5. Zero atom: exact formula, crude MC agreement, Poisson jump counts.
void criterion_5(Reporter& rep, int workers) {
    const CompoundPoissonModel model = exp_model(1.0);
    const double exact = std::exp(-5.0);
    const EstimateResult zero = zero_probability(model, 5.0);
    rep.add("5", "zero_probability_exact", zero.p_hat == exact,
            std::abs(zero.p_hat - exact), "== e^-5 exactly", "r=1, Exp(1) marks, t=5");

    const std::int64_t n = 1000000;
    const EstimateResult mc = mc_probability(model, EventWindow{0.0, 1e-9}, 5.0, n, 52, workers);
    const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
    const double diff = std::abs(mc.p_hat - exact);
    rep.add("5", "zero_probability_crude_mc", diff <= 4.0 * sigma, diff,
            "<= 4*sigma = " + fmt17(4.0 * sigma), "window |S_t| <= 1e-9, n=1e6");

    const CompoundPoissonModel mixed(
        1.0, MarkDistribution::zero_inflated(0.4, MarkDistribution::exponential(1.0)));
    const std::int64_t m = 100000;
    const auto hist_acc =
        chunked_sum<64>(m, workers, [&](std::int64_t i, std::array<double, 64>& acc) {
            RandomStream rng = RandomStream::substream(53, static_cast<std::uint64_t>(i));
            const PathStats stats = simulate_path_stats(mixed, 10.0, rng);
            acc[static_cast<std::size_t>(std::min<std::int64_t>(stats.positive_count, 63))] += 1.0;
        });
    std::vector<std::int64_t> hist(64);
    for (std::size_t k = 0; k < 64; ++k) hist[k] = static_cast<std::int64_t>(hist_acc[k]);
    const stats::PoissonFit fit = stats::poisson_fit(hist, 6.0);
    const double mean_sigma = std::sqrt(6.0 / static_cast<double>(m));
    rep.add("5", "jump_count_poisson_mean", std::abs(fit.sample_mean - 6.0) <= 4.0 * mean_sigma,
            std::abs(fit.sample_mean - 6.0), "<= 4*sigma = " + fmt17(4.0 * mean_sigma),
            "positive-jump counts, ZeroInflated(0.4, Exp(1)), t=10, n=1e5");
    const double ratio = fit.sample_variance / fit.sample_mean;
    rep.add("5", "jump_count_poisson_var_mean", ratio >= 0.95 && ratio <= 1.05, ratio,
            "in [0.95, 1.05]");
    rep.add("5", "jump_count_poisson_chi2", fit.p_value > 0.001, fit.p_value, "> 0.001",
            "chi2=" + fmt17(fit.chi_square) + ", dof=" + std::to_string(fit.dof));
}

// 6. Local decay via importance sampling where crude MC sees nothing.
void criterion_6(Reporter& rep, int workers) {
    const CompoundPoissonModel model = exp_model(1.0);
    const EventWindow window{4.0, 0.1};
    const std::int64_t n = 100000;
    const EstimateResult is = is_probability(model, window, 100.0, n, 61, workers);
    const double decay = is.log_decay.value_or(-1.0);
    rep.add("6", "is_log_decay_bracket", decay >= 0.8994 && decay <= 1.1000, decay,
            "in [0.8994, 1.1000]", "u=4, delta=0.1, t=100, n=1e5, p_hat=" + fmt17(is.p_hat));
    const EstimateResult mc = mc_probability(model, window, 100.0, n, 61, workers);
    rep.add("6", "crude_mc_sees_nothing", mc.p_hat == 0.0 && !mc.log_decay.has_value(), mc.p_hat,
            "== 0 (no hits at n=1e5)");
}

// 7. Tilted dynamics: mean/variance under the tilt and the martingale mean.
void criterion_7(Reporter& rep, int workers) {
    const CompoundPoissonModel model = exp_model(1.0);
    const double lambda = 0.5;
    const CompoundPoissonModel tilted = model.tilted(lambda);
    const double t = 50.0;
    const std::int64_t n = 100000;
    const auto sums = chunked_sum<2>(n, workers, [&](std::int64_t i, std::array<double, 2>& acc) {
        RandomStream rng = RandomStream::substream(71, static_cast<std::uint64_t>(i));
        const double s = simulate_path_stats(tilted, t, rng).total / t;
        acc[0] += s;
        acc[1] += s * s;
    });
    const double nn = static_cast<double>(n);
    const double mean = sums[0] / nn;
    const double var = (sums[1] - nn * mean * mean) / (nn - 1.0);
    const double mean_sigma = std::sqrt(0.32 / nn);
    rep.add("7", "tilted_mean_drift", std::abs(mean - 4.0) <= 4.0 * mean_sigma,
            std::abs(mean - 4.0), "<= 4*sigma = " + fmt17(4.0 * mean_sigma),
            "tilt 0.5, Exp(1), r=1, t=50, n=1e5");
    rep.add("7", "tilted_variance", std::abs(var - 0.32) <= 0.05 * 0.32, std::abs(var - 0.32),
            "<= 5% of 0.32", "g_c''(0.5)/t = 0.32");

    // E exp(log-likelihood ratio) = 1 under nominal sampling.
    for (double lam : {0.2, 0.5}) {
        const double tm = 5.0;
        const std::int64_t nm = 1000000;
        const double g = cumulant(model, lam);
        const auto wsum =
            chunked_sum<2>(nm, workers, [&](std::int64_t i, std::array<double, 2>& acc) {
                RandomStream rng = RandomStream::substream(72, static_cast<std::uint64_t>(i));
                const PathStats stats = simulate_path_stats(model, tm, rng);
                const double w = std::exp(lam * stats.total - tm * g);
                acc[0] += w;
                acc[1] += w * w;
            });
        const double wmean = wsum[0] / static_cast<double>(nm);
        const double wvar =
            std::max(wsum[1] - static_cast<double>(nm) * wmean * wmean, 0.0) /
            (static_cast<double>(nm) - 1.0);
        const double se = std::sqrt(wvar / static_cast<double>(nm));
        rep.add("7", lam < 0.3 ? "martingale_mean_tilt_0.2" : "martingale_mean_tilt_0.5",
                std::abs(wmean - 1.0) <= 4.0 * se, std::abs(wmean - 1.0),
                "<= 4*se = " + fmt17(4.0 * se), "mean exp(log LR), t=5, n=1e6");
    }
}

// 8. Chernoff bound: exact value at the half-abscissa tilt and MC validity.
void criterion_8(Reporter& rep, int workers) {
    const CompoundPoissonModel model = exp_model(1.0);
    const double bound10 = chernoff_tail_bound(model, 10.0, 1.0, 0.5);
    const double diff = std::abs(bound10 - std::exp(-4.0));
    rep.add("8", "chernoff_half_abscissa_exact", diff <= 1e-12, diff, "<= 1e-12",
            "j=10, t=1, tilt=0.5*A");

    const std::int64_t n = 1000000;
    const auto hits = chunked_sum<6>(n, workers, [&](std::int64_t i, std::array<double, 6>& acc) {
        RandomStream rng = RandomStream::substream(81, static_cast<std::uint64_t>(i));
        const double total = simulate_path_stats(model, 1.0, rng).total;
        for (int j = 1; j <= 6; ++j)
            if (total > j) acc[static_cast<std::size_t>(j - 1)] += 1.0;
    });
    double worst_margin = -1.0;
    std::ostringstream detail;
    for (int j = 1; j <= 6; ++j) {
        const double p = hits[static_cast<std::size_t>(j - 1)] / static_cast<double>(n);
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        const double bound = chernoff_tail_bound(model, j, 1.0, 0.5);
        worst_margin = std::max(worst_margin, p - bound - 4.0 * sigma);
        detail << (j > 1 ? " " : "") << "j=" << j << ":p=" << fmt17(p);
    }
    rep.add("8", "chernoff_mc_validity", worst_margin <= 0.0, worst_margin,
            "max over j of p - bound - 4*sigma <= 0", detail.str());
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 9. Byte-level reproducibility of every CLI command across worker counts.
void criterion_9(Reporter& rep, const ValidationOptions& options) {
    if (options.cli_path.empty()) {
        rep.add("9", "cli_determinism", false, 0.0, "identical bytes across workers",
                "cli path unavailable");
        return;
    }
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"rate", "rate --dist exp:1 --rate 1 --u-grid 0:4:0.05"},
        {"simulate", "simulate --dist exp:1 --rate 1 --t 20 --paths 500 --seed 11"},
        {"estimate_is",
         "estimate --method is --dist exp:1 --rate 1 --u 4 --delta 0.1 --t 30 --paths 20000 "
         "--seed 5"},
        {"estimate_mc",
         "estimate --method mc --dist zeroinf:0.4:exp:1 --rate 1 --u 0.5 --delta 0.25 --t 5 "
         "--paths 50000 --seed 2"},
        {"validate", "validate --criteria 1,2"},
    };
    const auto tmp_dir = std::filesystem::temp_directory_path();
    const std::string tag = std::to_string(::getpid());
    for (std::size_t k = 0; k < commands.size(); ++k) {
        const std::vector<int> worker_counts = {1, 1, 2, 8};  // first pair: rerun determinism
        std::vector<std::string> outputs;
        bool ran_ok = true;
        for (std::size_t w = 0; w < worker_counts.size(); ++w) {
            const auto out_file =
                tmp_dir / ("cpld_det_" + tag + "_" + std::to_string(k) + "_" +
                           std::to_string(w) + ".out");
            const std::string cmd = shell_quote(options.cli_path) + " " + commands[k].second +
                                    " --workers " + std::to_string(worker_counts[w]) + " --out " +
                                    shell_quote(out_file.string()) + " >/dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                ran_ok = false;
                break;
            }
            outputs.push_back(read_file(out_file));
            std::filesystem::remove(out_file);
        }
        const bool identical =
            ran_ok && std::all_of(outputs.begin(), outputs.end(),
                                  [&](const std::string& s) { return s == outputs.front(); });
        rep.add("9", "cli_determinism_" + commands[k].first, identical,
                identical ? 0.0 : 1.0, "identical bytes across workers 1,1,2,8",
                ran_ok ? "" : "command failed");
    }
}

}  // namespace

std::vector<CheckResult> run_acceptance(const ValidationOptions& options,
                                        const std::vector<int>& criteria,
                                        std::ostream* progress) {
    Reporter rep;
    rep.progress = progress;
    std::vector<int> wanted = criteria;
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const int workers = options.workers;
    for (int c : wanted) {
        switch (c) {
            case 1: criterion_1(rep, workers); break;
            case 2: criterion_2(rep, workers); break;
            case 3: criterion_3(rep, workers); break;
            case 4: criterion_4(rep, workers); break;
            case 5: criterion_5(rep, workers); break;
            case 6: criterion_6(rep, workers); break;
            case 7: criterion_7(rep, workers); break;
            case 8: criterion_8(rep, workers); break;
            case 9: criterion_9(rep, options); break;
            default:
                rep.add(std::to_string(c), "unknown_criterion", false, 0.0, "criterion in 1..9");
        }
    }
    return rep.checks;
}

void print_report(std::ostream& out, const std::vector<CheckResult>& checks) {
    for (const CheckResult& check : checks) {
        out << (check.pass ? "PASS " : "FAIL ") << 'c' << check.criterion << '.' << check.name
            << "  observed=" << fmt17(check.observed) << "  required " << check.requirement;
        if (!check.detail.empty()) out << "  (" << check.detail << ')';
        out << '\n';
    }
    std::size_t passed = 0;
    for (const CheckResult& check : checks) passed += check.pass ? 1 : 0;
    out << passed << '/' << checks.size() << " checks passed\n";
}

bool all_passed(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

}  // namespace cpld
