#include "cpld/simulate.hpp"

#include <cmath>
#include <optional>
#include <ostream>

#include "cpld/config.hpp"
#include "cpld/cumulant.hpp"
#include "cpld/errors.hpp"
#include "cpld/parallel.hpp"

namespace cpld {

PathSample::PathSample(double horizon, std::vector<Jump> jumps)
    : horizon_(horizon), jumps_(std::move(jumps)), total_(0.0), positive_count_(0) {
    if (!(std::isfinite(horizon_) && horizon_ > 0.0))
        throw usage_error("path horizon must be > 0");
    double prev = 0.0;
    for (const Jump& j : jumps_) {
        if (!(j.time > prev && j.time <= horizon_))
            throw usage_error("jump times must be strictly increasing within (0, t]");
        if (!(j.mark >= 0.0)) throw usage_error("marks must be >= 0");
        prev = j.time;
        total_ += j.mark;
        if (j.mark > 0.0) ++positive_count_;
    }
}

PathSample simulate_path(const CompoundPoissonModel& model, double t, RandomStream& rng) {
    if (!(std::isfinite(t) && t > 0.0)) throw usage_error("horizon t must be > 0");
    const double mean_gap = 1.0 / model.rate();
    std::vector<Jump> jumps;
    double tau = rng.exponential(mean_gap);
    while (tau <= t) {
        jumps.push_back({tau, model.marks().sample(rng)});
        tau += rng.exponential(mean_gap);
    }
    return PathSample(t, std::move(jumps));
}

PathStats simulate_path_stats(const CompoundPoissonModel& model, double t, RandomStream& rng) {
    if (!(std::isfinite(t) && t > 0.0)) throw usage_error("horizon t must be > 0");
    const double mean_gap = 1.0 / model.rate();
    PathStats stats;
    double tau = rng.exponential(mean_gap);
    while (tau <= t) {
        const double mark = model.marks().sample(rng);
        stats.total += mark;
        ++stats.jump_count;
        if (mark > 0.0) ++stats.positive_count;
        tau += rng.exponential(mean_gap);
    }
    return stats;
}

PathSample simulate_tilted_path(const CompoundPoissonModel& model, double lambda, double t,
                                RandomStream& rng) {
    return simulate_path(model.tilted(lambda), t, rng);
}

double log_likelihood_ratio(const CompoundPoissonModel& model, double lambda,
                            const PathSample& path) {
    return lambda * path.total() - path.horizon() * cumulant(model, lambda);
}

std::vector<PathSample> simulate_paths(const CompoundPoissonModel& model, double t,
                                       std::int64_t n, std::uint64_t seed, int workers) {
    if (n < 0) throw usage_error("path count must be >= 0");
    std::vector<std::optional<PathSample>> slots(static_cast<std::size_t>(n));
    chunked_sum<1>(n, workers, [&](std::int64_t i, std::array<double, 1>&) {
        RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
        slots[static_cast<std::size_t>(i)].emplace(simulate_path(model, t, rng));
    });
    std::vector<PathSample> paths;
    paths.reserve(static_cast<std::size_t>(n));
    for (auto& s : slots) paths.push_back(std::move(*s));
    return paths;
}

void write_paths_csv_header(std::ostream& out) { out << "path_id,tau,xi\n"; }

void write_path_csv(std::ostream& out, std::int64_t path_id, const PathSample& path) {
    for (const Jump& j : path.jumps())
        out << path_id << ',' << fmt17(j.time) << ',' << fmt17(j.mark) << '\n';
}

}  // namespace cpld
