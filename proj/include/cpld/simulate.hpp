#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cpld/model.hpp"
#include "cpld/rng.hpp"

namespace cpld {

struct Jump {
    double time;  // arrival tau in (0, t]
    double mark;  // xi >= 0
};

// One realized trajectory on (0, t]. Jump times are strictly increasing; an
// arrival at exactly t counts as inside the horizon.
class PathSample {
public:
    PathSample(double horizon, std::vector<Jump> jumps);

    double horizon() const noexcept { return horizon_; }
    const std::vector<Jump>& jumps() const noexcept { return jumps_; }

    // Sum of marks, i.e. t * S_t.
    double total() const noexcept { return total_; }
    // S_t = total / t.
    double s_t() const noexcept { return total_ / horizon_; }
    std::int64_t jump_count() const noexcept { return static_cast<std::int64_t>(jumps_.size()); }
    // Number of strictly positive marks (the counting process of real jumps).
    std::int64_t jump_count_positive() const noexcept { return positive_count_; }

private:
    double horizon_;
    std::vector<Jump> jumps_;
    double total_;
    std::int64_t positive_count_;
};

// Reduced per-path statistics, consuming the stream exactly like
// simulate_path but storing nothing.
struct PathStats {
    double total = 0.0;
    std::int64_t jump_count = 0;
    std::int64_t positive_count = 0;
};

// Draws a path of the marked point process: i.i.d. Exponential(rate r) gaps,
// i.i.d. marks from G independent of the arrival history, stopping at the
// first arrival past t.
PathSample simulate_path(const CompoundPoissonModel& model, double t, RandomStream& rng);
PathStats simulate_path_stats(const CompoundPoissonModel& model, double t, RandomStream& rng);

// Path under the tilted law: compound Poisson with rate r * L(lambda) and
// marks from tilt(G, lambda). lambda = 0 reproduces simulate_path exactly.
PathSample simulate_tilted_path(const CompoundPoissonModel& model, double lambda, double t,
                                RandomStream& rng);

// log L_t(lambda) = lambda * total - t * g_c(lambda); under nominal sampling
// exp of this has mean 1.
double log_likelihood_ratio(const CompoundPoissonModel& model, double lambda,
                            const PathSample& path);

// Batch generation with per-path substreams: path i is drawn from
// substream(seed, i), so results are independent of the worker count.
std::vector<PathSample> simulate_paths(const CompoundPoissonModel& model, double t,
                                       std::int64_t n, std::uint64_t seed, int workers = 0);

// CSV dump: header "path_id,tau,xi", one row per jump, 17 significant digits.
void write_paths_csv_header(std::ostream& out);
void write_path_csv(std::ostream& out, std::int64_t path_id, const PathSample& path);

}  // namespace cpld
