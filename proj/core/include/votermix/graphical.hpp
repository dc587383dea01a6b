#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "votermix/chain.hpp"
#include "votermix/spin.hpp"

namespace votermix {

struct VoteEvent {
    double time;
    int target;
};

struct ReraEvent {
    double time;
    bool bit;
};

/// One realization of the Poisson event streams driving the process on
/// (0, t): per-site voting events (rate q(x), target y w.p. q(x,y)/q(x)) and
/// rerandomization events (rate 1, fair bit). Streams are strictly increasing
/// in time and no two events anywhere share a timestamp (floating-point ties
/// are re-drawn). Deterministic given (kernel, horizon, seed).
struct GraphicalEvents {
    int n_sites = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<VoteEvent>> votes;
    std::vector<std::vector<ReraEvent>> reras;

    struct Ref {
        double time;
        int site;
        int index;
        bool is_vote;
    };
    /// All events in increasing global time order.
    std::vector<Ref> merged_order() const;

    std::size_t total_vote_events() const;
};

GraphicalEvents sample_events(const RateKernel& kernel, double t, std::uint64_t seed);

/// Same construction with the voting and rerandomization randomness keyed
/// separately, so one side can be resampled while the other is held fixed.
GraphicalEvents sample_events_split(const RateKernel& kernel, double t, std::uint64_t vote_seed,
                                    std::uint64_t rera_seed);

/// Deterministic map from events and an initial configuration to eta_t:
/// at a voting event (x, T, W) the site copies, eta(x) <- eta(W-); at a
/// rerandomization (x, R, Z) it is overwritten, eta(x) <- Z.
SpinConfiguration forward_run(const GraphicalEvents& events, SpinConfiguration eta0);

SpinConfiguration forward_sample(const RateKernel& kernel, const SpinConfiguration& eta0, double t,
                                 std::uint64_t seed);

/// Independent simulator of the same dynamics by competing exponential
/// clocks (thinning against the per-site majorant 1/2 + q(x)); used to
/// cross-validate the graphical construction.
SpinConfiguration gillespie_run(const RateKernel& kernel, SpinConfiguration eta0, double t,
                                std::uint64_t seed);

/// Exact draw from the stationary distribution: the backward construction is
/// extended (horizon 4, doubled as needed, reusing the realized streams on
/// the overlap) until every coalescing lineage has met a rerandomization;
/// the rerandomization bits then determine the sample with no dependence on
/// any initial state.
SpinConfiguration perfect_stationary_sample(const RateKernel& kernel, std::uint64_t seed);

/// Event-log dump, CSV columns `site,kind,time,aux`.
void write_event_log_csv(std::ostream& out, const GraphicalEvents& events);

}  // namespace votermix
