#include "votermix/graphical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "votermix/rng.hpp"

namespace votermix {

std::vector<GraphicalEvents::Ref> GraphicalEvents::merged_order() const {
    std::vector<Ref> refs;
    refs.reserve(total_vote_events() + 16);
    for (int x = 0; x < n_sites; ++x) {
        for (int i = 0; i < static_cast<int>(votes[x].size()); ++i)
            refs.push_back({votes[x][i].time, x, i, true});
        for (int i = 0; i < static_cast<int>(reras[x].size()); ++i)
            refs.push_back({reras[x][i].time, x, i, false});
    }
    std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) { return a.time < b.time; });
    return refs;
}

std::size_t GraphicalEvents::total_vote_events() const {
    std::size_t total = 0;
    for (const auto& v : votes) total += v.size();
    for (const auto& r : reras) total += r.size();
    return total;
}

namespace {

/// Sample target index by CDF inversion over the outgoing edges of a site.
int sample_target(const std::vector<std::pair<int, double>>& row, double exit, Rng& rng) {
    double u = rng.uniform01() * exit;
    for (const auto& [y, r] : row) {
        u -= r;
        if (u <= 0.0) return y;
    }
    return row.back().first;
}

/// Events anywhere with exactly equal timestamps would make the global order
/// ambiguous; the later event's time is re-drawn until all are distinct.
void break_ties(GraphicalEvents& ev, std::uint64_t tie_key) {
    Rng tie_rng = derive_stream(tie_key, 0, StreamKind::TieBreak);
    for (int pass = 0; pass < 64; ++pass) {
        auto refs = ev.merged_order();
        bool clean = true;
        for (std::size_t i = 1; i < refs.size(); ++i) {
            if (refs[i].time != refs[i - 1].time) continue;
            clean = false;
            const auto& dup = refs[i];
            const double fresh = tie_rng.uniform01() * ev.horizon;
            if (dup.is_vote)
                ev.votes[dup.site][dup.index].time = fresh;
            else
                ev.reras[dup.site][dup.index].time = fresh;
        }
        if (clean) return;
        for (int x = 0; x < ev.n_sites; ++x) {
            std::sort(ev.votes[x].begin(), ev.votes[x].end(),
                      [](const VoteEvent& a, const VoteEvent& b) { return a.time < b.time; });
            std::sort(ev.reras[x].begin(), ev.reras[x].end(),
                      [](const ReraEvent& a, const ReraEvent& b) { return a.time < b.time; });
        }
    }
    throw std::runtime_error("timestamp tie breaking did not converge");
}

}  // namespace

GraphicalEvents sample_events_split(const RateKernel& kernel, double t, std::uint64_t vote_seed,
                                    std::uint64_t rera_seed) {
    if (t < 0.0) throw std::invalid_argument("sample_events: negative horizon");
    GraphicalEvents ev;
    ev.n_sites = kernel.n_sites;
    ev.horizon = t;
    ev.seed = vote_seed;
    ev.votes.assign(kernel.n_sites, {});
    ev.reras.assign(kernel.n_sites, {});
    for (int x = 0; x < kernel.n_sites; ++x) {
        const double q = kernel.exit_rate[x];
        if (q > 0.0) {
            Rng times = derive_stream(vote_seed, x, StreamKind::VoteTimes);
            Rng targets = derive_stream(vote_seed, x, StreamKind::VoteTargets);
            double clock = times.exponential(q);
            while (clock < t) {
                ev.votes[x].push_back({clock, sample_target(kernel.out[x], q, targets)});
                clock += times.exponential(q);
            }
        }
        Rng times = derive_stream(rera_seed, x, StreamKind::ReraTimes);
        Rng bits = derive_stream(rera_seed, x, StreamKind::ReraBits);
        double clock = times.exponential(1.0);
        while (clock < t) {
            ev.reras[x].push_back({clock, bits.fair_bit()});
            clock += times.exponential(1.0);
        }
    }
    break_ties(ev, vote_seed ^ (rera_seed * 0x9e3779b97f4a7c15ULL));
    return ev;
}

GraphicalEvents sample_events(const RateKernel& kernel, double t, std::uint64_t seed) {
    return sample_events_split(kernel, t, seed, seed);
}

SpinConfiguration forward_run(const GraphicalEvents& events, SpinConfiguration eta0) {
    if (eta0.n_sites() != events.n_sites) throw std::invalid_argument("forward_run: size mismatch");
    for (const auto& ref : events.merged_order()) {
        if (ref.is_vote)
            eta0.set(ref.site, eta0.get(events.votes[ref.site][ref.index].target));
        else
            eta0.set(ref.site, events.reras[ref.site][ref.index].bit);
    }
    return eta0;
}

SpinConfiguration forward_sample(const RateKernel& kernel, const SpinConfiguration& eta0, double t,
                                 std::uint64_t seed) {
    return forward_run(sample_events(kernel, t, seed), eta0);
}

SpinConfiguration gillespie_run(const RateKernel& kernel, SpinConfiguration eta0, double t,
                                std::uint64_t seed) {
    if (t < 0.0) throw std::invalid_argument("gillespie_run: negative horizon");
    if (eta0.n_sites() != kernel.n_sites) throw std::invalid_argument("gillespie_run: size mismatch");
    const int n = kernel.n_sites;
    std::vector<double> majorant(n);
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
        majorant[x] = 0.5 + kernel.exit_rate[x];
        total += majorant[x];
    }
    AliasTable pick(majorant);
    Rng rng = derive_stream(seed, 0, StreamKind::Gillespie);
    double clock = rng.exponential(total);
    while (clock < t) {
        const int x = static_cast<int>(pick.sample(rng));
        const bool own = eta0.get(x);
        double rate = 0.5;
        for (const auto& [y, r] : kernel.out[x])
            if (eta0.get(y) != own) rate += r;
        if (rng.uniform01() * majorant[x] < rate) eta0.flip(x);
        clock += rng.exponential(total);
    }
    return eta0;
}

namespace {

struct DepthEvent {
    double depth;
    bool is_vote;
    int aux;  // vote target, or rerandomization bit
};

/// Per-site event stream in backward-depth coordinates, regenerated
/// deterministically per horizon so doubling reuses the realized prefix.
std::vector<DepthEvent> depth_stream(const RateKernel& kernel, int site, double horizon,
                                     std::uint64_t seed) {
    std::vector<DepthEvent> evs;
    const double q = kernel.exit_rate[site];
    if (q > 0.0) {
        Rng times = derive_stream(seed, site, StreamKind::PerfectVoteTimes);
        Rng targets = derive_stream(seed, site, StreamKind::PerfectVoteTargets);
        double clock = times.exponential(q);
        while (clock < horizon) {
            evs.push_back({clock, true, sample_target(kernel.out[site], q, targets)});
            clock += times.exponential(q);
        }
    }
    Rng times = derive_stream(seed, site, StreamKind::PerfectReraTimes);
    Rng bits = derive_stream(seed, site, StreamKind::PerfectReraBits);
    double clock = times.exponential(1.0);
    while (clock < horizon) {
        evs.push_back({clock, false, bits.fair_bit() ? 1 : 0});
        clock += times.exponential(1.0);
    }
    std::sort(evs.begin(), evs.end(),
              [](const DepthEvent& a, const DepthEvent& b) { return a.depth < b.depth; });
    return evs;
}

struct UnionFind {
    std::vector<int> parent, size;
    explicit UnionFind(int n) : parent(n), size(n, 1) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    int unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
        return a;
    }
};

}  // namespace

SpinConfiguration perfect_stationary_sample(const RateKernel& kernel, std::uint64_t seed) {
    const int n = kernel.n_sites;
    for (double horizon = 4.0; horizon < 1.1e6; horizon *= 2.0) {
        std::vector<std::vector<DepthEvent>> evs(n);
        for (int x = 0; x < n; ++x) evs[x] = depth_stream(kernel, x, horizon, seed);

        UnionFind classes(n);
        std::vector<int> occupant(n);   // class root at each site, -1 when empty
        std::vector<int> cursor(n, 0);  // next unconsumed event per site
        std::vector<char> dead(n, 0);   // per class root
        std::vector<char> bit(n, 0);
        using HeapItem = std::tuple<double, int, int>;  // depth, site, cursor index
        std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
        bool survivor = false;
        for (int x = 0; x < n; ++x) {
            occupant[x] = x;
            if (evs[x].empty())
                survivor = true;
            else
                heap.emplace(evs[x][0].depth, x, 0);
        }
        int remaining = n;
        while (!survivor && remaining > 0 && !heap.empty()) {
            auto [depth, site, idx] = heap.top();
            heap.pop();
            if (occupant[site] < 0 || idx != cursor[site]) continue;  // stale
            const DepthEvent& ev = evs[site][idx];
            if (!ev.is_vote) {
                const int c = classes.find(occupant[site]);
                dead[c] = 1;
                bit[c] = static_cast<char>(ev.aux);
                remaining -= classes.size[c];
                occupant[site] = -1;
                continue;
            }
            const int w = ev.aux;
            const int moving = occupant[site];
            occupant[site] = -1;
            if (occupant[w] >= 0) {
                occupant[w] = classes.unite(moving, occupant[w]);
            } else {
                occupant[w] = moving;
                auto it = std::upper_bound(
                    evs[w].begin(), evs[w].end(), depth,
                    [](double d, const DepthEvent& e) { return d < e.depth; });
                if (it == evs[w].end()) {
                    survivor = true;
                } else {
                    cursor[w] = static_cast<int>(it - evs[w].begin());
                    heap.emplace(it->depth, w, cursor[w]);
                }
            }
        }
        if (survivor || remaining > 0) continue;
        SpinConfiguration sample(n);
        for (int x = 0; x < n; ++x) sample.set(x, bit[classes.find(x)] != 0);
        return sample;
    }
    throw std::runtime_error("perfect sampling did not terminate");
}

void write_event_log_csv(std::ostream& out, const GraphicalEvents& events) {
    out << "site,kind,time,aux\n";
    char buf[64];
    for (const auto& ref : events.merged_order()) {
        std::snprintf(buf, sizeof buf, "%.12g", ref.time);
        if (ref.is_vote)
            out << ref.site << ",vote," << buf << ',' << events.votes[ref.site][ref.index].target
                << '\n';
        else
            out << ref.site << ",rera," << buf << ','
                << (events.reras[ref.site][ref.index].bit ? 1 : 0) << '\n';
    }
}

}  // namespace votermix
