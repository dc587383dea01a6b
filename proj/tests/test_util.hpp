#pragma once

#include <string>
#include <utility>
#include <vector>

#include "votermix/chain.hpp"
#include "votermix/exact.hpp"
#include "votermix/rng.hpp"
#include "votermix/spin.hpp"

namespace votermix::testing {

/// Deterministic irreducible kernel: a random-rate Hamiltonian cycle plus
/// extra directed edges.
inline RateKernel random_kernel(int n, std::uint64_t seed) {
    Rng rng = derive_stream(seed, 0, StreamKind::Generic);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<RateEdge> edges;
    for (int i = 0; i < n; ++i)
        edges.push_back({order[i], order[(i + 1) % n], 0.3 + 1.2 * rng.uniform01()});
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            bool on_cycle = false;
            for (int i = 0; i < n; ++i)
                if (order[i] == x && order[(i + 1) % n] == y) on_cycle = true;
            if (!on_cycle && rng.bernoulli(0.35)) edges.push_back({x, y, rng.uniform01()});
        }
    return make_kernel(n, edges);
}

struct NamedKernel {
    std::string name;
    RateKernel kernel;
};

/// Small-kernel battery used by the exhaustive invariants.
inline std::vector<NamedKernel> kernel_battery_upto(int max_sites) {
    std::vector<NamedKernel> battery;
    auto add = [&](std::string name, RateKernel k) {
        if (k.n_sites <= max_sites) battery.push_back({std::move(name), std::move(k)});
    };
    add("single_site", build_empty(1));
    add("two_site_sym", make_kernel(2, {{0, 1, 1.0}, {1, 0, 1.0}}));
    add("two_site_asym", make_kernel(2, {{0, 1, 2.0}, {1, 0, 0.5}}));
    add("empty3", build_empty(3));
    add("cycle3", build_cycle(3));
    add("complete3", build_complete(3));
    add("star2", build_star(2));
    add("star3", build_star(3));
    add("cycle4", build_cycle(4));
    add("empty4", build_empty(4));
    add("random4", random_kernel(4, 20240817));
    return battery;
}

/// Closed-form single-site law: P(state 1 at time t | started at 1).
inline double one_site_up_probability(double t) { return 0.5 * (1.0 + std::exp(-t)); }

}  // namespace votermix::testing
