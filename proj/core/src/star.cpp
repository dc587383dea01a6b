#include "votermix/star.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace votermix {

namespace {
constexpr double kTailTol = 1e-15;
}

SparseGenerator reduced_star_generator(int n) {
    if (n < 2) throw std::invalid_argument("reduced star chain needs n >= 2");
    if (n % 2 != 0)
        std::cerr << "votermix: warning: reduced star chain with odd n = " << n << "\n";
    const double dn = n;
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
    entries.reserve(6 * static_cast<std::size_t>(n + 1));
    auto idx = [n](int c, int k) { return static_cast<std::uint32_t>(reduced_star_index(n, c, k)); };
    for (int k = 0; k <= n; ++k) {
        entries.emplace_back(idx(0, k), idx(1, k), 0.5 + k / dn);
        entries.emplace_back(idx(1, k), idx(0, k), 0.5 + (n - k) / dn);
        if (k < n) {
            entries.emplace_back(idx(0, k), idx(0, k + 1), (n - k) / 2.0);
            entries.emplace_back(idx(1, k), idx(1, k + 1), 3.0 * (n - k) / 2.0);
        }
        if (k > 0) {
            entries.emplace_back(idx(0, k), idx(0, k - 1), 3.0 * k / 2.0);
            entries.emplace_back(idx(1, k), idx(1, k - 1), k / 2.0);
        }
    }
    return SparseGenerator(2 * static_cast<std::size_t>(n + 1), entries);
}

ProbabilityVector reduced_evolve(const SparseGenerator& gen, ProbabilityVector initial, double t) {
    if (t < 0.0) throw std::invalid_argument("reduced_evolve: negative time");
    if (initial.size() != gen.n_states()) throw std::invalid_argument("reduced_evolve: length mismatch");
    const double lambda = gen.max_exit();
    evolve_uniformized_inplace(
        initial.values, lambda, t,
        [&gen, lambda](const double* src, double* dst) { gen.apply_uniformized(src, dst, lambda); },
        400.0, kTailTol);
    return initial;
}

ProbabilityVector reduced_stationary(const SparseGenerator& gen, int n) {
    // The stationary k-count concentrates near 3n/4 on the side the center
    // currently favors, so pinning there keeps the unnormalized solve scaled.
    const std::size_t pin = reduced_star_index(n, 1, (3 * n) / 4);
    try {
        return sparse_stationary(gen, pin);
    } catch (const std::runtime_error&) {
        // Scale trouble at the pin; polish a rough solve by running the
        // fast-mixing chain for a long stretch.
        ProbabilityVector mu = ProbabilityVector::uniform(gen.n_states());
        mu = reduced_evolve(gen, std::move(mu), 60.0);
        mu.renormalize();
        if (!(gen.residual_inf(mu) <= 1e-10))
            throw std::runtime_error("reduced stationary solve failed to converge");
        return mu;
    }
}

ReducedStarChain::ReducedStarChain(int n)
    : n_(n), gen_(reduced_star_generator(n)), stationary_(reduced_stationary(gen_, n)) {}

ProbabilityVector ReducedStarChain::evolve_from(const ProbabilityVector& initial, double t) const {
    return reduced_evolve(gen_, initial, t);
}

double ReducedStarChain::tv_from_all_ones(double t) const {
    ProbabilityVector start = ProbabilityVector::delta(gen_.n_states(), reduced_star_index(n_, 1, n_));
    return tv(reduced_evolve(gen_, std::move(start), t), stationary_);
}

double tv_from_all_ones(int n, double t) { return ReducedStarChain(n).tv_from_all_ones(t); }

double t_mix_from_ones(int n, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
    ReducedStarChain chain(n);
    ProbabilityVector lo_state =
        ProbabilityVector::delta(chain.generator().n_states(), reduced_star_index(n, 1, n));
    double lo = 0.0;
    if (tv(lo_state, chain.stationary()) <= epsilon) return 0.0;
    // March forward in unit steps reusing the evolved state, then bisect the
    // bracketing interval, keeping the left endpoint state cached so each
    // probe only evolves by the current half-width.
    double hi = lo;
    ProbabilityVector probe = lo_state;
    for (;;) {
        probe = chain.evolve_from(probe, 1.0);
        hi += 1.0;
        if (tv(probe, chain.stationary()) <= epsilon) break;
        lo = hi;
        lo_state = probe;
        if (hi > 4096.0) throw std::runtime_error("t_mix_from_ones bracket runaway");
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        ProbabilityVector mid_state = chain.evolve_from(lo_state, mid - lo);
        if (tv(mid_state, chain.stationary()) <= epsilon) {
            hi = mid;
        } else {
            lo = mid;
            lo_state = std::move(mid_state);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace votermix
