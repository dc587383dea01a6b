#pragma once

#include <cstdint>

#include "votermix/prob.hpp"

namespace votermix {

/// State index of the reduced star chain: center bit c and the count k of
/// leaves in state 1, enumerated as c*(n+1) + k.
inline std::size_t reduced_star_index(int n, int center, int k) {
    return static_cast<std::size_t>(center) * (n + 1) + static_cast<std::size_t>(k);
}

/// Generator of the projected star chain on {0,1} x {0..n}:
///   (0,k) -> (1,k)   at 1/2 + k/n        (1,k) -> (0,k)   at 1/2 + (n-k)/n
///   (0,k) -> (0,k+1) at (n-k)/2          (1,k) -> (1,k+1) at 3(n-k)/2
///   (0,k) -> (0,k-1) at 3k/2             (1,k) -> (1,k-1) at k/2
/// n is expected even (odd n is allowed for exploration, with a warning).
SparseGenerator reduced_star_generator(int n);

ProbabilityVector reduced_evolve(const SparseGenerator& gen, ProbabilityVector initial, double t);

/// Stationary law of the reduced chain; sparse LU pinned near the mode, with
/// a long-evolve polish fallback. n is the leaf count of the chain.
ProbabilityVector reduced_stationary(const SparseGenerator& gen, int n);

/// Caches the generator and stationary law for repeated time queries.
class ReducedStarChain {
public:
    explicit ReducedStarChain(int n);

    int n() const noexcept { return n_; }
    const SparseGenerator& generator() const noexcept { return gen_; }
    const ProbabilityVector& stationary() const noexcept { return stationary_; }

    ProbabilityVector evolve_from(const ProbabilityVector& initial, double t) const;

    /// TV between the law at time t started from (1, n) and stationarity.
    /// By the projection/lift coupling this equals the full-system TV from
    /// the all-ones configuration.
    double tv_from_all_ones(double t) const;

private:
    int n_;
    SparseGenerator gen_;
    ProbabilityVector stationary_;
};

double tv_from_all_ones(int n, double t);

/// First t with tv_from_all_ones(n, t) <= epsilon, to time tolerance 1e-3.
double t_mix_from_ones(int n, double epsilon);

}  // namespace votermix
