#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace votermix {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream kinds used to key independent substreams off one master seed.
/// Streams are derived as a pure function of (master, site, kind), so any
/// substream can be regenerated or extended without touching the others.
enum class StreamKind : std::uint64_t {
    VoteTimes = 1,
    VoteTargets = 2,
    ReraTimes = 3,
    ReraBits = 4,
    Gillespie = 5,
    TieBreak = 6,
    TreeSpins = 7,
    ChannelNoise = 8,
    Bootstrap = 9,
    Replica = 10,
    PerfectVoteTimes = 11,
    PerfectVoteTargets = 12,
    PerfectReraTimes = 13,
    PerfectReraBits = 14,
    Generic = 15,
};

/// xoshiro256++ with splitmix64 key expansion. Value-semantic and cheap to
/// copy; all distribution helpers are deterministic integer/double code so
/// identical seeds reproduce identical draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in the open interval (0, 1); never returns 0 so -log(u) is safe.
    double uniform01() noexcept {
        for (;;) {
            double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double exponential(double rate) noexcept { return -std::log(uniform01()) / rate; }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    bool fair_bit() noexcept { return (next() >> 63) != 0; }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        std::uint64_t threshold = (-n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/// Derive the RNG for substream (site, kind) of a master seed.
inline Rng derive_stream(std::uint64_t master, std::uint64_t site, StreamKind kind) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= (site + 0x632be59bd9b4e019ULL) * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(s);
    s ^= (static_cast<std::uint64_t>(kind) + 0x100000001b3ULL) * 0xff51afd7ed558ccdULL;
    std::uint64_t c = splitmix64(s);
    return Rng(a ^ (b * 0xc2b2ae3d27d4eb4fULL) ^ (c + 0x165667b19e3779f9ULL));
}

/// Per-replica seed for embarrassingly parallel Monte Carlo; independent of
/// how replicas are assigned to worker threads.
inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL + replica * 0xbf58476d1ce4e5b9ULL);
    std::uint64_t x = splitmix64(s);
    std::uint64_t y = splitmix64(s);
    return x ^ (y << 1);
}

/// Walker alias table for O(1) sampling from a fixed discrete distribution.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights) {
        const std::size_t n = weights.size();
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        double total = 0.0;
        for (double w : weights) total += w;
        std::vector<double> scaled(n);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            std::size_t s = small.back();
            small.pop_back();
            std::size_t l = large.back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::size_t i : large) prob_[i] = 1.0;
        for (std::size_t i : small) prob_[i] = 1.0;
    }

    std::size_t sample(Rng& rng) const noexcept {
        std::size_t column = static_cast<std::size_t>(rng.below(prob_.size()));
        return rng.uniform01() < prob_[column] ? column : alias_[column];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

}  // namespace votermix
