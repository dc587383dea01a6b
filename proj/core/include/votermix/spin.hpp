#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace votermix {

/// An element of {0,1}^S, bit-packed. Site i occupies bit i of the packed
/// words, so for n <= 20 sites the state index is sum eta(i) * 2^i; this
/// packing order is fixed so serialized distributions stay portable.
class SpinConfiguration {
public:
    SpinConfiguration() = default;

    explicit SpinConfiguration(int n_sites, bool fill = false)
        : n_(n_sites), words_((n_sites + 63) / 64, fill ? ~0ULL : 0ULL) {
        if (n_sites < 0) throw std::invalid_argument("negative site count");
        trim();
    }

    static SpinConfiguration all_zeros(int n_sites) { return SpinConfiguration(n_sites, false); }
    static SpinConfiguration all_ones(int n_sites) { return SpinConfiguration(n_sites, true); }

    static SpinConfiguration from_index(int n_sites, std::uint32_t index) {
        if (n_sites > 20) throw std::invalid_argument("state index packing only for n <= 20");
        SpinConfiguration cfg(n_sites);
        if (n_sites > 0) cfg.words_[0] = index & ((1ULL << n_sites) - 1);
        return cfg;
    }

    int n_sites() const noexcept { return n_; }

    bool get(int site) const noexcept {
        return (words_[static_cast<std::size_t>(site) >> 6] >> (site & 63)) & 1ULL;
    }

    void set(int site, bool value) noexcept {
        const std::uint64_t mask = 1ULL << (site & 63);
        if (value)
            words_[static_cast<std::size_t>(site) >> 6] |= mask;
        else
            words_[static_cast<std::size_t>(site) >> 6] &= ~mask;
    }

    void flip(int site) noexcept { words_[static_cast<std::size_t>(site) >> 6] ^= 1ULL << (site & 63); }

    int count_ones() const noexcept {
        int total = 0;
        for (std::uint64_t w : words_) total += std::popcount(w);
        return total;
    }

    std::uint32_t index() const {
        if (n_ > 20) throw std::invalid_argument("state index packing only for n <= 20");
        return n_ == 0 ? 0u : static_cast<std::uint32_t>(words_[0]);
    }

    bool operator==(const SpinConfiguration& other) const noexcept {
        return n_ == other.n_ && words_ == other.words_;
    }
    bool operator!=(const SpinConfiguration& other) const noexcept { return !(*this == other); }

private:
    void trim() noexcept {
        if (n_ % 64 != 0 && !words_.empty()) words_.back() &= (1ULL << (n_ % 64)) - 1;
    }
    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace votermix
