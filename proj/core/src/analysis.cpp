#include "votermix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "votermix/exact.hpp"
#include "votermix/graphical.hpp"
#include "votermix/parallel.hpp"

namespace votermix {

double WilsonBoundInput::time() const { return 0.5 * std::log(static_cast<double>(n_sites)) - alpha; }

double wilson_bound_formula(double q_max, double rho, double alpha) {
    if (!(q_max >= 0.0)) throw std::invalid_argument("q_max must be nonnegative");
    if (!(rho >= 1.0)) throw std::invalid_argument("rho must be at least 1");
    const double top = 0.7 * std::exp(2.0 * alpha);
    return top / (16.0 * (1.0 + q_max) * (1.0 + q_max) * rho * rho + top);
}

double wilson_lower_bound(const WilsonBoundInput& input) {
    if (!(input.alpha >= 1.0))
        throw std::invalid_argument("wilson bound requires alpha >= 1");
    if (!(input.time() >= 1.0))
        throw std::invalid_argument("wilson bound requires t = log|S|/2 - alpha >= 1");
    return wilson_bound_formula(input.q_max, input.rho, input.alpha);
}

double phi_statistic(const ProbabilityVector& site_pi, const SpinConfiguration& eta) {
    if (site_pi.size() != static_cast<std::size_t>(eta.n_sites()))
        throw std::invalid_argument("phi_statistic: length mismatch");
    double weighted = 0.0;
    for (int x = 0; x < eta.n_sites(); ++x)
        if (eta.get(x)) weighted += site_pi[x];
    return 2.0 * weighted - 1.0;
}

int star_phi(const std::vector<int>& set_a, const std::vector<int>& set_b,
             const SpinConfiguration& eta) {
    if (set_a.size() != set_b.size())
        throw std::invalid_argument("star_phi: leaf sets must have equal size");
    int total = 0;
    for (int x : set_a) total += eta.get(x) ? 1 : 0;
    for (int x : set_b) total -= eta.get(x) ? 1 : 0;
    return total;
}

double star_lower_bound(double C) {
    const double e = std::exp(C);
    return e / (48.0 + e);
}

double star_lower_bound_time(int n, double C) {
    if (n < 3) throw std::invalid_argument("star bound requires n >= 3");
    const double t = 0.25 * (std::log(static_cast<double>(n)) - C);
    if (!(t > 0.0)) throw std::invalid_argument("star bound requires t = (log n - C)/4 > 0");
    return t;
}

namespace {

constexpr std::size_t kExactBinLimit = 4096;
constexpr std::size_t kWidthBins = 256;
constexpr int kBootstrapRounds = 200;

std::vector<std::uint32_t> bin_ids(const std::vector<double>& values,
                                   const std::vector<double>& exact_bins, double lo, double width,
                                   std::size_t n_bins) {
    std::vector<std::uint32_t> ids(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!exact_bins.empty()) {
            ids[i] = static_cast<std::uint32_t>(
                std::lower_bound(exact_bins.begin(), exact_bins.end(), values[i]) -
                exact_bins.begin());
        } else if (width <= 0.0) {
            ids[i] = 0;
        } else {
            auto bin = static_cast<std::size_t>((values[i] - lo) / width);
            ids[i] = static_cast<std::uint32_t>(std::min(bin, n_bins - 1));
        }
    }
    return ids;
}

double binned_tv(const std::vector<std::uint32_t>& ids_a, const std::vector<std::uint32_t>& ids_b,
                 std::size_t n_bins, std::vector<double>& scratch_a, std::vector<double>& scratch_b) {
    scratch_a.assign(n_bins, 0.0);
    scratch_b.assign(n_bins, 0.0);
    for (std::uint32_t id : ids_a) scratch_a[id] += 1.0;
    for (std::uint32_t id : ids_b) scratch_b[id] += 1.0;
    double l1 = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k)
        l1 += std::abs(scratch_a[k] / ids_a.size() - scratch_b[k] / ids_b.size());
    return 0.5 * l1;
}

}  // namespace

TvEstimate projected_tv_from_values(std::vector<double> values_a, std::vector<double> values_b,
                                    std::uint64_t seed) {
    std::vector<double> distinct(values_a);
    distinct.insert(distinct.end(), values_b.begin(), values_b.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> exact_bins;
    double lo = 0.0, width = 0.0;
    std::size_t n_bins;
    if (distinct.size() <= kExactBinLimit) {
        exact_bins = std::move(distinct);
        n_bins = exact_bins.size();
    } else {
        lo = distinct.front();
        width = (distinct.back() - lo) / kWidthBins;
        n_bins = kWidthBins;
    }
    const auto ids_a = bin_ids(values_a, exact_bins, lo, width, n_bins);
    const auto ids_b = bin_ids(values_b, exact_bins, lo, width, n_bins);

    std::vector<double> pa, pb;
    TvEstimate result;
    result.n_samples = values_a.size();
    result.estimate = binned_tv(ids_a, ids_b, n_bins, pa, pb);

    Rng rng = derive_stream(seed, 0, StreamKind::Bootstrap);
    std::vector<double> replicates(kBootstrapRounds);
    std::vector<std::uint32_t> res_a(ids_a.size()), res_b(ids_b.size());
    for (int round = 0; round < kBootstrapRounds; ++round) {
        for (auto& id : res_a) id = ids_a[rng.below(ids_a.size())];
        for (auto& id : res_b) id = ids_b[rng.below(ids_b.size())];
        replicates[round] = binned_tv(res_a, res_b, n_bins, pa, pb);
    }
    double mean = 0.0;
    for (double r : replicates) mean += r;
    mean /= kBootstrapRounds;
    double var = 0.0;
    for (double r : replicates) var += (r - mean) * (r - mean);
    result.stderr_ = std::sqrt(var / (kBootstrapRounds - 1));
    return result;
}

TvEstimate projected_tv_estimate(const ConfigStatistic& statistic, const ConfigSampler& law_a,
                                 const ConfigSampler& law_b, std::size_t n_samples,
                                 std::uint64_t seed, int threads) {
    if (n_samples < 1000) throw std::invalid_argument("projected_tv_estimate needs >= 1e3 samples");
    std::vector<double> values_a(n_samples), values_b(n_samples);
    parallel_chunks(n_samples, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            values_a[i] = statistic(law_a(replica_seed(seed, 2 * i)));
            values_b[i] = statistic(law_b(replica_seed(seed, 2 * i + 1)));
        }
    });
    return projected_tv_from_values(std::move(values_a), std::move(values_b), seed);
}

TvEstimate phi_projected_tv_from_ones(const RateKernel& kernel, const ProbabilityVector& site_pi,
                                      double t, std::size_t n_samples, std::uint64_t seed,
                                      int threads) {
    const SpinConfiguration ones = SpinConfiguration::all_ones(kernel.n_sites);
    return projected_tv_estimate(
        [&site_pi](const SpinConfiguration& eta) { return phi_statistic(site_pi, eta); },
        [&kernel, &ones, t](std::uint64_t s) { return forward_sample(kernel, ones, t, s); },
        [&kernel](std::uint64_t s) { return perfect_stationary_sample(kernel, s); }, n_samples, seed,
        threads);
}

KernelFamily parse_family(const std::string& name) {
    if (name == "cycle") return KernelFamily::Cycle;
    if (name == "star") return KernelFamily::Star;
    if (name == "complete") return KernelFamily::Complete;
    throw std::invalid_argument("unknown kernel family: " + name);
}

RateKernel build_family_member(KernelFamily family, int size) {
    switch (family) {
        case KernelFamily::Cycle:
            return build_cycle(size);
        case KernelFamily::Star:
            return build_star(size);
        case KernelFamily::Complete:
            return build_complete(size);
    }
    throw std::invalid_argument("unknown kernel family");
}

std::vector<ProfileRow> cutoff_profile(KernelFamily family, const std::vector<int>& sizes,
                                       const std::vector<double>& alphas, std::size_t n_samples,
                                       std::uint64_t seed, int threads) {
    std::vector<ProfileRow> rows;
    for (int size : sizes) {
        const RateKernel kernel = build_family_member(family, size);
        const ProbabilityVector site_pi = stationary_distribution(kernel).pi;
        const double half_log = 0.5 * std::log(static_cast<double>(kernel.n_sites));
        for (double alpha : alphas) {
            const double t_lower = std::max(0.0, half_log - alpha);
            const TvEstimate lower = phi_projected_tv_from_ones(
                kernel, site_pi, t_lower, n_samples, replica_seed(seed, static_cast<std::uint64_t>(size)),
                threads);
            rows.push_back({size, alpha, "lower", lower.estimate, lower.stderr_, lower.n_samples});
            const double upper = hypercube_tv_exact(kernel.n_sites, half_log + alpha);
            rows.push_back({size, alpha, "upper", upper, 0.0, 0});
        }
    }
    return rows;
}

int hypergeometric_sample(int n_a, int n_b, int k, Rng& rng) {
    if (n_a < 0 || n_b < 0 || k < 0 || k > n_a + n_b)
        throw std::invalid_argument("hypergeometric_sample: bad parameters");
    const int lo = std::max(0, k - n_b);
    const int hi = std::min(n_a, k);
    if (lo == hi) return lo;
    auto ratio = [&](int j) {
        // p(j+1)/p(j)
        return (static_cast<double>(n_a - j) * (k - j)) /
               (static_cast<double>(j + 1) * (n_b - k + j + 1));
    };
    int mode = static_cast<int>((static_cast<double>(n_a + 1) * (k + 1)) / (n_a + n_b + 2));
    mode = std::clamp(mode, lo, hi);
    // Relative weights expanded from the mode until negligible.
    std::vector<double> weight;
    std::vector<int> value;
    weight.push_back(1.0);
    value.push_back(mode);
    double w = 1.0;
    for (int j = mode; j < hi; ++j) {
        w *= ratio(j);
        if (w < 1e-18) break;
        weight.push_back(w);
        value.push_back(j + 1);
    }
    w = 1.0;
    for (int j = mode; j > lo; --j) {
        w /= ratio(j - 1);
        if (w < 1e-18) break;
        weight.push_back(w);
        value.push_back(j - 1);
    }
    double total = 0.0;
    for (double x : weight) total += x;
    double u = rng.uniform01() * total;
    for (std::size_t i = 0; i < weight.size(); ++i) {
        u -= weight[i];
        if (u <= 0.0) return value[i];
    }
    return value.back();
}

StarStationaryPhiSampler::StarStationaryPhiSampler(int n, const ProbabilityVector& reduced_stationary)
    : n_(n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("star stationary sampler needs even n >= 2");
    if (reduced_stationary.size() != 2 * static_cast<std::size_t>(n + 1))
        throw std::invalid_argument("reduced stationary law has wrong length");
    cdf_.resize(reduced_stationary.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < cdf_.size(); ++i) {
        cum += reduced_stationary[i];
        cdf_[i] = cum;
    }
    cdf_.back() = 1.0;
}

double StarStationaryPhiSampler::sample(Rng& rng) const {
    const double u = rng.uniform01();
    const auto state = static_cast<std::size_t>(
        std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    const int k = static_cast<int>(state % (n_ + 1));
    const int in_a = hypergeometric_sample(n_ / 2, n_ / 2, k, rng);
    return static_cast<double>(2 * in_a - k);
}

}  // namespace votermix
