#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "votermix/chain.hpp"
#include "votermix/prob.hpp"
#include "votermix/rng.hpp"
#include "votermix/spin.hpp"

namespace votermix {

/// Inputs of the mixing lower bound at time t = (1/2) log|S| - alpha.
struct WilsonBoundInput {
    int n_sites;
    double q_max;
    double rho;
    double alpha;

    double time() const;
};

/// 0.7 e^{2 alpha} / (16 (1 + q_max)^2 rho^2 + 0.7 e^{2 alpha}), valid for
/// alpha >= 1 and t >= 1; out-of-validity inputs are rejected.
double wilson_lower_bound(const WilsonBoundInput& input);

/// The bare formula value without the validity gate.
double wilson_bound_formula(double q_max, double rho, double alpha);

/// Phi(eta) = 2 sum_x eta(x) pi(x) - 1, in [-1, 1].
double phi_statistic(const ProbabilityVector& site_pi, const SpinConfiguration& eta);

/// Star statistic over disjoint equal-size leaf sets: sum_A eta - sum_B eta.
int star_phi(const std::vector<int>& set_a, const std::vector<int>& set_b,
             const SpinConfiguration& eta);

/// e^C / (48 + e^C), the half-leaves lower bound at t = (log n - C)/4.
double star_lower_bound(double C);
double star_lower_bound_time(int n, double C);

struct TvEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
};

using ConfigSampler = std::function<SpinConfiguration(std::uint64_t seed)>;
using ConfigStatistic = std::function<double(const SpinConfiguration&)>;

/// Empirical TV between the binned laws of statistic(sample) under two
/// samplers, with bootstrap standard error (200 resamples). Values are
/// binned exactly when they take <= 4096 distinct values, else into 256
/// equal-width bins; binning only lowers TV, so this estimates a lower
/// bound of the statistic-projected TV (itself a lower bound of the full TV).
TvEstimate projected_tv_estimate(const ConfigStatistic& statistic, const ConfigSampler& law_a,
                                 const ConfigSampler& law_b, std::size_t n_samples,
                                 std::uint64_t seed, int threads = 0);

/// Same estimator on precomputed statistic values.
TvEstimate projected_tv_from_values(std::vector<double> values_a, std::vector<double> values_b,
                                    std::uint64_t seed);

/// TV between the Phi-projected law at time t started from all-ones and the
/// Phi-projected stationary law (forward graphical runs vs perfect samples).
TvEstimate phi_projected_tv_from_ones(const RateKernel& kernel, const ProbabilityVector& site_pi,
                                      double t, std::size_t n_samples, std::uint64_t seed,
                                      int threads = 0);

enum class KernelFamily { Cycle, Star, Complete };

KernelFamily parse_family(const std::string& name);
RateKernel build_family_member(KernelFamily family, int size);

struct ProfileRow {
    int n;            // family index; |S| may differ (star has n + 1 sites)
    double alpha;
    std::string side;  // "lower" or "upper"
    double estimate;
    double stderr_;
    std::size_t n_samples;
};

/// Cutoff profile: lower-side d estimated from all-ones at time
/// (1/2) log|S| - alpha by projected-Phi Monte Carlo; upper side bounded by
/// the rerandomization-walk TV at (1/2) log|S| + alpha.
std::vector<ProfileRow> cutoff_profile(KernelFamily family, const std::vector<int>& sizes,
                                       const std::vector<double>& alphas, std::size_t n_samples,
                                       std::uint64_t seed, int threads = 0);

/// Exact stationary draws of the star statistic Phi = sum_A - sum_B: the
/// center bit and 1-count come from the reduced chain's stationary law and
/// the ones are split between the two leaf halves hypergeometrically, which
/// is the stationary lift of the projected chain.
class StarStationaryPhiSampler {
public:
    StarStationaryPhiSampler(int n, const ProbabilityVector& reduced_stationary);
    double sample(Rng& rng) const;

private:
    int n_;
    std::vector<double> cdf_;
};

/// Split k ones uniformly between boxes of sizes n_a and n_b; returns the
/// count landing in the first box.
int hypergeometric_sample(int n_a, int n_b, int k, Rng& rng);

}  // namespace votermix
