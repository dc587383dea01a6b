#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "votermix/analysis.hpp"
#include "votermix/exact.hpp"
#include "votermix/graphical.hpp"
#include "votermix/star.hpp"

using namespace votermix;

namespace {

const RateKernel& mixed3() {
    static RateKernel k = make_kernel(
        3, {{0, 1, 1.0}, {1, 0, 0.5}, {1, 2, 1.5}, {2, 0, 0.7}, {0, 2, 0.3}, {2, 1, 0.2}});
    return k;
}

}  // namespace

TEST_CASE("wilson bound formula and validity gate") {
    CHECK(wilson_bound_formula(0.0, 1.0, 2.0) == doctest::Approx(0.7049).epsilon(1e-3));
    CHECK(wilson_bound_formula(0.0, 1.0, 10.0) >= 0.999);
    CHECK(wilson_bound_formula(0.0, 1e9, 2.0) <= 1e-6);
    CHECK(wilson_bound_formula(1.0, 1.0, 2.0) == doctest::Approx(0.373885).epsilon(1e-4));

    // alpha >= 1 and t >= 1 are required for validity.
    CHECK_THROWS_AS(wilson_lower_bound({256, 1.0, 1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(wilson_lower_bound({256, 1.0, 1.0, 2.0}), std::invalid_argument);  // t < 1
    WilsonBoundInput valid{256, 1.0, 1.0, 1.0};
    CHECK(valid.time() == doctest::Approx(0.5 * std::log(256.0) - 1.0));
    CHECK(wilson_lower_bound(valid) == doctest::Approx(wilson_bound_formula(1.0, 1.0, 1.0)));
}

TEST_CASE("phi statistics") {
    ProbabilityVector uniform = ProbabilityVector::uniform(4);
    CHECK(phi_statistic(uniform, SpinConfiguration::all_ones(4)) == doctest::Approx(1.0));
    CHECK(phi_statistic(uniform, SpinConfiguration::all_zeros(4)) == doctest::Approx(-1.0));
    SpinConfiguration half(4);
    half.set(2, true);
    half.set(3, true);
    CHECK(phi_statistic(uniform, half) == doctest::Approx(0.0));

    std::vector<int> set_a{1, 2}, set_b{3, 4};
    SpinConfiguration eta(5);
    eta.set(1, true);
    eta.set(2, true);
    CHECK(star_phi(set_a, set_b, eta) == 2);
    CHECK_THROWS_AS(star_phi({1}, {2, 3}, eta), std::invalid_argument);
}

TEST_CASE("star lower bound values") {
    CHECK(star_lower_bound(0.0) == doctest::Approx(1.0 / 49.0).epsilon(1e-14));
    CHECK(star_lower_bound(std::log(48.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(star_lower_bound_time(6, 0.0) == doctest::Approx(std::log(6.0) / 4.0));
    CHECK_THROWS_AS(star_lower_bound_time(6, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(star_lower_bound_time(2, 0.0), std::invalid_argument);
}

TEST_CASE("projected tv: identical laws give a null estimate") {
    // Phi over a 2-site kernel takes three values, keeping the bin count low.
    ProbabilityVector site_pi = ProbabilityVector::uniform(2);
    const RateKernel kernel = make_kernel(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    auto sampler = [&](std::uint64_t s) { return perfect_stationary_sample(kernel, s); };
    TvEstimate est = projected_tv_estimate(
        [&](const SpinConfiguration& eta) { return phi_statistic(site_pi, eta); }, sampler, sampler,
        20000, 77, 1);
    CHECK(est.estimate <= 3.0 * est.stderr_);
    CHECK_THROWS_AS(projected_tv_estimate([](const SpinConfiguration&) { return 0.0; }, sampler,
                                          sampler, 100, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("projected tv with an injective statistic recovers the full TV") {
    ConfigGenerator gen(mixed3());
    const SpinConfiguration ones = SpinConfiguration::all_ones(3);
    const double t = 0.5;
    ProbabilityVector at_t = evolve(gen, ProbabilityVector::delta(8, ones.index()), t);
    const double exact = tv(at_t, stationary_of(gen));
    TvEstimate est = projected_tv_estimate(
        [](const SpinConfiguration& eta) { return static_cast<double>(eta.index()); },
        [&](std::uint64_t s) { return forward_sample(mixed3(), ones, t, s); },
        [&](std::uint64_t s) { return perfect_stationary_sample(mixed3(), s); }, 200000, 79, 0);
    CHECK(std::abs(est.estimate - exact) <= 0.01);
}

TEST_CASE("wilson consistency on a valid cycle") {
    const int n = 64;
    const double alpha = 1.0;
    const double bound = wilson_lower_bound({n, 1.0, 1.0, alpha});
    const double t = 0.5 * std::log(static_cast<double>(n)) - alpha;
    TvEstimate est = phi_projected_tv_from_ones(
        build_cycle(n), ProbabilityVector::uniform(n), t, 30000, 83, 0);
    CHECK(est.estimate >= bound - 3.0 * est.stderr_);
    // Sandwich: the estimate cannot exceed the rerandomization-walk TV.
    CHECK(est.estimate <= hypercube_tv_exact(n, t) + 3.0 * est.stderr_);
}

TEST_CASE("monte carlo phi mean decays at rate 1 on a large cycle") {
    const int n = 256;
    const RateKernel kernel = build_cycle(n);
    const ProbabilityVector uniform = ProbabilityVector::uniform(n);
    const SpinConfiguration ones = SpinConfiguration::all_ones(n);
    const std::size_t reps = 20000;
    for (double t : {0.5, 1.0, 2.0}) {
        double mean = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < reps; ++i) {
            const double phi = phi_statistic(uniform, forward_sample(kernel, ones, t, replica_seed(87, i)));
            mean += phi;
            sq += phi * phi;
        }
        mean /= reps;
        const double sd = std::sqrt((sq / reps - mean * mean) / reps);
        CHECK(std::abs(mean - std::exp(-t)) <= 3.0 * sd);
    }
}

TEST_CASE("cutoff profile rows") {
    const auto rows = cutoff_profile(KernelFamily::Cycle, {64}, {0.5, 1.5}, 20000, 91, 0);
    REQUIRE(rows.size() == 4);
    const auto& lower1 = rows[0];
    const auto& upper1 = rows[1];
    const auto& lower2 = rows[2];
    const auto& upper2 = rows[3];
    CHECK(lower1.side == "lower");
    CHECK(upper1.side == "upper");
    CHECK(upper1.estimate ==
          doctest::Approx(hypercube_tv_exact(64, 0.5 * std::log(64.0) + 0.5)).epsilon(1e-12));
    // Larger alpha pushes the lower-side time earlier, so the distance grows,
    // and pushes the upper-side time later, so the cap shrinks.
    CHECK(lower2.estimate >= lower1.estimate - 2.0 * (lower1.stderr_ + lower2.stderr_));
    CHECK(upper2.estimate <= upper1.estimate);
    // Lower-side estimate never beats the hypercube cap at its own time point.
    CHECK(lower1.estimate <=
          hypercube_tv_exact(64, 0.5 * std::log(64.0) - 0.5) + 3.0 * lower1.stderr_);

    // Far side of the window at n = 1024: the exact upper curve sits under
    // the asymptotic limit plus slack.
    CHECK(hypercube_tv_exact(1024, 0.5 * std::log(1024.0) + 4.0) <= dgm_limit(4.0) + 0.02);
}

TEST_CASE("hypergeometric sampler moments and support") {
    Rng rng(123);
    CHECK(hypergeometric_sample(3, 3, 0, rng) == 0);
    CHECK(hypergeometric_sample(3, 3, 6, rng) == 3);
    const int reps = 200000;
    double mean = 0.0;
    for (int i = 0; i < reps; ++i) {
        const int v = hypergeometric_sample(6, 6, 4, rng);
        CHECK(v >= 0);
        CHECK(v <= 4);
        mean += v;
    }
    mean /= reps;
    // E = draws * K/N = 6 * 4/12 = 2; Var = 6 * (4/12)(8/12)(6/11) = 8/11.
    const double sd = std::sqrt(8.0 / 11.0 / reps);
    CHECK(std::abs(mean - 2.0) <= 3.0 * sd);
}

TEST_CASE("star stationary phi sampler matches the exact projection") {
    const int n = 4;
    ReducedStarChain chain(n);
    StarStationaryPhiSampler sampler(n, chain.stationary());

    // Exact Phi law from the full 5-site stationary distribution.
    ConfigGenerator gen(build_star(n));
    ProbabilityVector stationary = stationary_of(gen);
    std::vector<int> set_a{1, 2}, set_b{3, 4};
    std::vector<double> exact(2 * n + 1, 0.0);
    for (std::uint32_t s = 0; s < stationary.size(); ++s)
        exact[star_phi(set_a, set_b, SpinConfiguration::from_index(n + 1, s)) + n] += stationary[s];

    Rng rng(321);
    const std::size_t reps = 200000;
    std::vector<double> empirical(2 * n + 1, 0.0);
    for (std::size_t i = 0; i < reps; ++i)
        empirical[static_cast<int>(sampler.sample(rng)) + n] += 1.0 / reps;
    double l1 = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) l1 += std::abs(exact[i] - empirical[i]);
    CHECK(0.5 * l1 <= 0.01);
}
