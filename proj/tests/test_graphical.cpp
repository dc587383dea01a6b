#include <doctest.h>

#include <cmath>
#include <functional>

#include "test_util.hpp"
#include "votermix/exact.hpp"
#include "votermix/graphical.hpp"

using namespace votermix;

namespace {

const RateKernel& mixed3() {
    static RateKernel k = make_kernel(
        3, {{0, 1, 1.0}, {1, 0, 0.5}, {1, 2, 1.5}, {2, 0, 0.7}, {0, 2, 0.3}, {2, 1, 0.2}});
    return k;
}

ProbabilityVector empirical_law(std::size_t n_states,
                                const std::function<SpinConfiguration(std::uint64_t)>& sampler,
                                std::size_t n, std::uint64_t seed) {
    ProbabilityVector law(n_states);
    for (std::size_t i = 0; i < n; ++i) law[sampler(replica_seed(seed, i)).index()] += 1.0 / n;
    return law;
}

}  // namespace

TEST_CASE("event streams: structure and determinism") {
    GraphicalEvents none = sample_events(build_empty(4), 3.0, 42);
    for (const auto& v : none.votes) CHECK(v.empty());

    GraphicalEvents zero_horizon = sample_events(build_cycle(5), 0.0, 42);
    CHECK(zero_horizon.total_vote_events() == 0);

    GraphicalEvents a = sample_events(mixed3(), 5.0, 7);
    GraphicalEvents b = sample_events(mixed3(), 5.0, 7);
    for (int x = 0; x < 3; ++x) {
        REQUIRE(a.votes[x].size() == b.votes[x].size());
        for (std::size_t i = 0; i < a.votes[x].size(); ++i) {
            CHECK(a.votes[x][i].time == b.votes[x][i].time);
            CHECK(a.votes[x][i].target == b.votes[x][i].target);
        }
        REQUIRE(a.reras[x].size() == b.reras[x].size());
        for (std::size_t i = 0; i < a.reras[x].size(); ++i) {
            CHECK(a.reras[x][i].time == b.reras[x][i].time);
            CHECK(a.reras[x][i].bit == b.reras[x][i].bit);
        }
    }

    auto refs = a.merged_order();
    for (std::size_t i = 1; i < refs.size(); ++i) CHECK(refs[i].time > refs[i - 1].time);
    for (int x = 0; x < 3; ++x) {
        for (std::size_t i = 1; i < a.votes[x].size(); ++i)
            CHECK(a.votes[x][i].time > a.votes[x][i - 1].time);
        for (const auto& ev : a.votes[x]) {
            CHECK(ev.time > 0.0);
            CHECK(ev.time < 5.0);
        }
    }
}

TEST_CASE("voting event counts match the Poisson mean") {
    const RateKernel kernel = build_cycle(100);
    const double t = 5.0;
    const std::size_t n_seeds = 10000;
    double total = 0.0;
    for (std::size_t i = 0; i < n_seeds; ++i) {
        const GraphicalEvents ev = sample_events(kernel, t, replica_seed(3, i));
        std::size_t votes = 0;
        for (const auto& v : ev.votes) votes += v.size();
        total += static_cast<double>(votes);
    }
    const double mean = total / n_seeds;
    const double sigma = std::sqrt(500.0 / n_seeds);
    CHECK(std::abs(mean - 500.0) <= 3.0 * sigma);
}

TEST_CASE("forward run applies events in order") {
    GraphicalEvents ev;
    ev.n_sites = 3;
    ev.horizon = 1.0;
    ev.votes.assign(3, {});
    ev.reras.assign(3, {});
    const SpinConfiguration eta0 = SpinConfiguration::from_index(3, 0b101);
    CHECK(forward_run(ev, eta0) == eta0);

    ev.reras[1].push_back({0.5, true});
    CHECK(forward_run(ev, eta0).index() == 0b111);

    // A vote after the rerandomization copies the fresh value.
    ev.votes[0].push_back({0.75, 1});
    CHECK(forward_run(ev, eta0).index() == 0b111);
    // A vote before it copies the original.
    ev.votes[2].push_back({0.25, 1});
    CHECK(forward_run(ev, eta0).index() == 0b011);
}

TEST_CASE("forward law matches the exact solve") {
    ConfigGenerator gen(mixed3());
    const SpinConfiguration eta0 = SpinConfiguration::from_index(3, 0b001);
    ProbabilityVector exact = evolve(gen, ProbabilityVector::delta(8, eta0.index()), 1.0);
    ProbabilityVector law = empirical_law(
        8, [&](std::uint64_t s) { return forward_sample(mixed3(), eta0, 1.0, s); }, 200000, 11);
    CHECK(tv(law, exact) <= 0.01);
}

TEST_CASE("gillespie.basics") {
    const SpinConfiguration one1 = SpinConfiguration::all_ones(1);
    CHECK(gillespie_run(build_empty(1), one1, 0.0, 9) == one1);

    std::size_t up = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i)
        if (gillespie_run(build_empty(1), one1, 1.0, replica_seed(17, i)).get(0)) ++up;
    const double p = testing::one_site_up_probability(1.0);
    CHECK(std::abs(static_cast<double>(up) / n - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("gillespie law matches the graphical law") {
    const SpinConfiguration eta0 = SpinConfiguration::from_index(3, 0b010);
    ProbabilityVector graphical_law = empirical_law(
        8, [&](std::uint64_t s) { return forward_sample(mixed3(), eta0, 1.0, s); }, 200000, 23);
    ProbabilityVector gillespie_law = empirical_law(
        8, [&](std::uint64_t s) { return gillespie_run(mixed3(), eta0, 1.0, s); }, 200000, 29);
    CHECK(tv(graphical_law, gillespie_law) <= 0.01);
}

TEST_CASE("both simulators track the exact law on every small kernel") {
    for (const auto& [name, kernel] : testing::kernel_battery_upto(4)) {
        CAPTURE(name);
        ConfigGenerator gen(kernel);
        const SpinConfiguration eta0 = SpinConfiguration::all_ones(kernel.n_sites);
        const double t = 0.8;
        ProbabilityVector exact =
            evolve(gen, ProbabilityVector::delta(gen.n_states(), eta0.index()), t);
        const std::size_t n = 50000;
        ProbabilityVector fwd = empirical_law(
            gen.n_states(), [&](std::uint64_t s) { return forward_sample(kernel, eta0, t, s); }, n,
            1000);
        ProbabilityVector gil = empirical_law(
            gen.n_states(), [&](std::uint64_t s) { return gillespie_run(kernel, eta0, t, s); }, n,
            1001);
        CHECK(tv(fwd, exact) <= 0.02);
        CHECK(tv(gil, exact) <= 0.02);
    }
}

TEST_CASE("perfect sampling: independent fair bits when q is zero") {
    ProbabilityVector law = empirical_law(
        16, [](std::uint64_t s) { return perfect_stationary_sample(build_empty(4), s); }, 100000, 31);
    for (std::size_t s = 0; s < 16; ++s) CHECK(std::abs(law[s] - 1.0 / 16) <= 0.005);

    std::size_t up = 0;
    for (std::size_t i = 0; i < 100000; ++i)
        if (perfect_stationary_sample(build_empty(1), replica_seed(37, i)).get(0)) ++up;
    CHECK(std::abs(up / 100000.0 - 0.5) <= 3.0 * std::sqrt(0.25 / 100000.0));
}

TEST_CASE("perfect sampling matches the exact stationary law") {
    ConfigGenerator gen(mixed3());
    ProbabilityVector exact = stationary_of(gen);
    ProbabilityVector law = empirical_law(
        8, [](std::uint64_t s) { return perfect_stationary_sample(mixed3(), s); }, 200000, 41);
    CHECK(tv(law, exact) <= 0.01);
}

TEST_CASE("rerandomization prevents absorption at all-ones") {
    const SpinConfiguration ones = SpinConfiguration::all_ones(3);
    std::size_t stayed = 0;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i)
        if (forward_sample(build_cycle(3), ones, 1.0, replica_seed(43, i)) == ones) ++stayed;
    CHECK(stayed < n);
}
