// Acceptance suite: one scenario per numbered criterion, each printing a
// single [PASS]/[FAIL] line with the measured quantity. Exit code 0 iff all
// requested criteria pass. Usage: acceptance [criterion-number].

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "votermix/analysis.hpp"
#include "votermix/chain.hpp"
#include "votermix/channels.hpp"
#include "votermix/dual.hpp"
#include "votermix/exact.hpp"
#include "votermix/graphical.hpp"
#include "votermix/ising.hpp"
#include "votermix/parallel.hpp"
#include "votermix/star.hpp"

using namespace votermix;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

const RateKernel& mixed3() {
    static RateKernel k = make_kernel(
        3, {{0, 1, 1.0}, {1, 0, 0.5}, {1, 2, 1.5}, {2, 0, 0.7}, {0, 2, 0.3}, {2, 1, 0.2}});
    return k;
}

// 1. Exact eigenfunction decay E[Phi(eta_t)] = e^{-t} Phi(eta) on three
//    5-site kernels, all initial states, t in {0.1, 0.5, 1, 2}.
Outcome criterion_1() {
    double worst = 0.0;
    for (const RateKernel& kernel :
         {build_cycle(5), build_star(4), testing::random_kernel(5, 424242)}) {
        const ProbabilityVector site_pi = stationary_distribution(kernel).pi;
        ConfigGenerator gen(kernel);
        auto phi_of = [&](std::uint32_t state) {
            double weighted = 0.0;
            for (int x = 0; x < kernel.n_sites; ++x)
                if ((state >> x) & 1u) weighted += site_pi[x];
            return 2.0 * weighted - 1.0;
        };
        for (std::uint32_t eta = 0; eta < gen.n_states(); ++eta) {
            for (double t : {0.1, 0.5, 1.0, 2.0}) {
                ProbabilityVector mu = evolve(gen, ProbabilityVector::delta(gen.n_states(), eta), t);
                double expect = 0.0;
                for (std::uint32_t s = 0; s < mu.size(); ++s) expect += mu[s] * phi_of(s);
                worst = std::max(worst, std::abs(expect - std::exp(-t) * phi_of(eta)));
            }
        }
    }
    return {worst <= 1e-8, "max |E[Phi] - e^{-t} Phi| = " + fmt(worst) + " (tol 1e-8)"};
}

// 2. Forward, Gillespie and dual sampling laws all sit within TV 0.01 of the
//    exact law at t = 1 on a mixed-rate 3-site kernel, N = 2e5 each.
Outcome criterion_2() {
    const double t = 1.0;
    const std::size_t n = 200000;
    const SpinConfiguration eta0 = SpinConfiguration::all_ones(3);
    ConfigGenerator gen(mixed3());
    const ProbabilityVector exact = evolve(gen, ProbabilityVector::delta(8, eta0.index()), t);

    ProbabilityVector fwd(8), gil(8), dua(8);
    for (std::size_t i = 0; i < n; ++i) {
        fwd[forward_sample(mixed3(), eta0, t, replica_seed(101, i)).index()] += 1.0 / n;
        gil[gillespie_run(mixed3(), eta0, t, replica_seed(103, i)).index()] += 1.0 / n;
        DualTrace trace = sample_dual(mixed3(), t, replica_seed(107, i));
        dua[dual_sample_config(trace, eta0).index()] += 1.0 / n;
    }
    const double tv_fwd = tv(fwd, exact), tv_gil = tv(gil, exact), tv_dua = tv(dua, exact);
    const double worst = std::max({tv_fwd, tv_gil, tv_dua});
    return {worst <= 0.01, "TV to exact: forward " + fmt(tv_fwd) + ", gillespie " + fmt(tv_gil) +
                               ", dual " + fmt(tv_dua) + " (tol 0.01)"};
}

// 3. Pairwise TV dominated by the rerandomization walk on every battery
//    kernel with up to 4 sites, all start pairs, six time points.
Outcome criterion_3() {
    double worst_excess = -1.0;
    for (const auto& [name, kernel] : testing::kernel_battery_upto(4)) {
        ConfigGenerator gen(kernel);
        const std::size_t states = gen.n_states();
        for (double t : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
            std::vector<ProbabilityVector> laws;
            laws.reserve(states);
            for (std::uint32_t s = 0; s < states; ++s)
                laws.push_back(evolve(gen, ProbabilityVector::delta(states, s), t));
            const double cap = hypercube_tv_exact(kernel.n_sites, t);
            for (std::uint32_t a = 0; a < states; ++a)
                for (std::uint32_t b = a + 1; b < states; ++b)
                    worst_excess = std::max(worst_excess, tv(laws[a], laws[b]) - cap);
        }
    }
    return {worst_excess <= 1e-10,
            "max (pair TV - hypercube TV) = " + fmt(worst_excess) + " (tol 1e-10)"};
}

// 4. Wilson bound scenario on the 256-cycle at alpha = 2: formula value and
//    a projected-Phi Monte Carlo TV that must stay above 0.33.
Outcome criterion_4() {
    const int n = 256;
    const double formula = wilson_bound_formula(1.0, 1.0, 2.0);
    if (std::abs(formula - 0.374) > 5e-4)
        return {false, "formula value " + fmt(formula) + " != 0.374"};
    const double t = 0.5 * std::log(static_cast<double>(n)) - 2.0;
    TvEstimate est =
        phi_projected_tv_from_ones(build_cycle(n), ProbabilityVector::uniform(n), t, 100000, 2024, 0);
    return {est.estimate >= 0.33, "formula " + fmt(formula) + "; MC estimate " + fmt(est.estimate) +
                                      " +- " + fmt(est.stderr_) + " (need >= 0.33)"};
}

// 5. Upper window against the DGM limit at n = 1e4 for alpha in {0,1,2,4}.
Outcome criterion_5() {
    const int n = 10000;
    const double half_log = 0.5 * std::log(static_cast<double>(n));
    bool pass = true;
    std::string detail;
    for (double alpha : {0.0, 1.0, 2.0, 4.0}) {
        const double exact = hypercube_tv_exact(n, half_log + alpha);
        const double limit = dgm_limit(alpha);
        const double gap = std::abs(exact - limit);
        if (gap > 0.02) pass = false;
        detail += "alpha=" + fmt(alpha) + ": |" + fmt(exact) + " - " + fmt(limit) + "| = " +
                  fmt(gap) + (gap > 0.02 ? " > 0.02; " : "; ");
    }
    return {pass, detail + "(tol 0.02 each)"};
}

// 6. Channel exactness over the theta grid {0.1..0.5}^3.
Outcome criterion_6() {
    double worst = 0.0;
    bool alpha_ok = true;
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j)
            for (int k = 1; k <= 5; ++k) {
                const UpsilonCheck check = upsilon_channel_check(0.1 * i, 0.1 * j, 0.1 * k);
                worst = std::max(worst, check.max_error);
                alpha_ok = alpha_ok && check.alpha >= 0.0 && check.alpha <= 1.0;
            }
    return {worst <= 1e-12 && alpha_ok,
            "max conditional-law error = " + fmt(worst) + " (tol 1e-12), alpha in [0,1]: " +
                (alpha_ok ? "yes" : "no")};
}

// 7. The star anomaly: fast mixing from all-ones at scale, the lift equality,
//    the half-leaves lower bound, and its Monte Carlo counterpart at n = 1e4.
Outcome criterion_7() {
    std::string detail;

    // (a) tv from all-ones at t = 10 stays below 1/4 for n up to 1e4.
    double worst_a = 0.0;
    for (int n : {100, 1000, 10000})
        worst_a = std::max(worst_a, ReducedStarChain(n).tv_from_all_ones(10.0));
    detail += "(a) max tv(10) = " + fmt(worst_a) + "; ";
    if (worst_a > 0.25) return {false, detail + "exceeds 1/4"};

    // (b) lift equality against the full system for n <= 8.
    double worst_b = 0.0;
    for (int n : {2, 4, 6, 8}) {
        ReducedStarChain chain(n);
        ConfigGenerator full(build_star(n));
        const ProbabilityVector full_stationary = stationary_of(full);
        const std::uint32_t ones = (1u << (n + 1)) - 1u;
        for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            ProbabilityVector mu = evolve(full, ProbabilityVector::delta(full.n_states(), ones), t);
            worst_b = std::max(worst_b, std::abs(tv(mu, full_stationary) - chain.tv_from_all_ones(t)));
        }
    }
    detail += "(b) lift gap = " + fmt(worst_b) + "; ";
    if (worst_b > 1e-9) return {false, detail + "exceeds 1e-9"};

    // (c) half-leaves bound on the exact 6-leaf system.
    const int n_small = 6;
    ConfigGenerator gen(build_star(n_small));
    const ProbabilityVector stationary = stationary_of(gen);
    SpinConfiguration half(n_small + 1);
    for (int leaf = 1; leaf <= n_small / 2; ++leaf) half.set(leaf, true);
    double worst_c = 1.0;
    for (double C : {0.0, 0.5, 1.0, 1.5}) {
        const double t = star_lower_bound_time(n_small, C);
        ProbabilityVector mu = evolve(gen, ProbabilityVector::delta(gen.n_states(), half.index()), t);
        worst_c = std::min(worst_c, tv(mu, stationary) - star_lower_bound(C));
    }
    detail += "(c) min (TV - bound) = " + fmt(worst_c) + "; ";
    if (worst_c < -1e-9) return {false, detail + "bound violated"};

    // (d) projected-Phi Monte Carlo at n = 1e4, C = 4: time-t law from a
    //     half-leaves state vs exact stationary draws through the lift.
    const int n_big = 10000;
    const double formula = star_lower_bound(4.0);
    const double t_big = star_lower_bound_time(n_big, 4.0);
    const RateKernel star = build_star(n_big);
    std::vector<int> set_a, set_b;
    for (int leaf = 1; leaf <= n_big; ++leaf) (leaf <= n_big / 2 ? set_a : set_b).push_back(leaf);
    SpinConfiguration eta0(n_big + 1);
    for (int leaf : set_a) eta0.set(leaf, true);

    const std::size_t n_samples = 100000;
    std::vector<double> values_a(n_samples), values_b(n_samples);
    parallel_chunks(n_samples, 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const SpinConfiguration eta = gillespie_run(star, eta0, t_big, replica_seed(2025, i));
            values_a[i] = static_cast<double>(star_phi(set_a, set_b, eta));
        }
    });
    ReducedStarChain chain(n_big);
    StarStationaryPhiSampler stat_sampler(n_big, chain.stationary());
    parallel_chunks(n_samples, 0, [&](std::size_t begin, std::size_t end) {
        Rng rng = derive_stream(2026, begin, StreamKind::Generic);
        for (std::size_t i = begin; i < end; ++i) values_b[i] = stat_sampler.sample(rng);
    });
    TvEstimate est = projected_tv_from_values(std::move(values_a), std::move(values_b), 2027);
    detail += "(d) formula " + fmt(formula) + ", MC estimate " + fmt(est.estimate) + " +- " +
              fmt(est.stderr_) + " (need >= 0.48)";
    return {est.estimate >= 0.48, detail};
}

// 8. Ising equivalence grid: theta-scaled voter generator vs heat-bath rates.
Outcome criterion_8() {
    double worst = 0.0;
    for (int n = 3; n <= 10; ++n)
        for (double beta : {0.0, 0.25, 0.5, 1.0, 2.0})
            worst = std::max(worst, verify_equivalence(n, beta));
    return {worst <= 1e-12, "max entrywise |theta G_voter - G_ising| = " + fmt(worst) +
                                " (tol 1e-12)"};
}

// 9. Byte-identical CSV when stochastic runs repeat with the same seed.
Outcome criterion_9() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "votermix_acceptance";
    fs::create_directories(dir);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::vector<std::string> runs = {
        "simulate --cycle 6 --t 1 --samples 20000 --seed 7 --threads 2 --out ",
        "cutoff-profile --family cycle --sizes 64 --alphas 1,2 --samples 5000 --seed 3 --out ",
        "dual-check --star 3 --t 1 --samples 5000 --seed 5 --out ",
    };
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const fs::path a = dir / ("rep_a" + std::to_string(i) + ".csv");
        const fs::path b = dir / ("rep_b" + std::to_string(i) + ".csv");
        for (const fs::path& target : {a, b}) {
            const std::string cmd = std::string(VOTERMIX_CLI_PATH) + " " + runs[i] +
                                    target.string() + " > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0)
                return {false, "run failed: " + runs[i]};
        }
        if (slurp(a) != slurp(b) || slurp(a).empty())
            return {false, "outputs differ for: " + runs[i]};
    }
    return {true, std::to_string(runs.size()) + " stochastic runs repeated byte-identically"};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "eigenfunction decay", criterion_1},
    {2, "duality and simulator agreement", criterion_2},
    {3, "hypercube comparison", criterion_3},
    {4, "wilson bound realized", criterion_4},
    {5, "upper window matches the hypercube limit", criterion_5},
    {6, "channel exactness", criterion_6},
    {7, "star anomaly", criterion_7},
    {8, "ising equivalence", criterion_8},
    {9, "reproducibility", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    bool all_pass = true;
    for (const auto& criterion : kCriteria) {
        if (only != 0 && criterion.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome{false, "exception"};
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id << ": "
                  << criterion.name << " — " << outcome.detail << " [" << fmt(seconds) << " s]\n";
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
