#include "votermix/ising.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "votermix/chain.hpp"
#include "votermix/errors.hpp"
#include "votermix/exact.hpp"

namespace votermix {

namespace {
constexpr int kIsingCap = 14;
constexpr int kEquivalenceCap = 12;

int spin(std::uint32_t state, int site) { return ((state >> site) & 1u) ? 1 : -1; }

double ising_flip_rate(std::uint32_t state, int site, int n, double beta) {
    const int left = spin(state, (site + n - 1) % n);
    const int right = spin(state, (site + 1) % n);
    return 1.0 / (1.0 + std::exp(2.0 * beta * spin(state, site) * (left + right)));
}
}  // namespace

IsingCycleParams make_ising_params(int n, double beta) {
    if (n < 3) throw std::invalid_argument("ising cycle needs n >= 3");
    if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
    IsingCycleParams p;
    p.n = n;
    p.beta = beta;
    p.voter_rate = (std::exp(4.0 * beta) - 1.0) / 4.0;
    p.theta_scale = 2.0 / (1.0 + std::exp(4.0 * beta));
    return p;
}

SparseGenerator ising_generator(int n, double beta) {
    make_ising_params(n, beta);
    if (n > kIsingCap) throw CapacityError("ising generator limited to 14 spins");
    const std::uint32_t states = 1u << n;
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
    entries.reserve(static_cast<std::size_t>(states) * n);
    for (std::uint32_t s = 0; s < states; ++s)
        for (int x = 0; x < n; ++x)
            entries.emplace_back(s, s ^ (1u << x), ising_flip_rate(s, x, n, beta));
    return SparseGenerator(states, entries);
}

double verify_equivalence(int n, double beta) {
    if (n > kEquivalenceCap) throw CapacityError("equivalence check limited to 12 spins");
    const IsingCycleParams p = make_ising_params(n, beta);
    const RateKernel kernel = multiply_rates(build_cycle(n), 2.0 * p.voter_rate);
    const ConfigGenerator voter(kernel);
    double worst = 0.0;
    const std::uint32_t states = 1u << n;
    for (std::uint32_t s = 0; s < states; ++s) {
        double voter_exit = 0.0;
        double ising_exit = 0.0;
        for (int x = 0; x < n; ++x) {
            const double v = voter.flip_rate(s, x);
            const double i = ising_flip_rate(s, x, n, beta);
            voter_exit += v;
            ising_exit += i;
            worst = std::max(worst, std::abs(p.theta_scale * v - i));
        }
        worst = std::max(worst, std::abs(p.theta_scale * voter_exit - ising_exit));
    }
    return worst;
}

double ising_detailed_balance_error(int n, double beta) {
    if (n > 10) throw CapacityError("detailed balance check limited to 10 spins");
    make_ising_params(n, beta);
    const std::uint32_t states = 1u << n;
    auto energy_sum = [n](std::uint32_t s) {
        int total = 0;
        for (int x = 0; x < n; ++x) total += spin(s, x) * spin(s, (x + 1) % n);
        return total;
    };
    double worst = 0.0;
    for (std::uint32_t s = 0; s < states; ++s) {
        const double ws = std::exp(beta * energy_sum(s));
        for (int x = 0; x < n; ++x) {
            const std::uint32_t sx = s ^ (1u << x);
            const double flow = ws * ising_flip_rate(s, x, n, beta);
            const double back = std::exp(beta * energy_sum(sx)) * ising_flip_rate(sx, x, n, beta);
            worst = std::max(worst, std::abs(flow - back) / std::max({flow, back, 1e-300}));
        }
    }
    return worst;
}

}  // namespace votermix
