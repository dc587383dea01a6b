#include "votermix/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "votermix/errors.hpp"

namespace votermix {

namespace {
constexpr int kConfigCap = 20;
constexpr int kProfileCap = 12;
constexpr double kTailTol = 1e-15;
}  // namespace

ConfigGenerator::ConfigGenerator(const RateKernel& kernel) : kernel_(kernel) {
    if (kernel.n_sites > kConfigCap)
        throw CapacityError("config generator limited to " + std::to_string(kConfigCap) + " sites");
    lambda_ = kernel.n_sites * (1.0 + kernel.q_max);
}

ConfigGenerator build_config_generator(const RateKernel& kernel) { return ConfigGenerator(kernel); }

double ConfigGenerator::flip_rate(std::uint32_t state, int site) const {
    const bool own = (state >> site) & 1u;
    double rate = 0.5;
    for (const auto& [y, r] : kernel_.out[site])
        if (((state >> y) & 1u) != own) rate += r;
    return rate;
}

double ConfigGenerator::state_exit_rate(std::uint32_t state) const {
    double total = 0.0;
    for (int x = 0; x < kernel_.n_sites; ++x) total += flip_rate(state, x);
    return total;
}

void ConfigGenerator::apply_uniformized(const double* src, double* dst) const {
    const std::size_t states = n_states();
    std::fill(dst, dst + states, 0.0);
    const int n = kernel_.n_sites;
    for (std::uint32_t s = 0; s < states; ++s) {
        const double mass = src[s];
        if (mass == 0.0) {
            continue;
        }
        double exit = 0.0;
        for (int x = 0; x < n; ++x) {
            const double r = flip_rate(s, x);
            exit += r;
            dst[s ^ (1u << x)] += mass * r / lambda_;
        }
        dst[s] += mass * (1.0 - exit / lambda_);
    }
}

void ConfigGenerator::apply_generator(const double* src, double* dst) const {
    const std::size_t states = n_states();
    std::fill(dst, dst + states, 0.0);
    const int n = kernel_.n_sites;
    for (std::uint32_t s = 0; s < states; ++s) {
        const double mass = src[s];
        if (mass == 0.0) continue;
        double exit = 0.0;
        for (int x = 0; x < n; ++x) {
            const double r = flip_rate(s, x);
            exit += r;
            dst[s ^ (1u << x)] += mass * r;
        }
        dst[s] -= mass * exit;
    }
}

double ConfigGenerator::residual_inf(const ProbabilityVector& p) const {
    if (p.size() != n_states()) throw std::invalid_argument("residual_inf: length mismatch");
    std::vector<double> out(n_states());
    apply_generator(p.values.data(), out.data());
    double worst = 0.0;
    for (double v : out) worst = std::max(worst, std::abs(v));
    return worst;
}

ProbabilityVector evolve(const ConfigGenerator& gen, ProbabilityVector initial, double t) {
    if (t < 0.0) throw std::invalid_argument("evolve: negative time");
    if (initial.size() != gen.n_states()) throw std::invalid_argument("evolve: length mismatch");
    evolve_uniformized_inplace(
        initial.values, gen.lambda(), t,
        [&gen](const double* src, double* dst) { gen.apply_uniformized(src, dst); }, 400.0, kTailTol);
    return initial;
}

ProbabilityVector stationary_of(const ConfigGenerator& gen) {
    // Every dual lineage meets a rerandomization at rate >= 1, so the TV of
    // any start to mu_infinity is <= n e^{-t}; t = 55 + log n puts the
    // residual far below the 1e-10 contract.
    const double horizon = 55.0 + std::log(static_cast<double>(gen.n_sites()));
    ProbabilityVector mu = evolve(gen, ProbabilityVector::uniform(gen.n_states()), horizon);
    mu.renormalize();
    return mu;
}

namespace {

/// All 2^n one-hot rows evolved in lockstep; rows can be advanced
/// incrementally because evolve is a semigroup.
class StartBatch {
public:
    explicit StartBatch(const ConfigGenerator& gen)
        : gen_(&gen), states_(gen.n_states()), rows_(states_ * states_, 0.0) {
        for (std::size_t s = 0; s < states_; ++s) rows_[s * states_ + s] = 1.0;
    }

    void advance(double dt) {
        std::vector<double> row(states_);
        for (std::size_t s = 0; s < states_; ++s) {
            double* base = rows_.data() + s * states_;
            std::copy(base, base + states_, row.begin());
            evolve_uniformized_inplace(
                row, gen_->lambda(), dt,
                [this](const double* src, double* dst) { gen_->apply_uniformized(src, dst); }, 400.0,
                kTailTol);
            std::copy(row.begin(), row.end(), base);
        }
    }

    double d_max(const ProbabilityVector& stationary) const {
        double worst = 0.0;
        for (std::size_t s = 0; s < states_; ++s) {
            const double* base = rows_.data() + s * states_;
            double l1 = 0.0;
            for (std::size_t j = 0; j < states_; ++j) l1 += std::abs(base[j] - stationary[j]);
            worst = std::max(worst, 0.5 * l1);
        }
        return worst;
    }

    double dbar_max() const {
        double worst = 0.0;
        for (std::size_t a = 0; a < states_; ++a) {
            const double* ra = rows_.data() + a * states_;
            for (std::size_t b = a + 1; b < states_; ++b) {
                const double* rb = rows_.data() + b * states_;
                double l1 = 0.0;
                for (std::size_t j = 0; j < states_; ++j) l1 += std::abs(ra[j] - rb[j]);
                worst = std::max(worst, 0.5 * l1);
            }
        }
        return worst;
    }

private:
    const ConfigGenerator* gen_;
    std::size_t states_;
    std::vector<double> rows_;
};

}  // namespace

std::vector<DPoint> d_profile(const RateKernel& kernel, const std::vector<double>& t_grid) {
    if (kernel.n_sites > kProfileCap)
        throw CapacityError("d_profile enumerates all starts; limited to " +
                            std::to_string(kProfileCap) + " sites");
    for (double t : t_grid)
        if (t < 0.0) throw std::invalid_argument("d_profile: negative time");
    std::vector<std::size_t> order(t_grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t_grid[a] < t_grid[b]; });

    ConfigGenerator gen(kernel);
    ProbabilityVector stationary = stationary_of(gen);
    StartBatch batch(gen);
    std::vector<DPoint> result(t_grid.size());
    double current = 0.0;
    for (std::size_t idx : order) {
        batch.advance(t_grid[idx] - current);
        current = t_grid[idx];
        result[idx] = {current, batch.d_max(stationary), batch.dbar_max()};
    }
    return result;
}

double t_mix_exact(const RateKernel& kernel, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
    if (kernel.n_sites > kProfileCap)
        throw CapacityError("t_mix_exact enumerates all starts; limited to " +
                            std::to_string(kProfileCap) + " sites");
    ConfigGenerator gen(kernel);
    ProbabilityVector stationary = stationary_of(gen);

    StartBatch lo_batch(gen);
    double lo = 0.0;
    if (lo_batch.d_max(stationary) <= epsilon) return 0.0;
    double hi = 1.0;
    StartBatch probe = lo_batch;
    for (;;) {
        probe.advance(hi - lo);
        if (probe.d_max(stationary) <= epsilon) break;
        lo_batch = std::move(probe);
        lo = hi;
        hi *= 2.0;
        probe = lo_batch;
        if (hi > 1e6) throw std::runtime_error("t_mix bracket runaway");
    }
    // Bisect [lo, hi]; the batch is kept at the left endpoint so each probe
    // only evolves by the current half-width.
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        StartBatch mid_batch = lo_batch;
        mid_batch.advance(mid - lo);
        if (mid_batch.d_max(stationary) <= epsilon) {
            hi = mid;
        } else {
            lo = mid;
            lo_batch = std::move(mid_batch);
        }
    }
    return 0.5 * (lo + hi);
}

double hypercube_tv_exact(int n, double t) {
    if (n < 1) throw std::invalid_argument("hypercube needs n >= 1");
    if (t < 0.0) throw std::invalid_argument("negative time");
    if (t == 0.0) return 1.0;
    const double eps = std::exp(-t);
    const double log_p = std::log1p(eps) - std::log(2.0);
    const double log_q = std::log1p(-eps) - std::log(2.0);
    double log_binom = 0.0;  // log C(n, 0)
    double l1 = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double a = std::exp(log_binom + k * log_p + (n - k) * log_q);
        const double b = std::exp(log_binom + k * log_q + (n - k) * log_p);
        l1 += std::abs(a - b);
        if (k < n) log_binom += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1));
    }
    return 0.5 * l1;
}

namespace {

double simpson(double (*f)(double), double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

double adaptive_simpson(double (*f)(double), double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, right, 0.5 * tol, depth - 1);
}

double gauss_bell(double u) { return std::exp(-u * u); }

}  // namespace

double dgm_limit(double alpha) {
    const double upper = std::exp(-alpha) / std::sqrt(8.0);
    if (upper <= 0.0) return 0.0;
    const double integral = adaptive_simpson(gauss_bell, 0.0, upper, simpson(gauss_bell, 0.0, upper), 1e-13, 40);
    return (4.0 / std::sqrt(M_PI)) * integral;
}

}  // namespace votermix
