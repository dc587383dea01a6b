#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace votermix {

/// Probability distribution over an enumerated finite state space.
struct ProbabilityVector {
    std::vector<double> values;

    ProbabilityVector() = default;
    explicit ProbabilityVector(std::size_t n, double fill = 0.0) : values(n, fill) {}

    static ProbabilityVector delta(std::size_t n_states, std::size_t index) {
        ProbabilityVector p(n_states);
        p.values.at(index) = 1.0;
        return p;
    }

    static ProbabilityVector uniform(std::size_t n_states) {
        return ProbabilityVector(n_states, 1.0 / static_cast<double>(n_states));
    }

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t i) noexcept { return values[i]; }
    const double& operator[](std::size_t i) const noexcept { return values[i]; }

    double sum() const noexcept {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }

    void renormalize() {
        double s = sum();
        if (!(s > 0.0)) throw std::runtime_error("cannot renormalize zero-mass vector");
        for (double& v : values) v /= s;
    }

    /// Enforces the invariants: entries >= 0 (tiny negative roundoff tolerated
    /// and clamped), total mass 1 within tol.
    void validate(double tol = 1e-12) {
        for (double& v : values) {
            if (v < 0.0) {
                if (v < -tol) throw std::runtime_error("negative probability entry");
                v = 0.0;
            }
        }
        if (std::abs(sum() - 1.0) > tol) throw std::runtime_error("probability mass not 1");
    }
};

/// Total variation distance: half the L1 distance.
double tv(const ProbabilityVector& p, const ProbabilityVector& r);

/// Sparse conservative rate matrix in CSR form (off-diagonal entries only;
/// the diagonal is implied by the stored exit rates).
class SparseGenerator {
public:
    SparseGenerator() = default;
    SparseGenerator(std::size_t n_states,
                    const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& entries);

    std::size_t n_states() const noexcept { return n_states_; }
    double exit_rate(std::size_t state) const noexcept { return exit_[state]; }
    double max_exit() const noexcept { return max_exit_; }

    /// dst = src * (I + G/lambda), the uniformized transition kernel.
    void apply_uniformized(const double* src, double* dst, double lambda) const;

    /// dst = src * G.
    void apply_generator(const double* src, double* dst) const;

    /// max_j |(p G)(j)|, the stationarity residual of p.
    double residual_inf(const ProbabilityVector& p) const;

    /// max_i |sum_j G(i,j)|; zero up to roundoff by construction.
    double max_row_sum_error() const;

    /// Entry lookup (linear scan of the row); for tests and comparisons.
    double rate(std::size_t from, std::size_t to) const;

    template <class Fn>
    void for_each_entry(Fn&& fn) const {
        for (std::size_t i = 0; i < n_states_; ++i)
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) fn(i, col_[k], rate_[k]);
    }

private:
    std::size_t n_states_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> col_;
    std::vector<double> rate_;
    std::vector<double> exit_;
    double max_exit_ = 0.0;
};

/// Stationary distribution of an irreducible sparse generator by sparse LU
/// on the transposed balance equations with one state pinned to fix the
/// scale (the pin should sit near the stationary mode so the unnormalized
/// solution stays within floating-point range). Residual verified to 1e-10.
ProbabilityVector sparse_stationary(const SparseGenerator& gen, std::size_t pin_state);

/// Evolve a distribution by exp(tG) via uniformization. ApplyP must compute
/// dst = src P for the uniformized kernel P = I + G/lambda. Long horizons are
/// split into steps with Poisson mean <= step_mean so the leading weight
/// exp(-mean) never underflows; the Poisson tail is truncated once the
/// remaining mass drops below tail_tol and each step is renormalized.
template <class ApplyP>
void evolve_uniformized_inplace(std::vector<double>& v, double lambda, double t,
                                ApplyP&& apply_p, double step_mean = 400.0,
                                double tail_tol = 1e-15) {
    if (t < 0.0) throw std::invalid_argument("negative time");
    if (lambda * t <= 0.0) return;
    const int n_steps = static_cast<int>(std::ceil(lambda * t / step_mean));
    const double tau = t / n_steps;
    const double mean = lambda * tau;
    // Summed Poisson weights plateau just below 1 in floating point, so the
    // mass test is backed by a hard cap far beyond the upper tail.
    const int max_terms = static_cast<int>(mean + 60.0 * std::sqrt(mean + 1.0) + 100.0);
    std::vector<double> acc(v.size()), next(v.size());
    for (int step = 0; step < n_steps; ++step) {
        double w = std::exp(-mean);
        double cum = w;
        for (std::size_t i = 0; i < v.size(); ++i) acc[i] = w * v[i];
        for (int k = 1; cum < 1.0 - tail_tol && k <= max_terms; ++k) {
            apply_p(v.data(), next.data());
            v.swap(next);
            w *= mean / k;
            cum += w;
            for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
        }
        double mass = 0.0;
        for (double a : acc) mass += a;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = acc[i] / mass;
    }
}

}  // namespace votermix
