#include "votermix/prob.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <tuple>

namespace votermix {

double tv(const ProbabilityVector& p, const ProbabilityVector& r) {
    if (p.size() != r.size()) throw std::invalid_argument("tv: length mismatch");
    double l1 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - r[i]);
    return 0.5 * l1;
}

SparseGenerator::SparseGenerator(
    std::size_t n_states,
    const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& entries)
    : n_states_(n_states) {
    std::vector<std::size_t> counts(n_states, 0);
    for (const auto& [i, j, r] : entries) {
        if (i >= n_states || j >= n_states) throw std::invalid_argument("generator entry out of range");
        if (i == j) throw std::invalid_argument("diagonal entries are implied, not stored");
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("rates must be finite and nonnegative");
        ++counts[i];
    }
    row_ptr_.assign(n_states + 1, 0);
    for (std::size_t i = 0; i < n_states; ++i) row_ptr_[i + 1] = row_ptr_[i] + counts[i];
    col_.resize(entries.size());
    rate_.resize(entries.size());
    std::vector<std::size_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    for (const auto& [i, j, r] : entries) {
        col_[cursor[i]] = j;
        rate_[cursor[i]] = r;
        ++cursor[i];
    }
    exit_.assign(n_states, 0.0);
    for (std::size_t i = 0; i < n_states; ++i)
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) exit_[i] += rate_[k];
    max_exit_ = exit_.empty() ? 0.0 : *std::max_element(exit_.begin(), exit_.end());
}

void SparseGenerator::apply_uniformized(const double* src, double* dst, double lambda) const {
    std::fill(dst, dst + n_states_, 0.0);
    for (std::size_t i = 0; i < n_states_; ++i) {
        const double mass = src[i];
        dst[i] += mass * (1.0 - exit_[i] / lambda);
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            dst[col_[k]] += mass * rate_[k] / lambda;
    }
}

void SparseGenerator::apply_generator(const double* src, double* dst) const {
    std::fill(dst, dst + n_states_, 0.0);
    for (std::size_t i = 0; i < n_states_; ++i) {
        const double mass = src[i];
        dst[i] -= mass * exit_[i];
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            dst[col_[k]] += mass * rate_[k];
    }
}

double SparseGenerator::residual_inf(const ProbabilityVector& p) const {
    if (p.size() != n_states_) throw std::invalid_argument("residual_inf: length mismatch");
    std::vector<double> out(n_states_);
    apply_generator(p.values.data(), out.data());
    double worst = 0.0;
    for (double v : out) worst = std::max(worst, std::abs(v));
    return worst;
}

double SparseGenerator::max_row_sum_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_states_; ++i) {
        double s = -exit_[i];
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += rate_[k];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

double SparseGenerator::rate(std::size_t from, std::size_t to) const {
    if (from == to) return -exit_[from];
    double total = 0.0;
    for (std::size_t k = row_ptr_[from]; k < row_ptr_[from + 1]; ++k)
        if (col_[k] == to) total += rate_[k];
    return total;
}

ProbabilityVector sparse_stationary(const SparseGenerator& gen, std::size_t pin_state) {
    const auto n = static_cast<Eigen::Index>(gen.n_states());
    if (pin_state >= gen.n_states()) throw std::invalid_argument("pin state out of range");
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < gen.n_states(); ++i)
        if (i != pin_state)
            trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i),
                              -gen.exit_rate(i));
    gen.for_each_entry([&](std::size_t i, std::size_t j, double r) {
        if (j != pin_state)
            trip.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i), r);
    });
    trip.emplace_back(static_cast<Eigen::Index>(pin_state), static_cast<Eigen::Index>(pin_state), 1.0);
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse stationary factorization failed");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(static_cast<Eigen::Index>(pin_state)) = 1.0;
    Eigen::VectorXd x = lu.solve(b);
    ProbabilityVector pi(gen.n_states());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = x(i);
        if (!std::isfinite(v)) throw std::runtime_error("sparse stationary solve overflowed");
        pi[static_cast<std::size_t>(i)] = v < 0.0 ? 0.0 : v;
    }
    pi.renormalize();
    const double residual = gen.residual_inf(pi);
    if (!(residual <= 1e-10))
        throw std::runtime_error("sparse stationary residual " + std::to_string(residual));
    return pi;
}

}  // namespace votermix
