#include "votermix/chain.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "votermix/errors.hpp"

namespace votermix {

double RateKernel::rate(int x, int y) const {
    const auto& row = out[x];
    auto it = std::lower_bound(row.begin(), row.end(), y,
                               [](const auto& e, int target) { return e.first < target; });
    return (it != row.end() && it->first == y) ? it->second : 0.0;
}

RateKernel make_kernel(int n_sites, const std::vector<RateEdge>& edges) {
    if (n_sites < 1) throw std::invalid_argument("kernel needs at least one site");
    RateKernel k;
    k.n_sites = n_sites;
    k.out.assign(n_sites, {});
    for (const auto& e : edges) {
        if (e.from < 0 || e.from >= n_sites || e.to < 0 || e.to >= n_sites)
            throw std::invalid_argument("rate entry references a site out of range");
        if (e.from == e.to) throw std::invalid_argument("self-rates are not allowed");
        if (!std::isfinite(e.rate) || e.rate < 0.0)
            throw std::invalid_argument("rates must be finite and nonnegative");
        k.out[e.from].emplace_back(e.to, e.rate);
    }
    k.exit_rate.assign(n_sites, 0.0);
    for (int x = 0; x < n_sites; ++x) {
        auto& row = k.out[x];
        std::sort(row.begin(), row.end());
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i].first == row[i - 1].first)
                throw std::invalid_argument("duplicate rate entry for a site pair");
        for (const auto& [y, r] : row) k.exit_rate[x] += r;
    }
    k.q_max = k.exit_rate.empty() ? 0.0 : *std::max_element(k.exit_rate.begin(), k.exit_rate.end());
    return k;
}

RateKernel build_cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
    std::vector<RateEdge> edges;
    edges.reserve(2 * n);
    for (int x = 0; x < n; ++x) {
        edges.push_back({x, (x + 1) % n, 0.5});
        edges.push_back({x, (x + n - 1) % n, 0.5});
    }
    return make_kernel(n, edges);
}

RateKernel build_star(int n) {
    if (n < 2) throw std::invalid_argument("star needs n >= 2 leaves");
    std::vector<RateEdge> edges;
    edges.reserve(2 * n);
    for (int leaf = 1; leaf <= n; ++leaf) {
        edges.push_back({0, leaf, 1.0 / n});
        edges.push_back({leaf, 0, 1.0});
    }
    return make_kernel(n + 1, edges);
}

RateKernel build_complete(int n) {
    if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
    std::vector<RateEdge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y) edges.push_back({x, y, 1.0 / (n - 1)});
    return make_kernel(n, edges);
}

RateKernel build_empty(int n) { return make_kernel(n, {}); }

RateKernel multiply_rates(const RateKernel& kernel, double factor) {
    if (!std::isfinite(factor) || factor < 0.0)
        throw std::invalid_argument("rate factor must be finite and nonnegative");
    std::vector<RateEdge> edges;
    for (int x = 0; x < kernel.n_sites; ++x)
        for (const auto& [y, r] : kernel.out[x]) edges.push_back({x, y, r * factor});
    return make_kernel(kernel.n_sites, edges);
}

RateKernel permute_sites(const RateKernel& kernel, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != kernel.n_sites)
        throw std::invalid_argument("permutation size mismatch");
    std::vector<bool> seen(kernel.n_sites, false);
    for (int p : perm) {
        if (p < 0 || p >= kernel.n_sites || seen[p]) throw std::invalid_argument("not a permutation");
        seen[p] = true;
    }
    std::vector<RateEdge> edges;
    for (int x = 0; x < kernel.n_sites; ++x)
        for (const auto& [y, r] : kernel.out[x]) edges.push_back({perm[x], perm[y], r});
    return make_kernel(kernel.n_sites, edges);
}

RateKernel parse_chain_spec(std::istream& in) {
    int n_sites = -1;
    std::vector<RateEdge> edges;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream line(raw);
        std::string directive;
        if (!(line >> directive)) continue;
        if (directive == "sites") {
            if (n_sites >= 0) throw ParseError(line_no, "duplicate sites directive");
            if (!(line >> n_sites) || n_sites < 1) throw ParseError(line_no, "sites needs a positive count");
        } else if (directive == "rate") {
            if (n_sites < 0) throw ParseError(line_no, "rate before sites directive");
            int x, y;
            double value;
            if (!(line >> x >> y >> value)) throw ParseError(line_no, "rate needs <from> <to> <value>");
            if (x < 0 || x >= n_sites || y < 0 || y >= n_sites)
                throw ParseError(line_no, "site index out of range");
            if (x == y) throw ParseError(line_no, "self-rate not allowed");
            if (!std::isfinite(value) || value < 0.0) throw ParseError(line_no, "negative or non-finite rate");
            for (const auto& e : edges)
                if (e.from == x && e.to == y) throw ParseError(line_no, "duplicate rate entry");
            edges.push_back({x, y, value});
        } else {
            throw ParseError(line_no, "unknown directive '" + directive + "'");
        }
        std::string extra;
        if (line >> extra) throw ParseError(line_no, "trailing tokens on line");
    }
    if (n_sites < 0) throw ParseError(line_no, "missing sites directive");
    return make_kernel(n_sites, edges);
}

RateKernel build_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open chain spec: " + path);
    return parse_chain_spec(in);
}

namespace {

void reach(const std::vector<std::vector<int>>& adj, int start, std::vector<bool>& seen) {
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : adj[x])
            if (!seen[y]) {
                seen[y] = true;
                stack.push_back(y);
            }
    }
}

}  // namespace

bool is_irreducible(const RateKernel& kernel) {
    const int n = kernel.n_sites;
    if (n == 1) return true;
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (int x = 0; x < n; ++x)
        for (const auto& [y, r] : kernel.out[x])
            if (r > 0.0) {
                fwd[x].push_back(y);
                rev[y].push_back(x);
            }
    std::vector<bool> seen_fwd(n, false), seen_rev(n, false);
    reach(fwd, 0, seen_fwd);
    reach(rev, 0, seen_rev);
    for (int x = 0; x < n; ++x)
        if (!seen_fwd[x] || !seen_rev[x]) return false;
    return true;
}

std::vector<std::vector<std::pair<int, double>>> in_adjacency(const RateKernel& kernel) {
    std::vector<std::vector<std::pair<int, double>>> in(kernel.n_sites);
    for (int x = 0; x < kernel.n_sites; ++x)
        for (const auto& [y, r] : kernel.out[x]) in[y].emplace_back(x, r);
    return in;
}

double stationary_residual_inf(const RateKernel& kernel, const ProbabilityVector& pi) {
    if (pi.size() != static_cast<std::size_t>(kernel.n_sites))
        throw std::invalid_argument("pi length mismatch");
    std::vector<double> flow(kernel.n_sites, 0.0);
    for (int x = 0; x < kernel.n_sites; ++x) {
        flow[x] -= pi[x] * kernel.exit_rate[x];
        for (const auto& [y, r] : kernel.out[x]) flow[y] += pi[x] * r;
    }
    double worst = 0.0;
    for (double f : flow) worst = std::max(worst, std::abs(f));
    return worst;
}

namespace {

constexpr double kResidualTol = 1e-10;
constexpr int kDenseSolveLimit = 512;

StationaryInfo finish_stationary(const RateKernel& kernel, ProbabilityVector pi) {
    for (double& v : pi.values) {
        if (v < 0.0 && v > -1e-13) v = 0.0;
    }
    pi.renormalize();
    double residual = stationary_residual_inf(kernel, pi);
    if (!(residual <= kResidualTol))
        throw std::runtime_error("stationary solve residual " + std::to_string(residual));
    StationaryInfo info;
    info.pi_max = *std::max_element(pi.values.begin(), pi.values.end());
    info.pi_min = *std::min_element(pi.values.begin(), pi.values.end());
    if (!(info.pi_min > 0.0)) throw std::runtime_error("stationary solve produced a zero entry");
    info.rho = info.pi_max / info.pi_min;
    info.pi = std::move(pi);
    return info;
}

ProbabilityVector solve_dense(const RateKernel& kernel) {
    const int n = kernel.n_sites;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        a(x, x) = -kernel.exit_rate[x];
        for (const auto& [y, r] : kernel.out[x]) a(y, x) += r;
    }
    // Replace the last balance equation (linearly dependent on the others)
    // with the normalization sum(pi) = 1.
    for (int x = 0; x < n; ++x) a(n - 1, x) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = a.partialPivLu().solve(b);
    ProbabilityVector pi(n);
    for (int i = 0; i < n; ++i) pi[i] = x(i);
    return pi;
}

ProbabilityVector solve_sparse(const RateKernel& kernel, int pin) {
    const int n = kernel.n_sites;
    std::vector<Eigen::Triplet<double>> trip;
    for (int x = 0; x < n; ++x) {
        if (x != pin) trip.emplace_back(x, x, -kernel.exit_rate[x]);
        for (const auto& [y, r] : kernel.out[x])
            if (y != pin) trip.emplace_back(y, x, r);
    }
    trip.emplace_back(pin, pin, 1.0);
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse stationary factorization failed");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(pin) = 1.0;
    Eigen::VectorXd x = lu.solve(b);
    ProbabilityVector pi(n);
    for (int i = 0; i < n; ++i) pi[i] = x(i);
    return pi;
}

}  // namespace

StationaryInfo stationary_distribution(const RateKernel& kernel) {
    if (!is_irreducible(kernel))
        throw UnsupportedReducibleError(
            "kernel is reducible; supply an explicit stationary distribution");
    if (kernel.n_sites <= kDenseSolveLimit) return finish_stationary(kernel, solve_dense(kernel));
    ProbabilityVector pi = solve_sparse(kernel, 0);
    bool sane = true;
    for (double v : pi.values)
        if (!std::isfinite(v)) sane = false;
    if (sane && stationary_residual_inf(kernel, pi) <= kResidualTol * pi.sum())
        return finish_stationary(kernel, std::move(pi));
    // Poorly scaled pin; retry pinned at the heaviest entry of the first pass.
    int pin = 0;
    double best = -1.0;
    for (int i = 0; i < kernel.n_sites; ++i) {
        double v = std::isfinite(pi[i]) ? std::abs(pi[i]) : -1.0;
        if (v > best) {
            best = v;
            pin = i;
        }
    }
    return finish_stationary(kernel, solve_sparse(kernel, pin));
}

StationaryInfo stationary_distribution(const RateKernel& kernel, const ProbabilityVector& supplied) {
    if (supplied.size() != static_cast<std::size_t>(kernel.n_sites))
        throw std::invalid_argument("supplied pi length mismatch");
    ProbabilityVector pi = supplied;
    if (std::abs(pi.sum() - 1.0) > 1e-12) throw std::invalid_argument("supplied pi does not sum to 1");
    for (double v : pi.values)
        if (!(v > 0.0)) throw std::invalid_argument("supplied pi must be strictly positive");
    if (stationary_residual_inf(kernel, pi) > kResidualTol)
        throw std::invalid_argument("supplied pi is not stationary for this kernel");
    StationaryInfo info;
    info.pi_max = *std::max_element(pi.values.begin(), pi.values.end());
    info.pi_min = *std::min_element(pi.values.begin(), pi.values.end());
    info.rho = info.pi_max / info.pi_min;
    info.pi = std::move(pi);
    return info;
}

}  // namespace votermix
