#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "votermix/prob.hpp"

namespace votermix {

/// The voting mechanism (S, q): dense site indices 0..n-1, sparse nonnegative
/// rates between distinct sites. Immutable after construction and safe to
/// share across threads.
struct RateKernel {
    int n_sites = 0;
    /// Per-site outgoing edges (target, rate), sorted by target.
    std::vector<std::vector<std::pair<int, double>>> out;
    std::vector<double> exit_rate;
    double q_max = 0.0;

    /// q(x, y); zero when the pair is absent.
    double rate(int x, int y) const;
};

struct RateEdge {
    int from;
    int to;
    double rate;
};

/// Validates and assembles a kernel: indices in range, no self-rates, no
/// duplicate (x, y) pairs, rates finite and >= 0.
RateKernel make_kernel(int n_sites, const std::vector<RateEdge>& edges);

/// Rate-1 continuous-time random walk on Z/nZ: q(x, x+-1 mod n) = 1/2.
RateKernel build_cycle(int n);

/// Rate-1 walk on the n-star. Site 0 is the center by convention;
/// q(center, leaf) = 1/n and q(leaf, center) = 1.
RateKernel build_star(int n);

/// Rate-1 walk on the complete graph: q(x, y) = 1/(n-1).
RateKernel build_complete(int n);

/// Kernel with q identically zero (pure rerandomization dynamics).
RateKernel build_empty(int n);

RateKernel multiply_rates(const RateKernel& kernel, double factor);

/// Relabel sites: site x becomes perm[x].
RateKernel permute_sites(const RateKernel& kernel, const std::vector<int>& perm);

/// Chain-spec text format: a `sites <n>` line followed by `rate <x> <y> <v>`
/// lines; `#` starts a comment. The only ingestion path for custom kernels.
RateKernel parse_chain_spec(std::istream& in);
RateKernel build_from_file(const std::string& path);

/// Strong connectivity of the positive-rate digraph.
bool is_irreducible(const RateKernel& kernel);

/// Incoming edges (source, rate) per site.
std::vector<std::vector<std::pair<int, double>>> in_adjacency(const RateKernel& kernel);

struct StationaryInfo {
    ProbabilityVector pi;
    double pi_max = 0.0;
    double pi_min = 0.0;
    double rho = 1.0;
};

/// Solve pi Q = 0 for the unique stationary distribution of an irreducible
/// kernel. Dense LU for n <= 512, sparse LU above. Residual ||pi Q||_inf is
/// verified to 1e-10. Throws UnsupportedReducibleError on reducible input.
StationaryInfo stationary_distribution(const RateKernel& kernel);

/// Accept a caller-supplied distribution (it must be strictly positive and
/// verified stationary); the only path for reducible kernels.
StationaryInfo stationary_distribution(const RateKernel& kernel, const ProbabilityVector& supplied);

/// max_y |sum_x pi(x) Q(x, y)|.
double stationary_residual_inf(const RateKernel& kernel, const ProbabilityVector& pi);

}  // namespace votermix
