#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "votermix/chain.hpp"
#include "votermix/graphical.hpp"
#include "votermix/spin.hpp"

namespace votermix {

constexpr double kNeverRerandomized = std::numeric_limits<double>::infinity();

/// One realization of the coalescing backward system over [0, t], built from
/// the same graphical events as the forward construction. For each site x the
/// dual chain starts at x and traces the voting arrows backward; chains that
/// meet coalesce permanently. Depths are backward time s in [0, t].
struct DualTrace {
    int n_sites = 0;
    double horizon = 0.0;

    /// Per-site jump list (depth, site jumped to); the path starts at (0, x).
    std::vector<std::vector<std::pair<double, int>>> paths;
    /// First rerandomization depth e(x, t) along the path; kNeverRerandomized
    /// when the path never meets one.
    std::vector<double> rera_depth;
    /// Z(x, t), meaningful only when rera_depth is finite.
    std::vector<std::uint8_t> rera_bit;
    /// Coalescence map: representative lineage id per site.
    std::vector<int> lineage;
    /// B^{x,t}_t, the path position at depth t (forward time 0).
    std::vector<int> end_site;

    /// Raw coalescence tree nodes: per-site leaves (ids 0..n-1, depth 0),
    /// then branch points, then one root per surviving class (depth t).
    struct WalkNode {
        int site;
        double depth;
        int parent;  // -1 for roots
    };
    std::vector<WalkNode> nodes;
};

DualTrace trace_from_events(const GraphicalEvents& events);
DualTrace sample_dual(const RateKernel& kernel, double t, std::uint64_t seed);

/// The duality formula applied sitewise:
/// eta_t(x) = Z(x,t) 1{e <= t} + eta0(B^{x,t}_t) 1{e > t}.
SpinConfiguration dual_sample_config(const DualTrace& trace, const SpinConfiguration& eta0);

/// The disjoint trees cut out by the coalescing picture: roots at forward
/// time 0, leaves at forward time t, binary branch points where lineages
/// merged (placed at the site moved to). Leaf sets partition S and edge
/// durations along any root-leaf path sum to t.
struct ForestTree {
    int root_site;
    std::vector<int> leaves;
    struct Node {
        int site;
        double time;  // forward time in [0, horizon]
        int parent;   // local index, -1 at the root
        double edge_duration;
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    std::vector<int> leaf_node;
};

struct CoalescenceForest {
    double horizon = 0.0;
    std::vector<ForestTree> trees;
};

CoalescenceForest extract_forest(const DualTrace& trace);

/// Sample leaf values of the tree-indexed chain: one bit per tree at the
/// root, each child equal to its parent with probability (1 + e^{-s})/2 for
/// edge duration s. The law matches the conditional law of eta_t on the
/// leaves given the coalescing picture.
SpinConfiguration tree_indexed_sample(const CoalescenceForest& forest,
                                      const std::vector<std::uint8_t>& root_bits,
                                      std::uint64_t seed);

struct CoalescenceStats {
    double horizon = 0.0;
    int n_seeds = 0;
    /// Backward meeting depth averaged over coalesced pairs, seed-averaged.
    double mean_pair_meeting_time = 0.0;
    double pair_meeting_stderr = 0.0;
    double pair_met_fraction = 0.0;
    /// Probability all lineages merged into one class by depth t.
    double p_all_coalesced = 0.0;
    double p_all_coalesced_stderr = 0.0;
    /// Depth of the final merge, among fully coalesced seeds.
    double mean_full_coalescence_time = 0.0;
    double full_coalescence_stderr = 0.0;
};

CoalescenceStats coalescence_stats(const RateKernel& kernel, double t, int n_seeds,
                                   std::uint64_t seed);

/// Forest export: CSV `tree,node,site,time,parent,edge_duration`.
void write_forest_csv(std::ostream& out, const CoalescenceForest& forest);

}  // namespace votermix
