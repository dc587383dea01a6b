#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "votermix/dual.hpp"
#include "votermix/rng.hpp"

namespace votermix {

/// Rooted tree with flip probabilities theta in (0, 1/2] on the edges.
/// nodes[0] is the root; every parent index precedes its children.
struct NoisyTree {
    struct Node {
        int parent;    // -1 at the root
        double theta;  // flip probability of the edge to the parent
    };
    std::vector<Node> nodes;
    std::vector<int> leaves;

    std::size_t n_leaves() const noexcept { return leaves.size(); }
};

NoisyTree make_noisy_tree(const std::vector<int>& parents, const std::vector<double>& thetas);

/// Edge-disjoint unfolding: one path per root-leaf path of the source,
/// identical lengths and labels, all paths acting independently.
struct StringyTree {
    /// Per path, the edge labels in root-to-leaf order; paths are listed in
    /// the leaf order of the source tree.
    std::vector<std::vector<double>> paths;
};

StringyTree build_stringy(const NoisyTree& tree);

/// Duration-to-flip-probability map of the tree-indexed chain:
/// theta(s) = (1 - e^{-s})/2.
double flip_prob_from_duration(double s);

/// Convert one coalescence tree into a noisy tree on its branch structure
/// (leaf order preserved). Zero-duration edges are rejected.
NoisyTree noisy_tree_from_forest(const ForestTree& tree);

/// Root spin uniform in {-1,+1}; each child independently reverses its
/// parent's value with the edge probability. Returns a spin per node.
std::vector<int> sample_tree_spins(const NoisyTree& tree, std::uint64_t seed);

/// alpha = (1 - gamma1^2)/(1 - gamma^2 gamma1^2) with gamma = 1 - 2 theta.
/// Requires theta1 <= theta2 and both leaf labels strictly below 1/2 (the
/// identity channel covers the 1/2 cases).
double upsilon_alpha(double theta, double theta1, double theta2);

/// Mean of the z-variable: (1 - 2 theta2)/(1 - 2 theta1), in (0, 1].
double upsilon_z_mean(double theta1, double theta2);

/// The randomized map on stringy leaf spins: sigma1* = s1; sigma2* = s2 with
/// probability alpha, else s1 * z where z is +-1 with the given mean.
std::pair<int, int> apply_upsilon_channel(int s1, int s2, double alpha, double z_mean,
                                          std::uint64_t seed);

/// Exact joint law of (root, leaves) spins by summing over all assignments.
/// Index bit 0 is the root, bit 1+k is leaf k; a set bit means spin +1.
struct JointTable {
    int n_vars = 0;
    std::vector<double> prob;

    double correlation(int var_a, int var_b) const;
};

JointTable exhaustive_joint(const NoisyTree& tree);

/// Exact law of the leaf spins given the root sign (bit k of the index set
/// means leaf k is +1).
std::vector<double> leaf_law_given_root(const NoisyTree& tree, int root_sign);
std::vector<double> stringy_leaf_law_given_root(const StringyTree& stringy, int root_sign);

/// Exhaustive verification that the channel transforms the stringy
/// conditional leaf law into the tree conditional law for both root signs.
struct UpsilonCheck {
    double max_error = 0.0;   // worst conditional-probability discrepancy
    double alpha = 1.0;       // channel mixing weight (1 in the identity case)
    bool identity_used = false;
    bool swapped = false;     // leaves reordered internally so theta1 <= theta2
    double moment_rho_s2 = 0.0;  // E[rho sigma2*]
    double moment_s1_s2 = 0.0;   // E[sigma1* sigma2*]
};

UpsilonCheck upsilon_channel_check(double theta, double theta1, double theta2);

/// Tree import/export: `parent child theta` edge lines, `#` comments.
NoisyTree parse_noisy_tree(std::istream& in);
void write_noisy_tree(std::ostream& out, const NoisyTree& tree);

}  // namespace votermix
