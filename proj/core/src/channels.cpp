#include "votermix/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "votermix/errors.hpp"

namespace votermix {

namespace {
constexpr int kJointLeafCap = 4;
constexpr int kJointNodeCap = 20;

void check_theta(double theta) {
    if (!(theta > 0.0) || !(theta <= 0.5))
        throw std::invalid_argument("edge flip probability must lie in (0, 1/2]");
}
}  // namespace

NoisyTree make_noisy_tree(const std::vector<int>& parents, const std::vector<double>& thetas) {
    const int n = static_cast<int>(parents.size());
    if (n < 2) throw std::invalid_argument("noisy tree needs a root and at least one edge");
    if (thetas.size() != parents.size()) throw std::invalid_argument("one theta per node required");
    if (parents[0] != -1) throw std::invalid_argument("nodes[0] must be the root");
    NoisyTree tree;
    tree.nodes.resize(n);
    std::vector<int> child_count(n, 0);
    tree.nodes[0] = {-1, 0.0};
    for (int i = 1; i < n; ++i) {
        if (parents[i] < 0 || parents[i] >= i)
            throw std::invalid_argument("parents must precede children");
        check_theta(thetas[i]);
        tree.nodes[i] = {parents[i], thetas[i]};
        ++child_count[parents[i]];
    }
    for (int i = 1; i < n; ++i)
        if (child_count[i] == 0) tree.leaves.push_back(i);
    if (child_count[0] == 0) throw std::invalid_argument("root has no children");
    return tree;
}

StringyTree build_stringy(const NoisyTree& tree) {
    if (tree.leaves.empty()) throw std::invalid_argument("tree has no leaves");
    StringyTree stringy;
    stringy.paths.reserve(tree.leaves.size());
    for (int leaf : tree.leaves) {
        std::vector<double> labels;
        for (int node = leaf; node != 0; node = tree.nodes[node].parent) {
            check_theta(tree.nodes[node].theta);
            labels.push_back(tree.nodes[node].theta);
        }
        std::reverse(labels.begin(), labels.end());
        stringy.paths.push_back(std::move(labels));
    }
    return stringy;
}

double flip_prob_from_duration(double s) {
    if (s < 0.0) throw std::invalid_argument("negative duration");
    return 0.5 * (1.0 - std::exp(-s));
}

NoisyTree noisy_tree_from_forest(const ForestTree& tree) {
    std::vector<int> parents(tree.nodes.size());
    std::vector<double> thetas(tree.nodes.size(), 0.0);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        parents[i] = tree.nodes[i].parent;
        if (tree.nodes[i].parent >= 0) thetas[i] = flip_prob_from_duration(tree.nodes[i].edge_duration);
    }
    return make_noisy_tree(parents, thetas);
}

std::vector<int> sample_tree_spins(const NoisyTree& tree, std::uint64_t seed) {
    Rng rng = derive_stream(seed, 0, StreamKind::TreeSpins);
    std::vector<int> spin(tree.nodes.size());
    spin[0] = rng.fair_bit() ? 1 : -1;
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
        const bool reverse = rng.bernoulli(tree.nodes[i].theta);
        spin[i] = reverse ? -spin[tree.nodes[i].parent] : spin[tree.nodes[i].parent];
    }
    return spin;
}

double upsilon_alpha(double theta, double theta1, double theta2) {
    check_theta(theta);
    check_theta(theta1);
    check_theta(theta2);
    if (theta1 > theta2) throw std::invalid_argument("upsilon_alpha requires theta1 <= theta2");
    if (theta1 == 0.5 || theta2 == 0.5)
        throw std::invalid_argument("leaf label 1/2: the identity channel applies");
    const double gamma = 1.0 - 2.0 * theta;
    const double gamma1 = 1.0 - 2.0 * theta1;
    return (1.0 - gamma1 * gamma1) / (1.0 - gamma * gamma * gamma1 * gamma1);
}

double upsilon_z_mean(double theta1, double theta2) {
    check_theta(theta1);
    check_theta(theta2);
    if (theta1 > theta2) throw std::invalid_argument("upsilon_z_mean requires theta1 <= theta2");
    if (theta1 == 0.5) throw std::invalid_argument("leaf label 1/2: the identity channel applies");
    return (1.0 - 2.0 * theta2) / (1.0 - 2.0 * theta1);
}

std::pair<int, int> apply_upsilon_channel(int s1, int s2, double alpha, double z_mean,
                                          std::uint64_t seed) {
    if (std::abs(s1) != 1 || std::abs(s2) != 1) throw std::invalid_argument("spins must be +-1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
    if (!(z_mean > 0.0 && z_mean <= 1.0)) throw std::invalid_argument("z mean must lie in (0,1]");
    Rng rng = derive_stream(seed, 0, StreamKind::ChannelNoise);
    if (rng.bernoulli(alpha)) return {s1, s2};
    const int z = rng.bernoulli(0.5 * (1.0 + z_mean)) ? 1 : -1;
    return {s1, s1 * z};
}

double JointTable::correlation(int var_a, int var_b) const {
    double total = 0.0;
    for (std::size_t pattern = 0; pattern < prob.size(); ++pattern) {
        const int sa = (pattern >> var_a) & 1u ? 1 : -1;
        const int sb = (pattern >> var_b) & 1u ? 1 : -1;
        total += prob[pattern] * sa * sb;
    }
    return total;
}

JointTable exhaustive_joint(const NoisyTree& tree) {
    const int n_nodes = static_cast<int>(tree.nodes.size());
    if (static_cast<int>(tree.leaves.size()) > kJointLeafCap)
        throw CapacityError("exhaustive_joint limited to 4 leaves");
    if (n_nodes > kJointNodeCap) throw CapacityError("exhaustive_joint: tree too large");
    JointTable table;
    table.n_vars = 1 + static_cast<int>(tree.leaves.size());
    table.prob.assign(std::size_t{1} << table.n_vars, 0.0);
    for (std::uint32_t assign = 0; assign < (1u << n_nodes); ++assign) {
        double p = 0.5;
        for (int i = 1; i < n_nodes; ++i) {
            const bool same = ((assign >> i) & 1u) == ((assign >> tree.nodes[i].parent) & 1u);
            p *= same ? 1.0 - tree.nodes[i].theta : tree.nodes[i].theta;
        }
        std::size_t pattern = assign & 1u;
        for (std::size_t k = 0; k < tree.leaves.size(); ++k)
            pattern |= static_cast<std::size_t>((assign >> tree.leaves[k]) & 1u) << (1 + k);
        table.prob[pattern] += p;
    }
    return table;
}

std::vector<double> leaf_law_given_root(const NoisyTree& tree, int root_sign) {
    if (std::abs(root_sign) != 1) throw std::invalid_argument("root sign must be +-1");
    const int n_nodes = static_cast<int>(tree.nodes.size());
    if (static_cast<int>(tree.leaves.size()) > kJointLeafCap)
        throw CapacityError("leaf_law_given_root limited to 4 leaves");
    if (n_nodes > kJointNodeCap) throw CapacityError("leaf_law_given_root: tree too large");
    std::vector<double> law(std::size_t{1} << tree.leaves.size(), 0.0);
    const std::uint32_t root_bit = root_sign > 0 ? 1u : 0u;
    for (std::uint32_t assign = 0; assign < (1u << n_nodes); ++assign) {
        if ((assign & 1u) != root_bit) continue;
        double p = 1.0;
        for (int i = 1; i < n_nodes; ++i) {
            const bool same = ((assign >> i) & 1u) == ((assign >> tree.nodes[i].parent) & 1u);
            p *= same ? 1.0 - tree.nodes[i].theta : tree.nodes[i].theta;
        }
        std::size_t pattern = 0;
        for (std::size_t k = 0; k < tree.leaves.size(); ++k)
            pattern |= static_cast<std::size_t>((assign >> tree.leaves[k]) & 1u) << k;
        law[pattern] += p;
    }
    return law;
}

std::vector<double> stringy_leaf_law_given_root(const StringyTree& stringy, int root_sign) {
    if (std::abs(root_sign) != 1) throw std::invalid_argument("root sign must be +-1");
    const std::size_t n_leaves = stringy.paths.size();
    if (n_leaves > kJointLeafCap) throw CapacityError("stringy_leaf_law_given_root limited to 4 leaves");
    std::vector<double> plus(n_leaves);
    for (std::size_t k = 0; k < n_leaves; ++k) {
        double g = 1.0;
        for (double theta : stringy.paths[k]) g *= 1.0 - 2.0 * theta;
        plus[k] = root_sign > 0 ? 0.5 * (1.0 + g) : 0.5 * (1.0 - g);
    }
    std::vector<double> law(std::size_t{1} << n_leaves, 1.0);
    for (std::size_t pattern = 0; pattern < law.size(); ++pattern)
        for (std::size_t k = 0; k < n_leaves; ++k)
            law[pattern] *= ((pattern >> k) & 1u) ? plus[k] : 1.0 - plus[k];
    return law;
}

UpsilonCheck upsilon_channel_check(double theta, double theta1, double theta2) {
    check_theta(theta);
    check_theta(theta1);
    check_theta(theta2);
    UpsilonCheck result;
    result.swapped = theta1 > theta2;
    const double a = result.swapped ? theta2 : theta1;  // smaller label, the pass-through leaf
    const double b = result.swapped ? theta1 : theta2;
    result.identity_used = (b == 0.5) || (a == 0.5);
    const double gamma = 1.0 - 2.0 * theta;
    const double gamma_a = 1.0 - 2.0 * a;
    const double gamma_b = 1.0 - 2.0 * b;
    double z_plus = 0.0;
    if (!result.identity_used) {
        result.alpha = upsilon_alpha(theta, a, b);
        z_plus = 0.5 * (1.0 + upsilon_z_mean(a, b));
    }

    // Conditional law of (sigma1, sigma2) on the tree, caller leaf order.
    NoisyTree upsilon = make_noisy_tree({-1, 0, 1, 1}, {0.0, theta, theta1, theta2});
    double max_error = 0.0;
    double joint_rho_s[2][4] = {};  // [root sign][caller outcome pattern]
    for (int xi : {-1, 1}) {
        const std::vector<double> target = leaf_law_given_root(upsilon, xi);
        // Stringy leaf marginals in sorted order.
        const double pa = xi > 0 ? 0.5 * (1.0 + gamma * gamma_a) : 0.5 * (1.0 - gamma * gamma_a);
        const double pb = xi > 0 ? 0.5 * (1.0 + gamma * gamma_b) : 0.5 * (1.0 - gamma * gamma_b);
        double channel_sorted[4] = {};  // bit0: sigma1* = +1, bit1: sigma2* = +1
        for (int sa_bit = 0; sa_bit < 2; ++sa_bit) {
            for (int sb_bit = 0; sb_bit < 2; ++sb_bit) {
                const double p_hat = (sa_bit ? pa : 1.0 - pa) * (sb_bit ? pb : 1.0 - pb);
                if (result.identity_used) {
                    channel_sorted[sa_bit | (sb_bit << 1)] += p_hat;
                    continue;
                }
                channel_sorted[sa_bit | (sb_bit << 1)] += p_hat * result.alpha;
                // Mixing branch: sigma2* = sigma1* z.
                const int same_bit = sa_bit | (sa_bit << 1);
                const int diff_bit = sa_bit | ((1 - sa_bit) << 1);
                channel_sorted[same_bit] += p_hat * (1.0 - result.alpha) * z_plus;
                channel_sorted[diff_bit] += p_hat * (1.0 - result.alpha) * (1.0 - z_plus);
            }
        }
        for (int pattern = 0; pattern < 4; ++pattern) {
            const int caller_pattern =
                result.swapped ? ((pattern & 1) << 1) | ((pattern >> 1) & 1) : pattern;
            max_error = std::max(max_error, std::abs(channel_sorted[pattern] - target[caller_pattern]));
            joint_rho_s[xi > 0 ? 1 : 0][caller_pattern] += 0.5 * channel_sorted[pattern];
        }
    }
    result.max_error = max_error;
    for (int r = 0; r < 2; ++r) {
        const int rho = r ? 1 : -1;
        for (int pattern = 0; pattern < 4; ++pattern) {
            const int s1 = (pattern & 1) ? 1 : -1;
            const int s2 = (pattern & 2) ? 1 : -1;
            result.moment_rho_s2 += joint_rho_s[r][pattern] * rho * s2;
            result.moment_s1_s2 += joint_rho_s[r][pattern] * s1 * s2;
        }
    }
    return result;
}

NoisyTree parse_noisy_tree(std::istream& in) {
    struct Edge {
        int parent, child;
        double theta;
    };
    std::vector<Edge> edges;
    std::map<int, int> mentioned;  // external id -> first line seen
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream line(raw);
        int parent, child;
        double theta;
        if (!(line >> parent)) continue;
        if (!(line >> child >> theta)) throw ParseError(line_no, "edge needs <parent> <child> <theta>");
        std::string extra;
        if (line >> extra) throw ParseError(line_no, "trailing tokens on line");
        if (parent < 0 || child < 0) throw ParseError(line_no, "node ids must be nonnegative");
        if (!(theta > 0.0 && theta <= 0.5)) throw ParseError(line_no, "theta must lie in (0, 1/2]");
        edges.push_back({parent, child, theta});
        mentioned.try_emplace(parent, line_no);
        mentioned.try_emplace(child, line_no);
    }
    if (edges.empty()) throw ParseError(line_no, "tree has no edges");
    std::map<int, std::pair<int, double>> parent_of;  // child -> (parent, theta)
    std::map<int, std::vector<int>> children;
    for (const auto& e : edges) {
        if (!parent_of.emplace(e.child, std::make_pair(e.parent, e.theta)).second)
            throw ParseError(mentioned[e.child], "node has two parents");
        children[e.parent].push_back(e.child);
    }
    int root = -1;
    for (const auto& [id, line] : mentioned)
        if (!parent_of.count(id)) {
            if (root >= 0) throw ParseError(line, "tree has two roots");
            root = id;
        }
    if (root < 0) throw ParseError(1, "tree has a cycle (no root found)");
    // Breadth-first reindex so parents precede children.
    std::vector<int> order{root};
    std::map<int, int> local{{root, 0}};
    std::vector<int> parents{-1};
    std::vector<double> thetas{0.0};
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (int child : children[order[head]]) {
            local[child] = static_cast<int>(order.size());
            order.push_back(child);
            parents.push_back(local[order[head]]);
            thetas.push_back(parent_of[child].second);
        }
    }
    if (order.size() != mentioned.size()) throw ParseError(1, "tree is disconnected or cyclic");
    return make_noisy_tree(parents, thetas);
}

void write_noisy_tree(std::ostream& out, const NoisyTree& tree) {
    char buf[64];
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", tree.nodes[i].theta);
        out << tree.nodes[i].parent << ' ' << i << ' ' << buf << '\n';
    }
}

}  // namespace votermix
