#include "votermix/dual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "votermix/rng.hpp"

namespace votermix {

namespace {

struct ClassState {
    int site = -1;
    int head = -1;                 // coalescence tree node currently grown
    std::vector<int> members;      // original sites in this lineage class
    std::vector<int> pending;      // members whose e(x,t) is still infinite
};

struct Walker {
    std::vector<int> parent;
    std::vector<ClassState> state;

    explicit Walker(int n) : parent(n), state(n) {
        for (int i = 0; i < n; ++i) {
            parent[i] = i;
            state[i].site = i;
            state[i].head = i;
            state[i].members = {i};
            state[i].pending = {i};
        }
    }

    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }

    int unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (state[a].members.size() < state[b].members.size()) std::swap(a, b);
        parent[b] = a;
        auto& sa = state[a];
        auto& sb = state[b];
        sa.members.insert(sa.members.end(), sb.members.begin(), sb.members.end());
        sa.pending.insert(sa.pending.end(), sb.pending.begin(), sb.pending.end());
        sb.members.clear();
        sb.pending.clear();
        return a;
    }
};

}  // namespace

DualTrace trace_from_events(const GraphicalEvents& events) {
    const int n = events.n_sites;
    const double t = events.horizon;
    DualTrace trace;
    trace.n_sites = n;
    trace.horizon = t;
    trace.paths.assign(n, {});
    trace.rera_depth.assign(n, kNeverRerandomized);
    trace.rera_bit.assign(n, 0);
    trace.lineage.assign(n, 0);
    trace.end_site.assign(n, 0);
    trace.nodes.reserve(2 * n);
    for (int x = 0; x < n; ++x) trace.nodes.push_back({x, 0.0, -1});

    Walker walker(n);
    std::vector<int> occupant(n);
    for (int x = 0; x < n; ++x) occupant[x] = x;

    auto refs = events.merged_order();
    for (auto it = refs.rbegin(); it != refs.rend(); ++it) {
        const auto& ref = *it;
        const int z = ref.site;
        if (occupant[z] < 0) continue;
        const double depth = t - ref.time;
        if (!ref.is_vote) {
            auto& cls = walker.state[walker.find(occupant[z])];
            const bool bit = events.reras[z][ref.index].bit;
            for (int member : cls.pending) {
                trace.rera_depth[member] = depth;
                trace.rera_bit[member] = bit ? 1 : 0;
            }
            cls.pending.clear();
            continue;
        }
        const int w = events.votes[z][ref.index].target;
        const int moving = walker.find(occupant[z]);
        occupant[z] = -1;
        for (int member : walker.state[moving].members) trace.paths[member].emplace_back(depth, w);
        if (occupant[w] >= 0) {
            const int resident = walker.find(occupant[w]);
            const int branch = static_cast<int>(trace.nodes.size());
            trace.nodes.push_back({w, depth, -1});
            trace.nodes[walker.state[moving].head].parent = branch;
            trace.nodes[walker.state[resident].head].parent = branch;
            const int merged = walker.unite(moving, resident);
            walker.state[merged].head = branch;
            walker.state[merged].site = w;
            occupant[w] = merged;
        } else {
            walker.state[moving].site = w;
            occupant[w] = moving;
        }
    }

    for (int x = 0; x < n; ++x) {
        const int root = walker.find(x);
        trace.lineage[x] = root;
        trace.end_site[x] = walker.state[root].site;
    }
    // One root node per surviving class, at depth t (forward time 0).
    std::vector<int> root_node(n, -1);
    for (int x = 0; x < n; ++x) {
        const int root = walker.find(x);
        if (root_node[root] >= 0) continue;
        const int id = static_cast<int>(trace.nodes.size());
        trace.nodes.push_back({walker.state[root].site, t, -1});
        trace.nodes[walker.state[root].head].parent = id;
        root_node[root] = id;
    }
    return trace;
}

DualTrace sample_dual(const RateKernel& kernel, double t, std::uint64_t seed) {
    return trace_from_events(sample_events(kernel, t, seed));
}

SpinConfiguration dual_sample_config(const DualTrace& trace, const SpinConfiguration& eta0) {
    if (eta0.n_sites() != trace.n_sites) throw std::invalid_argument("dual_sample_config: size mismatch");
    SpinConfiguration eta(trace.n_sites);
    for (int x = 0; x < trace.n_sites; ++x) {
        if (trace.rera_depth[x] <= trace.horizon)
            eta.set(x, trace.rera_bit[x] != 0);
        else
            eta.set(x, eta0.get(trace.end_site[x]));
    }
    return eta;
}

CoalescenceForest extract_forest(const DualTrace& trace) {
    const int n = trace.n_sites;
    CoalescenceForest forest;
    forest.horizon = trace.horizon;

    // Chase parents from each leaf to find the root of every global node.
    const int total = static_cast<int>(trace.nodes.size());
    std::vector<int> root_of(total, -1);
    for (int start = 0; start < total; ++start) {
        if (root_of[start] >= 0) continue;
        std::vector<int> chain;
        int node = start;
        while (root_of[node] < 0 && trace.nodes[node].parent >= 0) {
            chain.push_back(node);
            node = trace.nodes[node].parent;
        }
        const int root = root_of[node] >= 0 ? root_of[node] : node;
        root_of[node] = root;
        for (int c : chain) root_of[c] = root;
    }

    std::vector<int> tree_of_root(total, -1);
    for (int leaf = 0; leaf < n; ++leaf) {
        const int root = root_of[leaf];
        if (tree_of_root[root] < 0) {
            tree_of_root[root] = static_cast<int>(forest.trees.size());
            forest.trees.push_back({});
        }
    }
    std::vector<int> local_of(total, -1);
    for (int global = total - 1; global >= 0; --global) {
        const int tree_idx = tree_of_root[root_of[global]];
        if (tree_idx < 0) continue;
        auto& tree = forest.trees[tree_idx];
        const auto& wn = trace.nodes[global];
        const int local = static_cast<int>(tree.nodes.size());
        local_of[global] = local;
        ForestTree::Node node;
        node.site = wn.site;
        node.time = trace.horizon - wn.depth;
        if (wn.parent < 0) {
            node.parent = -1;
            node.edge_duration = 0.0;
            tree.root_site = wn.site;
        } else {
            node.parent = local_of[wn.parent];
            node.edge_duration = trace.nodes[wn.parent].depth - wn.depth;
        }
        tree.nodes.push_back(node);
    }
    for (int leaf = 0; leaf < n; ++leaf) {
        auto& tree = forest.trees[tree_of_root[root_of[leaf]]];
        tree.leaves.push_back(leaf);
        tree.leaf_node.push_back(local_of[leaf]);
    }
    return forest;
}

SpinConfiguration tree_indexed_sample(const CoalescenceForest& forest,
                                      const std::vector<std::uint8_t>& root_bits,
                                      std::uint64_t seed) {
    if (root_bits.size() != forest.trees.size())
        throw std::invalid_argument("tree_indexed_sample: one root bit per tree required");
    int n_sites = 0;
    for (const auto& tree : forest.trees) n_sites += static_cast<int>(tree.leaves.size());
    SpinConfiguration eta(n_sites);
    Rng rng = derive_stream(seed, 0, StreamKind::TreeSpins);
    std::vector<std::uint8_t> bit;
    for (std::size_t j = 0; j < forest.trees.size(); ++j) {
        const auto& tree = forest.trees[j];
        bit.assign(tree.nodes.size(), 0);
        // nodes[0] is the root and parents precede children (built root-first).
        bit[0] = root_bits[j];
        for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            const double retain = 0.5 * (1.0 + std::exp(-node.edge_duration));
            const bool keep = rng.bernoulli(retain);
            bit[i] = keep ? bit[node.parent] : static_cast<std::uint8_t>(1 - bit[node.parent]);
        }
        for (std::size_t k = 0; k < tree.leaves.size(); ++k)
            eta.set(tree.leaves[k], bit[tree.leaf_node[k]] != 0);
    }
    return eta;
}

CoalescenceStats coalescence_stats(const RateKernel& kernel, double t, int n_seeds,
                                   std::uint64_t seed) {
    if (n_seeds < 1) throw std::invalid_argument("coalescence_stats: need at least one seed");
    const int n = kernel.n_sites;
    const double total_pairs = 0.5 * static_cast<double>(n) * (n - 1);

    std::vector<double> seed_pair_mean;
    std::vector<double> seed_full_time;
    double met_pairs_total = 0.0;
    int fully_coalesced = 0;

    for (int rep = 0; rep < n_seeds; ++rep) {
        GraphicalEvents events = sample_events(kernel, t, replica_seed(seed, rep));
        std::vector<int> parent(n), size(n, 1), occupant(n);
        for (int x = 0; x < n; ++x) parent[x] = occupant[x] = x;
        auto find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        double pair_sum = 0.0;
        double pairs_met = 0.0;
        double last_merge = 0.0;
        int classes = n;
        auto refs = events.merged_order();
        for (auto it = refs.rbegin(); it != refs.rend(); ++it) {
            if (!it->is_vote || occupant[it->site] < 0) continue;
            const double depth = t - it->time;
            const int w = events.votes[it->site][it->index].target;
            int moving = find(occupant[it->site]);
            occupant[it->site] = -1;
            if (occupant[w] >= 0) {
                int resident = find(occupant[w]);
                if (resident != moving) {
                    pair_sum += static_cast<double>(size[moving]) * size[resident] * depth;
                    pairs_met += static_cast<double>(size[moving]) * size[resident];
                    if (size[moving] < size[resident]) std::swap(moving, resident);
                    parent[resident] = moving;
                    size[moving] += size[resident];
                    --classes;
                    last_merge = depth;
                }
            }
            occupant[w] = moving;
        }
        met_pairs_total += pairs_met;
        if (pairs_met > 0.0) seed_pair_mean.push_back(pair_sum / pairs_met);
        if (classes == 1) {
            ++fully_coalesced;
            seed_full_time.push_back(last_merge);
        }
    }

    auto mean_stderr = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.empty()) return {0.0, 0.0};
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) return {mean, 0.0};
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return {mean, std::sqrt(var / static_cast<double>(v.size()))};
    };

    CoalescenceStats stats;
    stats.horizon = t;
    stats.n_seeds = n_seeds;
    std::tie(stats.mean_pair_meeting_time, stats.pair_meeting_stderr) = mean_stderr(seed_pair_mean);
    stats.pair_met_fraction = total_pairs > 0.0 ? met_pairs_total / (total_pairs * n_seeds) : 0.0;
    stats.p_all_coalesced = static_cast<double>(fully_coalesced) / n_seeds;
    stats.p_all_coalesced_stderr =
        std::sqrt(std::max(0.0, stats.p_all_coalesced * (1.0 - stats.p_all_coalesced) / n_seeds));
    std::tie(stats.mean_full_coalescence_time, stats.full_coalescence_stderr) =
        mean_stderr(seed_full_time);
    return stats;
}

void write_forest_csv(std::ostream& out, const CoalescenceForest& forest) {
    out << "tree,node,site,time,parent,edge_duration\n";
    char tbuf[64], dbuf[64];
    for (std::size_t j = 0; j < forest.trees.size(); ++j) {
        const auto& tree = forest.trees[j];
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            std::snprintf(tbuf, sizeof tbuf, "%.12g", node.time);
            std::snprintf(dbuf, sizeof dbuf, "%.12g", node.edge_duration);
            out << j << ',' << i << ',' << node.site << ',' << tbuf << ',' << node.parent << ','
                << dbuf << '\n';
        }
    }
}

}  // namespace votermix
