// votermix: exact solvers, simulators and bound calculators for noisy voter
// models on finite kernels. Every stochastic subcommand takes --seed and
// writes deterministic CSV, so runs are reproducible byte for byte.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "votermix/analysis.hpp"
#include "votermix/chain.hpp"
#include "votermix/channels.hpp"
#include "votermix/csv.hpp"
#include "votermix/dual.hpp"
#include "votermix/exact.hpp"
#include "votermix/graphical.hpp"
#include "votermix/ising.hpp"
#include "votermix/parallel.hpp"
#include "votermix/star.hpp"

namespace {

using namespace votermix;

struct KernelOptions {
    int cycle = 0;
    int star = 0;
    int complete = 0;
    std::string chain_file;

    void attach(CLI::App* cmd) {
        auto* a = cmd->add_option("--cycle", cycle, "rate-1 walk on the n-cycle");
        auto* b = cmd->add_option("--star", star, "rate-1 walk on the n-star (center = site 0)");
        auto* c = cmd->add_option("--complete", complete, "rate-1 walk on the complete graph");
        auto* d = cmd->add_option("--chain-file", chain_file, "chain-spec file (sites/rate lines)");
        a->excludes(b)->excludes(c)->excludes(d);
        b->excludes(c)->excludes(d);
        c->excludes(d);
    }

    RateKernel build() const {
        if (cycle > 0) return build_cycle(cycle);
        if (star > 0) return build_star(star);
        if (complete > 0) return build_complete(complete);
        if (!chain_file.empty()) return build_from_file(chain_file);
        throw std::runtime_error("no kernel given (use --cycle/--star/--complete/--chain-file)");
    }
};

SpinConfiguration parse_state(const std::string& text, int n_sites) {
    if (text == "allones") return SpinConfiguration::all_ones(n_sites);
    if (text == "allzeros") return SpinConfiguration::all_zeros(n_sites);
    std::size_t pos = 0;
    const unsigned long index = std::stoul(text, &pos);
    if (pos != text.size()) throw std::runtime_error("bad state: " + text);
    return SpinConfiguration::from_index(n_sites, static_cast<std::uint32_t>(index));
}

std::optional<CsvWriter> maybe_writer(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return std::make_optional<CsvWriter>(path);
}

int run_exact(const KernelOptions& kernel_opts, const std::string& out, double tmix_eps,
              const std::vector<double>& profile_grid, double evolve_t, const std::string& from,
              bool stationary) {
    const RateKernel kernel = kernel_opts.build();
    auto writer = maybe_writer(out);
    if (tmix_eps > 0.0) {
        const double t = t_mix_exact(kernel, tmix_eps);
        if (writer) {
            writer->row("quantity", "value");
            writer->row("t_mix", t);
        }
        std::cout << "t_mix(" << csv_double(tmix_eps) << ") = " << csv_double(t) << "\n";
        return 0;
    }
    if (!profile_grid.empty()) {
        const auto profile = d_profile(kernel, profile_grid);
        if (writer) {
            writer->row("t", "d", "dbar");
            for (const auto& p : profile) writer->row(p.t, p.d, p.dbar);
        }
        std::cout << "d-profile over " << profile.size() << " grid points; d("
                  << csv_double(profile.back().t) << ") = " << csv_double(profile.back().d) << "\n";
        return 0;
    }
    if (evolve_t >= 0.0) {
        ConfigGenerator gen(kernel);
        ProbabilityVector mu = ProbabilityVector::delta(
            gen.n_states(), parse_state(from, kernel.n_sites).index());
        mu = evolve(gen, std::move(mu), evolve_t);
        if (writer) {
            writer->row("state_index", "probability");
            for (std::size_t s = 0; s < mu.size(); ++s) writer->row(s, mu[s]);
        }
        std::cout << "evolved to t = " << csv_double(evolve_t) << " over " << mu.size()
                  << " states\n";
        return 0;
    }
    (void)stationary;  // default action
    ConfigGenerator gen(kernel);
    ProbabilityVector mu = stationary_of(gen);
    if (writer) {
        writer->row("state_index", "probability");
        for (std::size_t s = 0; s < mu.size(); ++s) writer->row(s, mu[s]);
    }
    std::cout << "stationary distribution over " << mu.size() << " states, residual "
              << csv_double(gen.residual_inf(mu)) << "\n";
    return 0;
}

int run_simulate(const KernelOptions& kernel_opts, const std::string& out, double t,
                 const std::string& from, const std::string& method, std::size_t samples,
                 std::uint64_t seed, int threads, bool compare_exact,
                 const std::string& dump_events) {
    const RateKernel kernel = kernel_opts.build();
    const SpinConfiguration eta0 = parse_state(from, kernel.n_sites);
    if (!dump_events.empty()) {
        std::ofstream log(dump_events, std::ios::trunc);
        if (!log) throw std::runtime_error("cannot open " + dump_events);
        write_event_log_csv(log, sample_events(kernel, t, seed));
    }
    if (kernel.n_sites > 20) throw std::runtime_error("simulate CSV needs n_sites <= 20");
    std::vector<std::uint32_t> indices(samples);
    const bool graphical = method == "graphical";
    parallel_chunks(samples, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint64_t s = replica_seed(seed, i);
            indices[i] = graphical ? forward_sample(kernel, eta0, t, s).index()
                                   : gillespie_run(kernel, eta0, t, s).index();
        }
    });
    auto writer = maybe_writer(out);
    if (writer) {
        writer->row("sample", "state_index");
        for (std::size_t i = 0; i < indices.size(); ++i) writer->row(i, indices[i]);
    }
    std::ostringstream summary;
    summary << method << " run: " << samples << " samples at t = " << csv_double(t);
    if (compare_exact) {
        if (kernel.n_sites > 12) throw std::runtime_error("--compare-exact needs n_sites <= 12");
        ConfigGenerator gen(kernel);
        ProbabilityVector exact =
            evolve(gen, ProbabilityVector::delta(gen.n_states(), eta0.index()), t);
        ProbabilityVector empirical(gen.n_states());
        for (std::uint32_t idx : indices) empirical[idx] += 1.0 / samples;
        summary << ", TV to exact = " << csv_double(tv(empirical, exact));
    }
    std::cout << summary.str() << "\n";
    return 0;
}

int run_dual_check(const KernelOptions& kernel_opts, const std::string& out, double t,
                   std::size_t samples, std::uint64_t seed, const std::string& export_forest) {
    const RateKernel kernel = kernel_opts.build();
    const int n = kernel.n_sites;
    std::size_t pathwise_equal = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const std::uint64_t s = replica_seed(seed, i);
        GraphicalEvents events = sample_events(kernel, t, s);
        DualTrace trace = trace_from_events(events);
        Rng rng = derive_stream(s, 0, StreamKind::Generic);
        SpinConfiguration eta0(n);
        for (int x = 0; x < n; ++x) eta0.set(x, rng.fair_bit());
        if (forward_run(events, eta0) == dual_sample_config(trace, eta0)) ++pathwise_equal;
    }
    auto writer = maybe_writer(out);
    if (writer) writer->row("check", "value");
    const double equal_fraction = static_cast<double>(pathwise_equal) / samples;
    if (writer) writer->row("pathwise_equal_fraction", equal_fraction);
    std::ostringstream summary;
    summary << "pathwise forward/dual agreement: " << csv_double(equal_fraction);
    if (n <= 12) {
        ConfigGenerator gen(kernel);
        const SpinConfiguration ones = SpinConfiguration::all_ones(n);
        ProbabilityVector exact =
            evolve(gen, ProbabilityVector::delta(gen.n_states(), ones.index()), t);
        ProbabilityVector empirical(gen.n_states());
        for (std::size_t i = 0; i < samples; ++i) {
            DualTrace trace = sample_dual(kernel, t, replica_seed(seed ^ 0x5bd1e995, i));
            empirical[dual_sample_config(trace, ones).index()] += 1.0 / samples;
        }
        const double distance = tv(empirical, exact);
        if (writer) writer->row("dual_vs_exact_tv", distance);
        summary << ", dual vs exact TV = " << csv_double(distance);
    }
    if (!export_forest.empty()) {
        std::ofstream ffile(export_forest, std::ios::trunc);
        if (!ffile) throw std::runtime_error("cannot open " + export_forest);
        write_forest_csv(ffile, extract_forest(sample_dual(kernel, t, seed)));
    }
    std::cout << summary.str() << "\n";
    return 0;
}

int run_cutoff_profile(const std::string& family, const std::vector<int>& sizes,
                       const std::vector<double>& alphas, std::size_t samples, std::uint64_t seed,
                       int threads, const std::string& out) {
    const auto rows = cutoff_profile(parse_family(family), sizes, alphas, samples, seed, threads);
    auto writer = maybe_writer(out);
    if (writer) {
        writer->row("n", "alpha", "side", "estimate", "stderr", "n_samples");
        for (const auto& r : rows)
            writer->row(r.n, r.alpha, r.side, r.estimate, r.stderr_, r.n_samples);
    }
    std::cout << "cutoff profile: " << rows.size() << " rows over " << sizes.size()
              << " sizes x " << alphas.size() << " alphas\n";
    return 0;
}

int run_star(int n, double t, double tmix_eps, const std::vector<double>& grid, bool lift_check,
             const std::string& out) {
    auto writer = maybe_writer(out);
    if (tmix_eps > 0.0) {
        const double mix = t_mix_from_ones(n, tmix_eps);
        if (writer) {
            writer->row("quantity", "value");
            writer->row("t_mix_from_ones", mix);
        }
        std::cout << "t_mix_from_ones(" << n << ", " << csv_double(tmix_eps)
                  << ") = " << csv_double(mix) << "\n";
        return 0;
    }
    ReducedStarChain chain(n);
    std::vector<double> ts = grid;
    if (ts.empty() && t >= 0.0) ts.push_back(t);
    if (ts.empty()) ts = {0.5, 1.0, 2.0, 4.0, 8.0};
    if (writer) writer->row("n", "t", "tv");
    double last = 0.0;
    for (double ti : ts) {
        last = chain.tv_from_all_ones(ti);
        if (writer) writer->row(n, ti, last);
    }
    std::ostringstream summary;
    summary << "star n=" << n << ": tv_from_all_ones(" << csv_double(ts.back())
            << ") = " << csv_double(last);
    if (lift_check) {
        if (n > 8) throw std::runtime_error("--lift-check solves the full system; needs n <= 8");
        ConfigGenerator gen(build_star(n));
        ProbabilityVector full_stat = stationary_of(gen);
        double worst = 0.0;
        for (double ti : ts) {
            ProbabilityVector full = evolve(
                gen, ProbabilityVector::delta(gen.n_states(), (1u << (n + 1)) - 1u), ti);
            worst = std::max(worst, std::abs(tv(full, full_stat) - chain.tv_from_all_ones(ti)));
        }
        summary << ", lift discrepancy " << csv_double(worst);
    }
    std::cout << summary.str() << "\n";
    return 0;
}

int run_channel_check(int grid, const std::string& tree_file, const std::string& out) {
    if (!tree_file.empty()) {
        std::ifstream in(tree_file);
        if (!in) throw std::runtime_error("cannot open " + tree_file);
        const NoisyTree tree = parse_noisy_tree(in);
        const StringyTree stringy = build_stringy(tree);
        auto half_l1 = [](const std::vector<double>& a, const std::vector<double>& b) {
            double l1 = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
            return 0.5 * l1;
        };
        const double tree_tv = half_l1(leaf_law_given_root(tree, 1), leaf_law_given_root(tree, -1));
        const double stringy_tv = half_l1(stringy_leaf_law_given_root(stringy, 1),
                                          stringy_leaf_law_given_root(stringy, -1));
        auto writer = maybe_writer(out);
        if (writer) {
            writer->row("quantity", "value");
            writer->row("tree_root_tv", tree_tv);
            writer->row("stringy_root_tv", stringy_tv);
        }
        std::cout << "tree with " << tree.leaves.size() << " leaves: root-TV " << csv_double(tree_tv)
                  << " vs stringy " << csv_double(stringy_tv)
                  << (tree_tv <= stringy_tv + 1e-12 ? " (dominated)" : " (NOT dominated)") << "\n";
        return tree_tv <= stringy_tv + 1e-12 ? 0 : 1;
    }
    if (grid < 1) throw std::runtime_error("--grid must be positive");
    auto writer = maybe_writer(out);
    if (writer) writer->row("theta", "theta1", "theta2", "alpha", "max_error");
    double worst = 0.0;
    bool alpha_ok = true;
    for (int i = 1; i <= grid; ++i)
        for (int j = 1; j <= grid; ++j)
            for (int k = 1; k <= grid; ++k) {
                const double theta = 0.5 * i / grid;
                const double theta1 = 0.5 * j / grid;
                const double theta2 = 0.5 * k / grid;
                const UpsilonCheck check = upsilon_channel_check(theta, theta1, theta2);
                worst = std::max(worst, check.max_error);
                alpha_ok = alpha_ok && check.alpha >= 0.0 && check.alpha <= 1.0;
                if (writer) writer->row(theta, theta1, theta2, check.alpha, check.max_error);
            }
    std::cout << "channel grid " << grid << "^3: max conditional-law error = " << csv_double(worst)
              << ", alpha in [0,1]: " << (alpha_ok ? "yes" : "NO") << "\n";
    return worst <= 1e-12 && alpha_ok ? 0 : 1;
}

int run_ising_check(int n_min, int n_max, const std::vector<double>& betas, const std::string& out) {
    auto writer = maybe_writer(out);
    if (writer) writer->row("n", "beta", "discrepancy");
    double worst = 0.0;
    for (int n = n_min; n <= n_max; ++n)
        for (double beta : betas) {
            const double d = verify_equivalence(n, beta);
            worst = std::max(worst, d);
            if (writer) writer->row(n, beta, d);
        }
    std::cout << "ising equivalence over n in [" << n_min << "," << n_max << "]: max discrepancy = "
              << csv_double(worst) << "\n";
    return worst <= 1e-12 ? 0 : 1;
}

int run_bounds(double wilson_n, double wilson_qmax, double wilson_rho, double wilson_alpha,
               double star_c, double dgm_alpha, const std::string& out) {
    auto writer = maybe_writer(out);
    if (writer) writer->row("quantity", "value");
    bool any = false;
    std::ostringstream summary;
    if (wilson_n > 0.0) {
        WilsonBoundInput input{static_cast<int>(wilson_n), wilson_qmax, wilson_rho, wilson_alpha};
        const double bound = wilson_lower_bound(input);
        if (writer) {
            writer->row("wilson_lower_bound", bound);
            writer->row("wilson_time", input.time());
        }
        summary << "wilson = " << csv_double(bound) << " at t = " << csv_double(input.time()) << "  ";
        any = true;
    }
    if (!std::isnan(star_c)) {
        const double bound = star_lower_bound(star_c);
        if (writer) writer->row("star_lower_bound", bound);
        summary << "star = " << csv_double(bound) << "  ";
        any = true;
    }
    if (!std::isnan(dgm_alpha)) {
        const double limit = dgm_limit(dgm_alpha);
        if (writer) writer->row("dgm_limit", limit);
        summary << "dgm = " << csv_double(limit) << "  ";
        any = true;
    }
    if (!any) throw std::runtime_error("bounds: nothing requested");
    std::cout << summary.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy voter model mixing toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::size_t samples = 100000;
    int threads = 0;
    std::string out;

    auto add_common = [&](CLI::App* cmd, bool stochastic) {
        cmd->add_option("--out", out, "CSV output path");
        if (stochastic) {
            cmd->add_option("--seed", seed, "master seed (default 0)");
            cmd->add_option("--samples", samples, "Monte Carlo samples (default 1e5)");
            cmd->add_option("--threads", threads, "worker threads (default: all cores)");
        }
    };

    // exact
    KernelOptions exact_kernel;
    double exact_tmix = -1.0, exact_evolve_t = -1.0;
    std::vector<double> exact_grid;
    std::string exact_from = "allones";
    bool exact_stationary = false;
    auto* exact_cmd = app.add_subcommand("exact", "exact transient/stationary solves and d(t)");
    exact_kernel.attach(exact_cmd);
    add_common(exact_cmd, false);
    exact_cmd->add_option("--tmix", exact_tmix, "exact epsilon-mixing time");
    exact_cmd->add_option("--profile", exact_grid, "time grid for d(t)/dbar(t)")->delimiter(',');
    exact_cmd->add_option("--evolve", exact_evolve_t, "evolve a point mass to time t");
    exact_cmd->add_option("--from", exact_from, "initial state: allones|allzeros|index");
    exact_cmd->add_flag("--stationary", exact_stationary, "stationary distribution (default)");

    // simulate
    KernelOptions sim_kernel;
    double sim_t = 1.0;
    std::string sim_from = "allones", sim_method = "graphical", sim_dump;
    bool sim_compare = false;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo runs of the process");
    sim_kernel.attach(sim_cmd);
    add_common(sim_cmd, true);
    sim_cmd->add_option("--t", sim_t, "horizon");
    sim_cmd->add_option("--from", sim_from, "initial state: allones|allzeros|index");
    sim_cmd->add_option("--method", sim_method, "graphical|gillespie")
        ->check(CLI::IsMember({"graphical", "gillespie"}));
    sim_cmd->add_flag("--compare-exact", sim_compare, "TV of the empirical law vs exact evolve");
    sim_cmd->add_option("--dump-events", sim_dump, "write one event log (site,kind,time,aux)");

    // dual-check
    KernelOptions dual_kernel;
    double dual_t = 1.0;
    std::string dual_forest;
    auto* dual_cmd = app.add_subcommand("dual-check", "duality vs forward construction checks");
    dual_kernel.attach(dual_cmd);
    add_common(dual_cmd, true);
    dual_cmd->add_option("--t", dual_t, "horizon");
    dual_cmd->add_option("--export-forest", dual_forest, "write one coalescence forest CSV");

    // cutoff-profile
    std::string profile_family = "cycle";
    std::vector<int> profile_sizes;
    std::vector<double> profile_alphas;
    auto* profile_cmd = app.add_subcommand("cutoff-profile", "lower/upper cutoff window curves");
    add_common(profile_cmd, true);
    profile_cmd->add_option("--family", profile_family, "cycle|star|complete");
    profile_cmd->add_option("--sizes", profile_sizes, "family sizes")->delimiter(',')->required();
    profile_cmd->add_option("--alphas", profile_alphas, "window offsets")->delimiter(',')->required();

    // star
    int star_n = 100;
    double star_t = -1.0, star_tmix = -1.0;
    std::vector<double> star_grid;
    bool star_lift = false;
    auto* star_cmd = app.add_subcommand("star", "reduced n-star chain mixing from all-ones");
    add_common(star_cmd, false);
    star_cmd->add_option("--n", star_n, "leaf count (even)")->required();
    star_cmd->add_option("--t", star_t, "single time point");
    star_cmd->add_option("--tmix", star_tmix, "epsilon for t_mix from all-ones");
    star_cmd->add_option("--grid", star_grid, "time grid")->delimiter(',');
    star_cmd->add_flag("--lift-check", star_lift, "compare against the full system (n <= 8)");

    // channel-check
    int channel_grid = 5;
    std::string channel_tree;
    auto* channel_cmd = app.add_subcommand("channel-check", "stringy-tree channel verification");
    add_common(channel_cmd, false);
    channel_cmd->add_option("--grid", channel_grid, "grid resolution per theta axis (default 5)");
    channel_cmd->add_option("--tree", channel_tree,
                            "noisy-tree edge list (parent child theta); checks stringy domination");

    // ising-check
    int ising_min = 3, ising_max = 10;
    std::vector<double> ising_betas{0.0, 0.25, 0.5, 1.0, 2.0};
    auto* ising_cmd = app.add_subcommand("ising-check", "heat-bath Ising vs scaled voter generator");
    add_common(ising_cmd, false);
    ising_cmd->add_option("--n-min", ising_min, "smallest cycle length");
    ising_cmd->add_option("--n-max", ising_max, "largest cycle length");
    ising_cmd->add_option("--betas", ising_betas, "inverse temperatures")->delimiter(',');

    // bounds
    double bounds_wilson_n = 0.0, bounds_wilson_qmax = 0.0, bounds_wilson_rho = 1.0;
    double bounds_wilson_alpha = 1.0;
    double bounds_star_c = std::nan(""), bounds_dgm_alpha = std::nan("");
    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bound calculators");
    add_common(bounds_cmd, false);
    bounds_cmd->add_option("--wilson-n", bounds_wilson_n, "site count for the Wilson bound");
    bounds_cmd->add_option("--wilson-qmax", bounds_wilson_qmax, "q_max");
    bounds_cmd->add_option("--wilson-rho", bounds_wilson_rho, "rho");
    bounds_cmd->add_option("--wilson-alpha", bounds_wilson_alpha, "alpha");
    bounds_cmd->add_option("--star-c", bounds_star_c, "C for the star bound e^C/(48+e^C)");
    bounds_cmd->add_option("--dgm-alpha", bounds_dgm_alpha, "alpha for the hypercube limit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (exact_cmd->parsed())
            return run_exact(exact_kernel, out, exact_tmix, exact_grid, exact_evolve_t, exact_from,
                             exact_stationary);
        if (sim_cmd->parsed())
            return run_simulate(sim_kernel, out, sim_t, sim_from, sim_method, samples, seed, threads,
                                sim_compare, sim_dump);
        if (dual_cmd->parsed())
            return run_dual_check(dual_kernel, out, dual_t, samples, seed, dual_forest);
        if (profile_cmd->parsed())
            return run_cutoff_profile(profile_family, profile_sizes, profile_alphas, samples, seed,
                                      threads, out);
        if (star_cmd->parsed())
            return run_star(star_n, star_t, star_tmix, star_grid, star_lift, out);
        if (channel_cmd->parsed()) return run_channel_check(channel_grid, channel_tree, out);
        if (ising_cmd->parsed()) return run_ising_check(ising_min, ising_max, ising_betas, out);
        if (bounds_cmd->parsed())
            return run_bounds(bounds_wilson_n, bounds_wilson_qmax, bounds_wilson_rho,
                              bounds_wilson_alpha, bounds_star_c, bounds_dgm_alpha, out);
    } catch (const std::exception& e) {
        std::cerr << "votermix: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
