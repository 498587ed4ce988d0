#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "alox/config.hpp"
#include "alox/errors.hpp"
#include "alox/pipeline.hpp"
#include "alox/synth.hpp"

namespace fs = std::filesystem;
using namespace alox;

namespace {

struct global_flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

pipeline_config load(const global_flags& g) {
    pipeline_config c = g.config.empty() ? pipeline_config{} : load_config(g.config);
    if (!g.out.empty()) c.out = g.out;
    if (g.seed) c.seed = *g.seed;
    c.threads = resolve_threads(g.threads, c.threads);
    return c;
}

void print_artifacts(const fs::path& out, const std::vector<std::string>& files) {
    for (const auto& f : files) std::cout << (out / f).string() << '\n';
}

template <class Body>
int guarded(Body&& body) {
    try {
        return body();
    } catch (const numerical_error& e) {
        std::cerr << "alox: numerical error: " << e.what() << '\n';
        if (const auto* c = dynamic_cast<const calibration_error*>(&e))
            std::cerr << "alox: T(lower bound) = " << fmt12(c->t_at_lower())
                      << ", T(upper bound) = " << fmt12(c->t_at_upper()) << '\n';
        return exit_numerical_error;
    } catch (const std::exception& e) {
        std::cerr << "alox: " << e.what() << '\n';
        return exit_input_error;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hydrogen contamination analysis for Al/AlOx/Al Josephson junctions"};
    app.require_subcommand(1);
    app.fallthrough();

    global_flags g;
    app.add_option("--config", g.config, "Sectioned key = value configuration file");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--threads", g.threads, "Worker threads (overrides ALOX_THREADS)");

    int rc = exit_ok;

    auto* fit_cmd = app.add_subcommand("fit-stats", "Fit a beta-binomial to hydrogen counts");
    std::string counts_path, fit_structures, trials_spec;
    fit_cmd->add_option("--counts", counts_path, "One count per line, or CSV with an n_h column");
    fit_cmd->add_option("--structures", fit_structures, "Directory of XYZ structures to count H in");
    fit_cmd->add_option("--m", trials_spec, "fixed=M | scan | scan=LO..HI");
    fit_cmd->callback([&] {
        rc = guarded([&] {
            auto c = load(g);
            if (!trials_spec.empty()) c.trials = parse_trials(trials_spec);
            if (!counts_path.empty()) c.counts = counts_path;
            if (!fit_structures.empty()) c.structures = fit_structures;
            std::vector<int> counts;
            if (!c.counts.empty()) {
                counts = read_counts_file(c.counts);
            } else if (!c.structures.empty()) {
                for (const auto& s : analyze_directory(c.structures, c.analysis, c.threads).samples)
                    counts.push_back(static_cast<int>(s.counts.n_h));
            } else {
                throw config_error("fit-stats needs --counts or --structures");
            }
            if (counts.size() < 2) throw config_error("fit-stats needs at least two samples");
            const auto f = fit({counts, c.ej.params.md_area}, c.trials);
            print_artifacts(c.out, write_fit(f, counts, c.out));
            if (!f.converged) {
                std::cerr << "alox: fit did not converge after " << f.iterations << " iterations (gradient norm "
                          << fmt12(f.gradient_norm) << ")\n";
                return exit_numerical_error;
            }
            return exit_ok;
        });
    });

    auto* analyze_cmd = app.add_subcommand("analyze", "Stoichiometry and H motif statistics");
    std::string analyze_structures;
    analyze_cmd->add_option("--structures", analyze_structures, "Directory of XYZ structures");
    analyze_cmd->callback([&] {
        rc = guarded([&] {
            auto c = load(g);
            if (!analyze_structures.empty()) c.structures = analyze_structures;
            const auto r = analyze_directory(c.structures, c.analysis, c.threads);
            for (const auto& f : r.failures) std::cerr << "alox: warning: skipped " << f.name << ": " << f.error << '\n';
            print_artifacts(c.out, write_analysis(r, c.out));
            return exit_ok;
        });
    });

    auto* tx_cmd = app.add_subcommand("transmission", "Calibrated JJ / JJ-H transmission curves");
    std::optional<std::size_t> grid;
    tx_cmd->add_option("--grid", grid, "Energy grid points")->check(CLI::Range(2, 10000000));
    tx_cmd->callback([&] {
        rc = guarded([&] {
            auto c = load(g);
            if (grid) c.transport.grid_points = *grid;
            print_artifacts(c.out, write_transmission(run_transmission(c.transport, c.threads), c.out));
            return exit_ok;
        });
    });

    auto* ej_cmd = app.add_subcommand("ej", "Josephson-energy distribution");
    std::string upstream;
    std::optional<double> t_jj, t_jjh, alpha, beta;
    std::optional<int> trials;
    ej_cmd->add_option("--from", upstream, "Directory holding fit.json and calibration.json (default: --out)");
    ej_cmd->add_option("--t-jj", t_jj, "Pristine patch transmission T0(E_F)");
    ej_cmd->add_option("--t-jjh", t_jjh, "Hydrogenated patch transmission T0(E_F)");
    ej_cmd->add_option("--alpha", alpha);
    ej_cmd->add_option("--beta", beta);
    ej_cmd->add_option("--trials", trials);
    ej_cmd->callback([&] {
        rc = guarded([&] {
            auto c = load(g);
            if (t_jj) c.ej.t_jj = t_jj;
            if (t_jjh) c.ej.t_jjh = t_jjh;
            if (alpha) c.ej.alpha = alpha;
            if (beta) c.ej.beta = beta;
            if (trials) c.ej.trials = trials;
            const fs::path from = upstream.empty() ? c.out : fs::path(upstream);
            const auto r = run_ej(resolve_ej_inputs(c.ej, from), c.ej.params);
            print_artifacts(c.out, write_ej(r, c.out));
            std::cerr << "E_J/h = " << fmt12(r.dist.mean_ghz) << " +- " << fmt12(r.dist.std_ghz) << " GHz\n";
            return exit_ok;
        });
    });

    auto* pipe_cmd = app.add_subcommand("pipeline", "analyze, fit-stats, transmission and ej in order");
    pipe_cmd->callback([&] {
        rc = guarded([&] {
            const auto c = load(g);
            const auto stages = run_pipeline(c, c.threads);
            for (const auto& s : stages) {
                std::cerr << s.name << ": " << s.status;
                if (!s.error.empty()) std::cerr << " (" << s.error << ")";
                std::cerr << '\n';
                if (s.status == "failed") return s.exit_code;
            }
            std::cout << (c.out / "manifest.json").string() << '\n';
            return exit_ok;
        });
    });

    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic oxide slabs for demos and tests");
    std::size_t samples = 10;
    slab_options slab;
    double s_alpha = 17.69, s_beta = 15.36;
    int s_trials = 40;
    synth_cmd->add_option("--samples", samples, "Number of structures")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--lateral", slab.lateral_sites, "Oxide grid sites per lateral axis (even)");
    synth_cmd->add_option("--length", slab.lateral_length, "Lateral cell length, A");
    synth_cmd->add_option("--layers", slab.oxide_layers, "Oxide layers");
    synth_cmd->add_option("--alpha", s_alpha, "H count distribution alpha");
    synth_cmd->add_option("--beta", s_beta, "H count distribution beta");
    synth_cmd->add_option("--trials", s_trials, "H count distribution M");
    synth_cmd->callback([&] {
        rc = guarded([&] {
            const auto c = load(g);
            const auto counts = sample(beta_binomial(s_alpha, s_beta, s_trials), c.seed, samples);
            fs::create_directories(c.out);
            for (std::size_t i = 0; i < samples; ++i) {
                auto opt = slab;
                opt.hydrogens = static_cast<std::size_t>(counts[i]);
                const auto s = make_oxide_slab(opt, c.seed * 1000003ULL + i);
                char name[32];
                std::snprintf(name, sizeof name, "sample_%04zu.xyz", i);
                std::ofstream out(c.out / name);
                write_xyz(out, s, "seed=" + std::to_string(c.seed));
                if (!out) throw config_error("cannot write " + (c.out / name).string());
            }
            std::cout << c.out.string() << '\n';
            return exit_ok;
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input_error;
    }
    return rc;
}
