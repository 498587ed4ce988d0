#include "alox/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "alox/errors.hpp"
#include "alox/parallel.hpp"

namespace alox {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

ordered_json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(fmt12(v));
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("missing upstream artifact " + path.string());
    try {
        return ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw config_error("cannot parse " + path.string() + ": " + e.what());
    }
}

struct moments {
    double mean = 0.0;
    double std = 0.0;
};

moments population_moments(const std::vector<double>& v) {
    moments m;
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(var / static_cast<double>(v.size()));
    return m;
}

} // namespace

sample_analysis analyze_structure(const std::string& name, const atomic_structure& s, const analysis_config& cfg) {
    const auto g = neighbor_graph(s, cfg.cutoffs);
    const auto region = find_oxide_region(s, g, cfg.oxide_padding);
    const auto st = stoichiometry(region);
    const auto surface = surface_sites(s, region, cfg.surface_delta, cfg.surface_bin);
    return {name, region.counts, st.x, st.h_atomic_percent, classify_all(s, g, surface, cfg.motif)};
}

std::vector<fs::path> list_structures(const fs::path& dir) {
    if (dir.empty()) throw config_error("no structure directory given (--structures or [paths] structures)");
    if (!fs::is_directory(dir)) throw config_error("structure directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".xyz" || ext == ".extxyz") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

analysis_report analyze_directory(const fs::path& dir, const analysis_config& cfg, unsigned threads) {
    const auto files = list_structures(dir);
    if (files.empty()) throw config_error("no structure files in " + dir.string());

    std::vector<std::optional<sample_analysis>> results(files.size());
    std::vector<std::string> errors(files.size());
    parallel_for(files.size(), threads, [&](std::size_t i) {
        const auto name = files[i].stem().string();
        try {
            results[i] = analyze_structure(name, read_xyz_file(files[i].string()), cfg);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    analysis_report r;
    std::vector<std::vector<motif_record>> motifs;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (results[i]) {
            motifs.push_back(results[i]->motifs);
            r.samples.push_back(std::move(*results[i]));
        } else {
            r.failures.push_back({files[i].filename().string(), errors[i]});
        }
    }
    if (r.samples.empty()) throw config_error("none of the " + std::to_string(files.size()) + " structure files could be analyzed");
    r.motifs = motif_statistics(motifs);
    return r;
}

std::vector<std::string> write_analysis(const analysis_report& r, const fs::path& out) {
    std::string csv = "sample,n_al,n_o,n_h,x,h_atpct\n";
    std::string mcsv = "sample,h_index,class,surface\n";
    std::vector<double> xs, hs, nh;
    for (const auto& s : r.samples) {
        csv += s.name + "," + std::to_string(s.counts.n_al) + "," + std::to_string(s.counts.n_o) + "," +
               std::to_string(s.counts.n_h) + "," + fmt12(s.x) + "," + fmt12(s.h_atomic_percent) + "\n";
        xs.push_back(s.x);
        hs.push_back(s.h_atomic_percent);
        nh.push_back(static_cast<double>(s.counts.n_h));
        for (const auto& m : s.motifs)
            mcsv += s.name + "," + std::to_string(m.h_index) + "," + std::string(to_string(m.kind)) + "," +
                    (m.surface ? "1" : "0") + "\n";
    }
    write_text(out / "stoichiometry.csv", csv);
    write_text(out / "motifs.csv", mcsv);

    const auto mx = population_moments(xs);
    const auto mh = population_moments(hs);
    const auto mn = population_moments(nh);
    ordered_json summary;
    summary["samples"] = r.samples.size();
    summary["x_mean"] = num(mx.mean);
    summary["x_std"] = num(mx.std);
    summary["h_atpct_mean"] = num(mh.mean);
    summary["h_atpct_std"] = num(mh.std);
    summary["n_h_mean"] = num(mn.mean);
    summary["n_h_std"] = num(mn.std);
    summary["failures"] = ordered_json::array();
    for (const auto& f : r.failures) summary["failures"].push_back({{"file", f.name}, {"error", f.error}});
    write_json(out / "stoichiometry_summary.json", summary);

    ordered_json table;
    ordered_json classes;
    for (auto c : all_motif_classes) {
        const auto& cs = r.motifs[c];
        classes[std::string(to_string(c))] = {{"mean_pct", num(cs.mean_percent)},
                                              {"std_pct", num(cs.std_percent)},
                                              {"surface_prob", num(cs.surface_probability)},
                                              {"count", cs.total}};
    }
    table["classes"] = classes;
    table["samples"] = r.motifs.samples;
    table["samples_without_h"] = r.motifs.samples_without_h;
    table["std_convention"] = "population";
    table["surface_probability"] = "pooled";
    write_json(out / "motif_table.json", table);
    return {"stoichiometry.csv", "stoichiometry_summary.json", "motifs.csv", "motif_table.json"};
}

std::vector<int> read_counts_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open count file " + path.string());
    return read_counts(in);
}

std::vector<std::string> write_fit(const fit_result& f, const std::vector<int>& counts, const fs::path& out) {
    ordered_json j;
    j["alpha"] = num(f.dist.alpha());
    j["beta"] = num(f.dist.beta());
    j["M"] = f.dist.trials();
    j["log_likelihood"] = num(f.log_likelihood);
    j["mean"] = num(mean(f.dist));
    j["std"] = num(stddev(f.dist));
    j["converged"] = f.converged;
    j["iterations"] = f.iterations;
    j["gradient_norm"] = num(f.gradient_norm);
    j["samples"] = counts.size();
    write_json(out / "fit.json", j);

    std::vector<int> observed(static_cast<std::size_t>(f.dist.trials()) + 1, 0);
    for (int c : counts)
        if (c <= f.dist.trials()) ++observed[static_cast<std::size_t>(c)];
    std::string csv = "n,observed,expected\n";
    const auto p = pmf_table(f.dist);
    for (std::size_t n = 0; n < p.size(); ++n)
        csv += std::to_string(n) + "," + std::to_string(observed[n]) + "," +
               fmt12(p[n] * static_cast<double>(counts.size())) + "\n";
    write_text(out / "histogram.csv", csv);
    return {"fit.json", "histogram.csv"};
}

transmission_report run_transmission(const transport_config& cfg, unsigned threads) {
    const auto& base = cfg.model;
    validate(base);
    const auto height = calibrate_barrier(base, cfg.target_jj, cfg.resolved_height_bounds(), cfg.rel_tol);
    junction_model jj = base;
    std::fill(jj.barrier_onsite.begin(), jj.barrier_onsite.end(), height.value);
    jj.defects.clear();
    const auto shift = calibrate_shift(jj, cfg.target_jjh, cfg.shift_bounds, cfg.rel_tol);
    const auto jjh = apply_uniform_shift(jj, shift.value);

    const auto grid = energy_grid(base.fermi, cfg.window, cfg.grid_points);
    auto c_jj = transmission(jj, grid, threads);
    auto c_jjh = transmission(jjh, grid, threads);
    const auto fit = fit_curve_shift(c_jj, c_jjh, {base.fermi + cfg.fit_window.first, base.fermi + cfg.fit_window.second});
    return {jj, jjh, height, shift, conduction_edge(jj), fit, std::move(c_jj), std::move(c_jjh)};
}

std::vector<std::string> write_transmission(const transmission_report& r, const fs::path& out) {
    auto curve_csv = [](const transmission_curve& c) {
        std::string s = "energy_ev,transmission\n";
        for (std::size_t i = 0; i < c.energies.size(); ++i) s += fmt12(c.energies[i]) + "," + fmt12(c.values[i]) + "\n";
        return s;
    };
    write_text(out / "transmission_jj.csv", curve_csv(r.curve_jj));
    write_text(out / "transmission_jjh.csv", curve_csv(r.curve_jjh));

    ordered_json j;
    j["barrier_height_ev"] = num(r.height.value);
    j["conduction_edge_ev"] = num(r.conduction_edge_ev);
    j["t_jj"] = num(r.height.transmission);
    j["defect_shift_ev"] = num(r.shift.value);
    j["t_jjh"] = num(r.shift.transmission);
    j["curve_shift_ev"] = num(r.curve_shift.shift_ev);
    j["curve_shift_rms_log"] = num(r.curve_shift.rms_log_residual);
    j["barrier_sites"] = r.jj.barrier_onsite.size();
    j["barrier_hopping_ev"] = num(r.jj.barrier_hopping);
    j["coupling_ev"] = num(r.jj.coupling);
    j["lead_hopping_ev"] = num(r.jj.lead_hopping);
    j["fermi_ev"] = num(r.jj.fermi);
    j["eta_ev"] = num(r.jj.eta);
    j["grid_points"] = r.curve_jj.energies.size();
    write_json(out / "calibration.json", j);
    return {"transmission_jj.csv", "transmission_jjh.csv", "calibration.json"};
}

ej_report run_ej(const ej_inputs& in, const junction_params& params) {
    const double ej_jj = ej_single(in.t_jj, params);
    const double ej_jjh = ej_single(in.t_jjh, params);
    return {in, ej_jj, ej_jjh, make_ej_distribution(in.counts, params, ej_jj, ej_jjh)};
}

std::vector<std::string> write_ej(const ej_report& r, const fs::path& out) {
    ordered_json j;
    j["e_jj_ghz"] = num(r.ej_jj_ghz);
    j["e_jjh_ghz"] = num(r.ej_jjh_ghz);
    j["slope"] = num(r.dist.transform.slope);
    j["offset"] = num(r.dist.transform.offset);
    j["mean_ghz"] = num(r.dist.mean_ghz);
    j["std_ghz"] = num(r.dist.std_ghz);
    j["t_jj"] = num(r.inputs.t_jj);
    j["t_jjh"] = num(r.inputs.t_jjh);
    j["alpha"] = num(r.inputs.counts.alpha());
    j["beta"] = num(r.inputs.counts.beta());
    j["M"] = r.inputs.counts.trials();
    write_json(out / "ej_report.json", j);

    std::string csv = "ej_ghz,probability\n";
    for (const auto& p : r.dist.pmf) csv += fmt12(p.ej_ghz) + "," + fmt12(p.probability) + "\n";
    write_text(out / "ej_pmf.csv", csv);
    return {"ej_report.json", "ej_pmf.csv"};
}

ej_inputs resolve_ej_inputs(const ej_config& cfg, const fs::path& upstream) {
    std::optional<beta_binomial> counts;
    if (cfg.alpha || cfg.beta || cfg.trials) {
        if (!(cfg.alpha && cfg.beta && cfg.trials))
            throw config_error("[junction] alpha, beta and trials must be given together");
        counts = beta_binomial(*cfg.alpha, *cfg.beta, *cfg.trials);
    } else {
        const auto f = read_json(upstream / "fit.json");
        counts = beta_binomial(f.at("alpha").get<double>(), f.at("beta").get<double>(), f.at("M").get<int>());
    }
    double t_jj = 0.0, t_jjh = 0.0;
    if (cfg.t_jj && cfg.t_jjh) {
        t_jj = *cfg.t_jj;
        t_jjh = *cfg.t_jjh;
    } else {
        const auto c = read_json(upstream / "calibration.json");
        t_jj = cfg.t_jj.value_or(c.at("t_jj").get<double>());
        t_jjh = cfg.t_jjh.value_or(c.at("t_jjh").get<double>());
    }
    return {*counts, t_jj, t_jjh};
}

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const numerical_error*>(&e)) return exit_numerical_error;
    return exit_input_error;
}

} // namespace

std::vector<stage_status> run_pipeline(const pipeline_config& cfg, unsigned threads) {
    std::vector<stage_status> stages{{"analyze", "skipped", {}, {}, exit_ok},
                                     {"fit-stats", "skipped", {}, {}, exit_ok},
                                     {"transmission", "skipped", {}, {}, exit_ok},
                                     {"ej", "skipped", {}, {}, exit_ok}};
    const fs::path out = cfg.out;
    std::optional<analysis_report> analysis;

    auto run = [&](stage_status& st, auto&& body) {
        try {
            st.artifacts = body();
            st.status = "completed";
            return true;
        } catch (const std::exception& e) {
            st.status = "failed";
            st.error = e.what();
            st.exit_code = exit_code_for(e);
            return false;
        }
    };

    bool ok = run(stages[0], [&] {
        analysis = analyze_directory(cfg.structures, cfg.analysis, threads);
        return write_analysis(*analysis, out);
    });
    ok = ok && run(stages[1], [&] {
        std::vector<int> counts;
        if (!cfg.counts.empty()) {
            counts = read_counts_file(cfg.counts);
        } else {
            for (const auto& s : analysis->samples) counts.push_back(static_cast<int>(s.counts.n_h));
        }
        if (counts.size() < 2) throw config_error("fit-stats needs at least two samples");
        const auto f = fit({counts, cfg.ej.params.md_area}, cfg.trials);
        auto artifacts = write_fit(f, counts, out);
        if (!f.converged)
            throw numerical_error("beta-binomial fit did not converge (gradient norm " + fmt12(f.gradient_norm) + ")");
        return artifacts;
    });
    ok = ok && run(stages[2], [&] { return write_transmission(run_transmission(cfg.transport, threads), out); });
    ok = ok && run(stages[3], [&] { return write_ej(run_ej(resolve_ej_inputs(cfg.ej, out), cfg.ej.params), out); });

    ordered_json manifest;
    manifest["seed"] = cfg.seed;
    manifest["stages"] = ordered_json::array();
    for (const auto& st : stages) {
        ordered_json s{{"name", st.name}, {"status", st.status}, {"artifacts", st.artifacts}};
        if (!st.error.empty()) s["error"] = st.error;
        manifest["stages"].push_back(s);
    }
    write_json(out / "manifest.json", manifest);
    return stages;
}

} // namespace alox
