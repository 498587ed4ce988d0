#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alox/config.hpp"
#include "alox/josephson.hpp"
#include "alox/motifs.hpp"
#include "alox/stats.hpp"
#include "alox/transport.hpp"

namespace alox {

// Stable process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 2;
inline constexpr int exit_numerical_error = 3;

/// Formats with 12 significant digits; emitted data files use this everywhere
/// so reruns are byte-identical.
std::string fmt12(double v);

struct sample_analysis {
    std::string name;
    composition counts;
    double x = 0.0;
    double h_atomic_percent = 0.0;
    std::vector<motif_record> motifs;
};

struct analysis_failure {
    std::string name;
    std::string error;
};

struct analysis_report {
    std::vector<sample_analysis> samples; // sorted by file name
    std::vector<analysis_failure> failures;
    motif_ensemble_stats motifs;
};

sample_analysis analyze_structure(const std::string& name, const atomic_structure& s,
                                  const analysis_config& cfg);

/// Structure files (*.xyz, *.extxyz) in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_structures(const std::filesystem::path& dir);

/// Parses and analyzes every structure in parallel. Unparseable files are
/// reported in `failures`; if none parse, throws config_error.
analysis_report analyze_directory(const std::filesystem::path& dir, const analysis_config& cfg,
                                  unsigned threads);

/// Writes stoichiometry.csv, stoichiometry_summary.json, motifs.csv and
/// motif_table.json; returns their file names.
std::vector<std::string> write_analysis(const analysis_report& r, const std::filesystem::path& out);

std::vector<int> read_counts_file(const std::filesystem::path& path);

/// Writes fit.json and histogram.csv.
std::vector<std::string> write_fit(const fit_result& f, const std::vector<int>& counts,
                                   const std::filesystem::path& out);

struct transmission_report {
    junction_model jj;
    junction_model jjh;
    calibration_result height;
    calibration_result shift;
    double conduction_edge_ev;
    curve_shift_fit curve_shift;
    transmission_curve curve_jj;
    transmission_curve curve_jjh;
};

transmission_report run_transmission(const transport_config& cfg, unsigned threads);

/// Writes transmission_jj.csv, transmission_jjh.csv and calibration.json.
std::vector<std::string> write_transmission(const transmission_report& r, const std::filesystem::path& out);

struct ej_inputs {
    beta_binomial counts;
    double t_jj;
    double t_jjh;
};

struct ej_report {
    ej_inputs inputs;
    double ej_jj_ghz;
    double ej_jjh_ghz;
    ej_distribution dist;
};

ej_report run_ej(const ej_inputs& in, const junction_params& params);

/// Writes ej_report.json and ej_pmf.csv.
std::vector<std::string> write_ej(const ej_report& r, const std::filesystem::path& out);

/// Resolves E_J inputs: inline [junction] values win, otherwise fit.json and
/// calibration.json in `upstream`. Throws config_error when something is missing.
ej_inputs resolve_ej_inputs(const ej_config& cfg, const std::filesystem::path& upstream);

struct stage_status {
    std::string name;
    std::string status; // completed | failed | skipped
    std::vector<std::string> artifacts;
    std::string error;
    int exit_code = exit_ok;
};

/// analyze -> fit-stats -> transmission -> ej. The first failing stage marks
/// every later stage skipped. Writes manifest.json and returns the stages.
std::vector<stage_status> run_pipeline(const pipeline_config& cfg, unsigned threads);

} // namespace alox
