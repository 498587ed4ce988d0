#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "alox/josephson.hpp"
#include "alox/motifs.hpp"
#include "alox/stats.hpp"
#include "alox/structure.hpp"
#include "alox/transport.hpp"

namespace alox {

struct analysis_config {
    cutoff_table cutoffs = cutoff_table::defaults();
    double oxide_padding = 0.5;
    double surface_delta = 2.0;
    double surface_bin = 4.0;
    motif_options motif;
};

struct transport_config {
    junction_model model = standin_model(12);
    std::size_t grid_points = 2001;
    double window = 5.0; // grid spans E_F +- window, eV
    double target_jj = 1.61e-5;
    double target_jjh = 1.74e-5;
    // barrier on-site bracket relative to E_F; unset means 2|t_b| + [0.5, 10] eV
    std::optional<std::pair<double, double>> height_bounds;
    std::pair<double, double> shift_bounds{-2.0, 0.0};
    std::pair<double, double> fit_window{-1.0, 1.0}; // relative to E_F
    double rel_tol = 1e-6;

    std::pair<double, double> resolved_height_bounds() const;
};

struct ej_config {
    junction_params params;
    std::optional<double> t_jj;
    std::optional<double> t_jjh;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<int> trials;
};

struct pipeline_config {
    std::filesystem::path structures;
    std::filesystem::path counts;
    std::filesystem::path out = "alox-out";
    std::uint64_t seed = 1;
    unsigned threads = 1;
    trials_strategy trials = scan_trials{};
    analysis_config analysis;
    transport_config transport;
    ej_config ej;
};

/// Parses `fixed=40`, `scan`, or `scan=LO..HI`.
trials_strategy parse_trials(const std::string& text);

/// Sectioned key = value file (INI style). Relative paths resolve against the
/// file's directory. Unknown sections or keys raise config_error.
pipeline_config load_config(const std::filesystem::path& path);
pipeline_config parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

// Thread count: explicit value if non-zero, else ALOX_THREADS, else fallback.
unsigned resolve_threads(unsigned requested, unsigned fallback);

} // namespace alox
