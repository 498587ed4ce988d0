#pragma once

#include <string_view>
#include <vector>

#include "alox/stats.hpp"

namespace alox {

// GHz always means E/h.
enum class energy_unit { mev, ghz, joule };

energy_unit energy_unit_from_string(std::string_view name);
double convert_energy(double value, energy_unit from, energy_unit to);

/// Junction geometry and gap. Areas in A^2, gap in meV.
struct junction_params {
    double gap_mev = 0.20;
    double area = 200.0 * 200.0 * 100.0; // 200 x 200 nm^2
    double patch_area = 9.61 * 8.32;     // cross-section of the transport cell
    double md_area = 34.17 * 34.17;      // cross-section of the MD cell
};

void validate(const junction_params& p);

/// E_J / h in GHz from the Fermi-level transmission. With `per_patch` the
/// transmission belongs to one patch of patch_area and is scaled to the full
/// junction area.
double ej_single(double transmission, const junction_params& p, bool per_patch = true);

/// Landauer normal-state resistance h / (2 e^2 T), ohm.
double normal_resistance(double transmission);

/// Ambegaokar-Baratoff critical current pi Delta / (2 e R_N), ampere.
double ambegaokar_baratoff(double gap_mev, double resistance_ohm);

/// I_c = (2e / hbar) E_J, with E_J / h given in GHz. Ampere.
double critical_current(double ej_ghz);

/// E_J / h in GHz from a critical current in ampere.
double ej_from_current(double current_a);

/// Parallel-patch mixture: N patches of patch_area carry E_JJH, the rest E_JJ.
/// The weight N A0 / A is applied as written, also beyond 1.
double mixed_ej(double n_patches, const junction_params& p, double ej_pristine, double ej_hydrogen);

/// Linear map n -> offset + slope n from the H count in the MD cell to E_J.
struct ej_transform {
    double slope;  // GHz per H atom in the MD reference area
    double offset; // GHz
};

struct ej_point {
    double ej_ghz;
    double probability;
};

struct ej_distribution {
    beta_binomial counts;
    ej_transform transform;
    double mean_ghz;
    double std_ghz;
    std::vector<ej_point> pmf; // n = 0..M, in count order
};

ej_distribution make_ej_distribution(const beta_binomial& counts, const junction_params& p,
                                     double ej_pristine, double ej_hydrogen);

} // namespace alox
