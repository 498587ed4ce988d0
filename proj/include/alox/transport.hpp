#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace alox {

using cmatrix = Eigen::MatrixXcd;

struct site_shift {
    std::size_t site;
    double shift_ev;
};

/// Lead / barrier / lead tight-binding junction. Every principal layer holds
/// `orbitals` orbitals joined by `transverse_hopping` (open chain); layers are
/// joined orbital-to-orbital. Energies in eV.
struct junction_model {
    double lead_onsite = 0.0;
    double lead_hopping = 3.0;
    int orbitals = 1;
    double transverse_hopping = 0.0;
    std::vector<double> barrier_onsite;
    double barrier_hopping = 3.0;
    double coupling = 3.0; // lead surface layer to the first and last barrier layer
    double fermi = 0.0;
    double eta = 1e-6;
    std::vector<site_shift> defects; // shifts already folded into barrier_onsite
};

// Throws domain_error on eta <= 0, an empty barrier, or non-finite energies.
void validate(const junction_model& m);

struct lead_blocks {
    cmatrix h00;
    cmatrix h01;
};

lead_blocks make_lead_blocks(const junction_model& m);

struct surface_gf_result {
    cmatrix g;
    int iterations;
};

/// Retarded surface Green's function of a semi-infinite lead extending along
/// +h01 (layer n couples to n+1 through h01), by iterative decimation at
/// energy E + i eta. Throws numerical_error if the update norm has not fallen
/// below 1e-12 after 200 iterations.
surface_gf_result surface_green_function(const cmatrix& h00, const cmatrix& h01, double energy,
                                         double eta);

/// Number of propagating lead modes at E.
int open_channels(const junction_model& m, double energy);

/// T(E) = Tr[Gamma_L G_1N Gamma_R G_1N^dagger] via recursive Green's functions.
double transmission_at(const junction_model& m, double energy);

struct transmission_curve {
    std::vector<double> energies;
    std::vector<double> values;
    std::vector<int> channels;
};

std::vector<double> energy_grid(double center, double half_width, std::size_t points);

/// Energy points are independent and evaluated in parallel; output order
/// follows the grid.
transmission_curve transmission(const junction_model& m, const std::vector<double>& energies,
                                unsigned threads = 1);

/// Independent 1D reference: 2x2 transfer matrices plus Bloch-wave matching.
/// Requires orbitals == 1 and E strictly inside the lead band; an empty barrier
/// joins the two leads through `coupling`.
double transfer_matrix_transmission(const junction_model& m, double energy);

/// Returns a copy with `shift_ev` added to the on-site energy of each listed
/// barrier layer.
junction_model apply_defect(const junction_model& m, double shift_ev,
                            const std::vector<std::size_t>& sites);
junction_model apply_uniform_shift(const junction_model& m, double shift_ev);

struct calibration_result {
    double value;          // calibrated height (or shift)
    double transmission;   // achieved T(E_F)
    int iterations;
};

/// Bisects a uniform barrier on-site energy in [lower, upper] until T(E_F)
/// matches target within rel_tol. T must decrease over the bracket; a target
/// outside [T(upper), T(lower)] raises calibration_error.
calibration_result calibrate_barrier(const junction_model& base, double target,
                                     std::pair<double, double> bounds, double rel_tol = 1e-6);

/// Finds the uniform shift in [lower, upper] applied on top of `base` that
/// brings T(E_F) to target.
calibration_result calibrate_shift(const junction_model& base, double target,
                                   std::pair<double, double> bounds, double rel_tol = 1e-6);

struct curve_shift_fit {
    double shift_ev;  // s with T_shifted(E) ~ T_reference(E + s)
    double rms_log_residual;
    std::size_t points;
};

/// Least-squares fit of ln T_shifted(E) against ln T_reference(E + s) over
/// energies in `window`, interpolating the reference curve linearly in ln T.
curve_shift_fit fit_curve_shift(const transmission_curve& reference, const transmission_curve& shifted,
                                std::pair<double, double> window, double max_shift = 2.0);

/// Stand-in junction: lead band of half-width 2|t| with t = 3 eV centred on
/// E_F = 0, and a barrier of `sites` layers whose hopping places the
/// calibrated conduction edge near 2.85 eV above E_F.
junction_model standin_model(std::size_t sites = 12);

// Barrier conduction-band edge relative to E_F for a uniform barrier.
double conduction_edge(const junction_model& m);

} // namespace alox
