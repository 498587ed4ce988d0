#include "alox/josephson.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "alox/constants.hpp"
#include "alox/errors.hpp"

namespace alox {

using namespace constants;

energy_unit energy_unit_from_string(std::string_view name) {
    if (name == "meV" || name == "mev") return energy_unit::mev;
    if (name == "GHz" || name == "ghz") return energy_unit::ghz;
    if (name == "J" || name == "j") return energy_unit::joule;
    throw domain_error("unknown energy unit '" + std::string(name) + "'");
}

namespace {

double to_joule(double v, energy_unit u) {
    switch (u) {
    case energy_unit::mev: return v * 1e-3 * elementary_charge;
    case energy_unit::ghz: return v * 1e9 * planck;
    case energy_unit::joule: return v;
    }
    throw domain_error("unknown energy unit");
}

double from_joule(double v, energy_unit u) {
    switch (u) {
    case energy_unit::mev: return v / (1e-3 * elementary_charge);
    case energy_unit::ghz: return v / (1e9 * planck);
    case energy_unit::joule: return v;
    }
    throw domain_error("unknown energy unit");
}

} // namespace

double convert_energy(double value, energy_unit from, energy_unit to) {
    if (from == to) return value;
    return from_joule(to_joule(value, from), to);
}

void validate(const junction_params& p) {
    if (!(p.gap_mev > 0.0) || !(p.area > 0.0) || !(p.patch_area > 0.0) || !(p.md_area > 0.0))
        throw domain_error("junction parameters must be positive");
}

double ej_single(double transmission, const junction_params& p, bool per_patch) {
    if (transmission < 0.0) throw domain_error("ej_single: transmission must be non-negative");
    validate(p);
    const double t = per_patch ? transmission * p.area / p.patch_area : transmission;
    return convert_energy(p.gap_mev / 4.0, energy_unit::mev, energy_unit::ghz) * t;
}

double normal_resistance(double transmission) {
    if (!(transmission > 0.0)) throw domain_error("normal_resistance: zero transmission means infinite resistance");
    return planck / (2.0 * elementary_charge * elementary_charge * transmission);
}

double ambegaokar_baratoff(double gap_mev, double resistance_ohm) {
    const double gap_j = convert_energy(gap_mev, energy_unit::mev, energy_unit::joule);
    return std::numbers::pi * gap_j / (2.0 * elementary_charge * resistance_ohm);
}

double critical_current(double ej_ghz) {
    if (ej_ghz < 0.0) throw domain_error("critical_current: E_J must be non-negative");
    return 2.0 * elementary_charge / reduced_planck * convert_energy(ej_ghz, energy_unit::ghz, energy_unit::joule);
}

double ej_from_current(double current_a) {
    return convert_energy(reduced_planck / (2.0 * elementary_charge) * current_a, energy_unit::joule,
                          energy_unit::ghz);
}

double mixed_ej(double n_patches, const junction_params& p, double ej_pristine, double ej_hydrogen) {
    if (n_patches < 0.0) throw domain_error("mixed_ej: patch count must be non-negative");
    validate(p);
    const double covered = n_patches * p.patch_area;
    return (p.area - covered) * ej_pristine / p.area + covered * ej_hydrogen / p.area;
}

ej_distribution make_ej_distribution(const beta_binomial& counts, const junction_params& p,
                                     double ej_pristine, double ej_hydrogen) {
    validate(p);
    // N = (A / A1) n patches, so E_J is linear in n
    const ej_transform tr{p.patch_area / p.md_area * (ej_hydrogen - ej_pristine), ej_pristine};
    ej_distribution d{counts, tr, tr.offset + tr.slope * mean(counts), std::abs(tr.slope) * stddev(counts), {}};
    const auto probs = pmf_table(counts);
    d.pmf.reserve(probs.size());
    for (std::size_t n = 0; n < probs.size(); ++n)
        d.pmf.push_back({tr.offset + tr.slope * static_cast<double>(n), probs[n]});
    return d;
}

} // namespace alox
