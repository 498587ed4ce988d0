#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "alox/structure.hpp"

namespace alox {

/// Al metal covered by a rock-salt-like oxide on a simple cubic grid. Al grid
/// sites are turned into O until N_O / N_Al hits `target_x`, and hydrogens
/// sit 0.97 A above randomly chosen top-layer O atoms.
struct slab_options {
    int lateral_sites = 18;       // oxide grid sites per lateral axis (even)
    double lateral_length = 34.17; // A
    int oxide_layers = 5;
    int metal_layers = 4;
    double cell_height = 40.0;
    double target_x = 1.25;
    std::size_t hydrogens = 0;
    double jitter = 0.02; // uniform positional noise amplitude, A
};

struct slab_census {
    std::size_t oxide_al;
    std::size_t oxide_o;
};

// Oxide composition a slab built with these options will have.
slab_census oxide_census(const slab_options& opt);

atomic_structure make_oxide_slab(const slab_options& opt, std::uint64_t seed);

/// Per-sample H counts, each the floor or ceiling of the count that gives
/// `target_percent` at.% H on top of `oxide_atoms`, mixed so the ensemble
/// mean of the at.% tracks the target.
std::vector<std::size_t> ensemble_h_counts(std::size_t samples, std::size_t oxide_atoms,
                                           double target_percent);

} // namespace alox
