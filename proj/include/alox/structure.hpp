#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alox {

enum class species { Al, O, H };

std::string_view to_string(species s);
species species_from_string(std::string_view label);

using vec3 = std::array<double, 3>;

struct atom {
    species kind;
    vec3 position;
};

/// Orthorhombic simulation cell with per-axis periodicity. Lattice vectors are
/// along x, y and z with the given lengths and the origin at (0, 0, 0).
struct cell {
    vec3 lengths{};
    std::array<bool, 3> periodic{true, true, true};

    double volume() const { return lengths[0] * lengths[1] * lengths[2]; }
};

struct atomic_structure {
    cell box;
    std::vector<atom> atoms;

    std::size_t count(species s) const;
    // minimum-image displacement from atom i to atom j
    vec3 displacement(std::size_t i, std::size_t j) const;
    double distance(std::size_t i, std::size_t j) const;
};

// Throws domain_error if the cell volume is not positive or a coordinate is not finite.
void validate(const atomic_structure& s);

/// Extended XYZ: atom count, a comment line optionally carrying
/// Lattice="ax ay az bx by bz cx cy cz" (and pbc="T T F"), then rows of
/// `species x y z`. Without a lattice the cell is the bounding box padded by
/// 10 A and flagged non-periodic. Non-orthorhombic lattices are rejected.
atomic_structure parse_xyz(std::istream& in);
atomic_structure parse_xyz(const std::string& text);
atomic_structure read_xyz_file(const std::string& path);
void write_xyz(std::ostream& out, const atomic_structure& s, const std::string& comment = {});

/// Bond cutoffs per unordered species pair, in A.
class cutoff_table {
public:
    // O-H 1.2, Al-H 2.0, Al-O 2.2, O-O 1.6, Al-Al 3.0; H-H disabled (0).
    static cutoff_table defaults();

    void set(species a, species b, double cutoff);
    double get(species a, species b) const;
    double max_cutoff() const;

private:
    std::array<double, 9> values_{};
};

struct neighbor {
    std::size_t index;
    double distance;
};

/// Symmetric adjacency under the minimum-image convention. Every neighbor list
/// is sorted by atom index.
struct bond_graph {
    std::vector<std::vector<neighbor>> adjacency;

    const std::vector<neighbor>& neighbors(std::size_t i) const { return adjacency[i]; }
    std::size_t edge_count() const;
    bool bonded(std::size_t i, std::size_t j) const;
};

/// Cell-list neighbor search. Throws config_error when a cutoff is not
/// positive or reaches half of a periodic cell length.
bond_graph neighbor_graph(const atomic_structure& s, const cutoff_table& cutoffs);

struct composition {
    std::size_t n_al = 0;
    std::size_t n_o = 0;
    std::size_t n_h = 0;
};

/// Oxide layer as a z slab: from the lowest O minus padding to the highest O
/// plus padding. Members are every O, the Al atoms inside the slab, and H
/// atoms inside the slab or bonded to a member O.
struct oxide_region {
    double z_lo = 0.0;
    double z_hi = 0.0;
    std::vector<std::size_t> members;
    composition counts;
};

oxide_region find_oxide_region(const atomic_structure& s, const bond_graph& g,
                               double padding = 0.5);

struct stoichiometry_result {
    double x;          // N_O / N_Al
    double h_atomic_percent; // 100 N_H / (N_Al + N_O + N_H)
};

stoichiometry_result stoichiometry(const oxide_region& region);

/// Per lateral bin (bin x bin, in A) the local surface height is the highest
/// Al or O member; a member atom is a surface site when it lies within delta
/// of that height. Returns sorted atom indices.
std::vector<std::size_t> surface_sites(const atomic_structure& s, const oxide_region& region,
                                       double delta = 2.0, double bin = 4.0);

/// Effective exposure time when n_sim molecules stand in for n_ref.
double effective_time(double n_sim, double n_ref, double t_sim);

/// Ideal-gas molecule count N = P V / (k_B T); pressure in Pa, volume in A^3,
/// temperature in K.
double ideal_gas_count(double pressure_pa, double volume_a3, double temperature_k);

} // namespace alox
