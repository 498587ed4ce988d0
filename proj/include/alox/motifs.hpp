#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "alox/structure.hpp"

namespace alox {

enum class motif_class {
    al_oh,
    al_oh_al,
    al_h2o,
    al_o2_h,
    al_h,
    al_h_al,
    al_h_o,
    interstitial,
    al_o_h_o_al,
};

inline constexpr std::size_t motif_class_count = 9;

inline constexpr std::array<motif_class, motif_class_count> all_motif_classes{
    motif_class::al_oh,   motif_class::al_oh_al, motif_class::al_h2o,
    motif_class::al_o2_h, motif_class::al_h,     motif_class::al_h_al,
    motif_class::al_h_o,  motif_class::interstitial, motif_class::al_o_h_o_al,
};

std::string_view to_string(motif_class c);
motif_class motif_class_from_string(std::string_view label);

struct motif_record {
    std::size_t h_index;
    motif_class kind;
    std::vector<std::size_t> host_o;
    std::vector<std::size_t> host_al;
    bool surface = false;
};

struct motif_options {
    // H-O distance up to which a hydrogen with no covalent O partner still
    // counts as touching an O (Al-H-O).
    double h_o_long_cutoff = 2.0;
};

/// Classifies hydrogen `h`. The graph must have been built with Al-O, O-H,
/// O-O and Al-H cutoffs. `surface` is the sorted output of surface_sites; the
/// record is flagged when h or one of its host O atoms is a surface site.
///
/// Decision order:
///   - two or more bonded O, each bonded to Al: Al-O-H-O-Al
///   - otherwise any bonded O: the nearest one hosts a hydroxyl-type motif
///     (Al-OH, Al-OH-Al, Al-H2O, Al-O2-H by that O's Al/H/O partners; an O
///     with no Al gives interstitial)
///   - no O but bonded Al: Al-H-O when some O lies within h_o_long_cutoff,
///     else Al-H or Al-H-Al by the Al count
///   - nothing bonded: interstitial
motif_record classify_h(const atomic_structure& s, const bond_graph& g, std::size_t h,
                        const std::vector<std::size_t>& surface = {},
                        const motif_options& options = {});

/// Classifies every H atom in index order.
std::vector<motif_record> classify_all(const atomic_structure& s, const bond_graph& g,
                                       const std::vector<std::size_t>& surface = {},
                                       const motif_options& options = {});

struct motif_class_stats {
    double mean_percent = 0.0;
    double std_percent = 0.0;
    // pooled over samples: surface-flagged / total of this class; 0 when the class never occurs
    double surface_probability = 0.0;
    std::size_t total = 0;
    std::size_t surface = 0;
};

struct motif_ensemble_stats {
    std::array<motif_class_stats, motif_class_count> classes{};
    std::size_t samples = 0;
    // samples without any H carry no percentages and are left out of mean/std
    std::size_t samples_without_h = 0;

    const motif_class_stats& operator[](motif_class c) const {
        return classes[static_cast<std::size_t>(c)];
    }
};

/// Per-sample class percentages averaged over samples (population standard
/// deviation) plus pooled surface probabilities.
motif_ensemble_stats motif_statistics(const std::vector<std::vector<motif_record>>& samples);

} // namespace alox
