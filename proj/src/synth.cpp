#include "alox/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "alox/errors.hpp"

namespace alox {

namespace {

std::size_t converted_sites(const slab_options& opt) {
    const double sites = static_cast<double>(opt.lateral_sites) * opt.lateral_sites * opt.oxide_layers;
    return static_cast<std::size_t>(std::llround(sites * (opt.target_x - 1.0) / (2.0 * (opt.target_x + 1.0))));
}

} // namespace

slab_census oxide_census(const slab_options& opt) {
    const std::size_t sites =
        static_cast<std::size_t>(opt.lateral_sites) * opt.lateral_sites * static_cast<std::size_t>(opt.oxide_layers);
    const std::size_t c = converted_sites(opt);
    return {sites / 2 - c, sites / 2 + c};
}

atomic_structure make_oxide_slab(const slab_options& opt, std::uint64_t seed) {
    if (opt.lateral_sites < 2 || opt.lateral_sites % 2 != 0)
        throw domain_error("slab: lateral site count must be even");
    if (opt.oxide_layers < 1 || opt.metal_layers < 0) throw domain_error("slab: invalid layer counts");
    if (opt.target_x < 1.0) throw domain_error("slab: target x below 1 is not supported");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-opt.jitter, opt.jitter);
    auto jitter = [&](vec3 p) {
        for (auto& c : p) c += noise(rng);
        return p;
    };

    atomic_structure s;
    s.box.lengths = {opt.lateral_length, opt.lateral_length, opt.cell_height};
    s.box.periodic = {true, true, true};

    const double metal_spacing_target = 2.86;
    const int metal_sites = std::max(1, static_cast<int>(std::lround(opt.lateral_length / metal_spacing_target)));
    const double metal_spacing = opt.lateral_length / metal_sites;
    const double layer_gap = 2.0;
    const double z_oxide = 2.0 + opt.metal_layers * layer_gap;

    for (int k = 0; k < opt.metal_layers; ++k)
        for (int i = 0; i < metal_sites; ++i)
            for (int j = 0; j < metal_sites; ++j)
                s.atoms.push_back({species::Al, jitter({(i + 0.5) * metal_spacing, (j + 0.5) * metal_spacing,
                                                        z_oxide - layer_gap * (opt.metal_layers - k)})});

    const double a = opt.lateral_length / opt.lateral_sites;
    const std::size_t first_oxide = s.atoms.size();
    std::vector<std::size_t> al_sites;
    for (int k = 0; k < opt.oxide_layers; ++k)
        for (int i = 0; i < opt.lateral_sites; ++i)
            for (int j = 0; j < opt.lateral_sites; ++j) {
                const bool is_al = (i + j + k) % 2 == 0;
                if (is_al) al_sites.push_back(s.atoms.size());
                s.atoms.push_back({is_al ? species::Al : species::O,
                                   jitter({(i + 0.25) * a, (j + 0.25) * a, z_oxide + k * a})});
            }
    std::shuffle(al_sites.begin(), al_sites.end(), rng);
    const std::size_t c = converted_sites(opt);
    for (std::size_t n = 0; n < c; ++n) s.atoms[al_sites[n]].kind = species::O;

    const double z_top = z_oxide + (opt.oxide_layers - 1) * a;
    std::vector<std::size_t> top_o;
    for (std::size_t i = first_oxide; i < s.atoms.size(); ++i)
        if (s.atoms[i].kind == species::O && std::abs(s.atoms[i].position[2] - z_top) < 0.5) top_o.push_back(i);
    if (opt.hydrogens > top_o.size()) throw domain_error("slab: more hydrogens than top-layer O sites");
    std::shuffle(top_o.begin(), top_o.end(), rng);
    std::sort(top_o.begin(), top_o.begin() + static_cast<std::ptrdiff_t>(opt.hydrogens));
    for (std::size_t n = 0; n < opt.hydrogens; ++n) {
        auto p = s.atoms[top_o[n]].position;
        p[2] += 0.97;
        s.atoms.push_back({species::H, p});
    }
    return s;
}

std::vector<std::size_t> ensemble_h_counts(std::size_t samples, std::size_t oxide_atoms, double target_percent) {
    if (!(target_percent >= 0.0) || target_percent >= 100.0) throw domain_error("target at.% must be in [0, 100)");
    const double f = target_percent / 100.0;
    const double exact = f * static_cast<double>(oxide_atoms) / (1.0 - f);
    const auto lo = static_cast<std::size_t>(std::floor(exact));
    auto pct = [&](std::size_t n) {
        return 100.0 * static_cast<double>(n) / static_cast<double>(oxide_atoms + n);
    };
    std::vector<std::size_t> out;
    out.reserve(samples);
    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        // pick whichever keeps the running mean closest to the target
        const double with_lo = std::abs((sum + pct(lo)) / static_cast<double>(i + 1) - target_percent);
        const double with_hi = std::abs((sum + pct(lo + 1)) / static_cast<double>(i + 1) - target_percent);
        const std::size_t n = with_hi < with_lo ? lo + 1 : lo;
        out.push_back(n);
        sum += pct(n);
    }
    return out;
}

} // namespace alox
