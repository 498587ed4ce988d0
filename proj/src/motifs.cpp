#include "alox/motifs.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "alox/errors.hpp"

namespace alox {

namespace {

constexpr std::array<std::string_view, motif_class_count> motif_labels{
    "Al-OH", "Al-OH-Al", "Al-H2O", "Al-O2-H", "Al-H", "Al-H-Al", "Al-H-O", "interstitial", "Al-O-H-O-Al",
};

std::vector<std::size_t> neighbors_of(const atomic_structure& s, const bond_graph& g, std::size_t i,
                                      species kind, std::size_t exclude = static_cast<std::size_t>(-1)) {
    std::vector<std::size_t> out;
    for (const auto& nb : g.neighbors(i))
        if (nb.index != exclude && s.atoms[nb.index].kind == kind) out.push_back(nb.index);
    return out;
}

std::vector<std::size_t> sorted_union(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

void classify_hydroxyl(const atomic_structure& s, const bond_graph& g, std::size_t h, std::size_t o,
                       motif_record& r) {
    const auto o_al = neighbors_of(s, g, o, species::Al);
    const auto o_h = neighbors_of(s, g, o, species::H, h);
    const auto o_o = neighbors_of(s, g, o, species::O);
    r.host_o = {o};

    if (!o_h.empty() && !o_al.empty()) {
        r.kind = motif_class::al_h2o;
        r.host_al = o_al;
        return;
    }
    if (!o_o.empty()) {
        // O-O chain counts when either end of the pair is bonded to Al
        std::optional<std::size_t> partner;
        for (auto p : o_o)
            if (!neighbors_of(s, g, p, species::Al).empty()) {
                partner = p;
                break;
            }
        if (!partner && !o_al.empty()) partner = o_o.front();
        if (partner) {
            r.kind = motif_class::al_o2_h;
            r.host_o = sorted_union({o}, {*partner});
            r.host_al = sorted_union(o_al, neighbors_of(s, g, *partner, species::Al));
            return;
        }
    }
    r.host_al = o_al;
    if (o_al.empty())
        r.kind = motif_class::interstitial; // hydroxyl or water not attached to the oxide
    else if (o_al.size() == 1)
        r.kind = motif_class::al_oh;
    else
        r.kind = motif_class::al_oh_al;
}

} // namespace

std::string_view to_string(motif_class c) { return motif_labels[static_cast<std::size_t>(c)]; }

motif_class motif_class_from_string(std::string_view label) {
    for (std::size_t i = 0; i < motif_class_count; ++i)
        if (motif_labels[i] == label) return all_motif_classes[i];
    throw domain_error("unknown motif class '" + std::string(label) + "'");
}

motif_record classify_h(const atomic_structure& s, const bond_graph& g, std::size_t h,
                        const std::vector<std::size_t>& surface, const motif_options& options) {
    if (h >= s.atoms.size() || s.atoms[h].kind != species::H)
        throw domain_error("classify_h: atom " + std::to_string(h) + " is not hydrogen");

    motif_record r{h, motif_class::interstitial, {}, {}, false};
    const auto h_o = neighbors_of(s, g, h, species::O);
    const auto h_al = neighbors_of(s, g, h, species::Al);

    bool bridged = h_o.size() >= 2;
    for (auto o : h_o) bridged = bridged && !neighbors_of(s, g, o, species::Al).empty();

    if (bridged) {
        r.kind = motif_class::al_o_h_o_al;
        r.host_o = h_o;
        for (auto o : h_o) r.host_al = sorted_union(r.host_al, neighbors_of(s, g, o, species::Al));
    } else if (!h_o.empty()) {
        // several O without a full Al-O-H-O-Al bridge: the nearest O is the host
        std::size_t o = h_o.front();
        for (auto c : h_o)
            if (s.distance(h, c) < s.distance(h, o)) o = c;
        classify_hydroxyl(s, g, h, o, r);
    } else if (!h_al.empty()) {
        std::optional<std::size_t> near_o;
        double best = options.h_o_long_cutoff;
        for (std::size_t j = 0; j < s.atoms.size(); ++j) {
            if (s.atoms[j].kind != species::O) continue;
            const double d = s.distance(h, j);
            if (d <= best) {
                best = d;
                near_o = j;
            }
        }
        r.host_al = h_al;
        if (near_o) {
            r.kind = motif_class::al_h_o;
            r.host_o = {*near_o};
        } else {
            r.kind = h_al.size() == 1 ? motif_class::al_h : motif_class::al_h_al;
        }
    }

    auto on_surface = [&](std::size_t i) { return std::binary_search(surface.begin(), surface.end(), i); };
    r.surface = on_surface(h) || std::any_of(r.host_o.begin(), r.host_o.end(), on_surface);
    return r;
}

std::vector<motif_record> classify_all(const atomic_structure& s, const bond_graph& g,
                                       const std::vector<std::size_t>& surface,
                                       const motif_options& options) {
    std::vector<motif_record> out;
    for (std::size_t i = 0; i < s.atoms.size(); ++i)
        if (s.atoms[i].kind == species::H) out.push_back(classify_h(s, g, i, surface, options));
    return out;
}

motif_ensemble_stats motif_statistics(const std::vector<std::vector<motif_record>>& samples) {
    motif_ensemble_stats st;
    st.samples = samples.size();
    std::array<std::vector<double>, motif_class_count> pct;
    for (const auto& recs : samples) {
        if (recs.empty()) {
            ++st.samples_without_h;
            continue;
        }
        std::array<std::size_t, motif_class_count> counts{};
        for (const auto& r : recs) {
            const auto c = static_cast<std::size_t>(r.kind);
            ++counts[c];
            ++st.classes[c].total;
            if (r.surface) ++st.classes[c].surface;
        }
        for (std::size_t c = 0; c < motif_class_count; ++c)
            pct[c].push_back(100.0 * static_cast<double>(counts[c]) / static_cast<double>(recs.size()));
    }
    for (std::size_t c = 0; c < motif_class_count; ++c) {
        auto& cs = st.classes[c];
        const auto& v = pct[c];
        if (!v.empty()) {
            double m = 0.0;
            for (double x : v) m += x;
            m /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - m) * (x - m);
            cs.mean_percent = m;
            cs.std_percent = std::sqrt(var / static_cast<double>(v.size()));
        }
        if (cs.total > 0)
            cs.surface_probability = static_cast<double>(cs.surface) / static_cast<double>(cs.total);
    }
    return st;
}

} // namespace alox
