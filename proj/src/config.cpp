#include "alox/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "alox/errors.hpp"

namespace alox {

namespace pt = boost::property_tree;

std::pair<double, double> transport_config::resolved_height_bounds() const {
    if (height_bounds) return {model.fermi + height_bounds->first, model.fermi + height_bounds->second};
    const double band = 2.0 * std::abs(model.barrier_hopping);
    return {model.fermi + band + 0.5, model.fermi + band + 10.0};
}

trials_strategy parse_trials(const std::string& text) {
    if (text == "scan") return scan_trials{};
    auto number = [&](const std::string& s) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(s, &pos);
        } catch (const std::exception&) {
            throw config_error("invalid M strategy '" + text + "'");
        }
        if (pos != s.size() || v < 0) throw config_error("invalid M strategy '" + text + "'");
        return v;
    };
    if (text.rfind("fixed=", 0) == 0) return fixed_trials{number(text.substr(6))};
    if (text.rfind("scan=", 0) == 0) {
        const auto range = text.substr(5);
        const auto dots = range.find("..");
        if (dots == std::string::npos) throw config_error("scan range must look like scan=LO..HI");
        return scan_trials{number(range.substr(0, dots)), number(range.substr(dots + 2))};
    }
    throw config_error("invalid M strategy '" + text + "' (expected fixed=M, scan or scan=LO..HI)");
}

namespace {

const std::map<std::string, std::set<std::string>> known_keys{
    {"paths", {"structures", "counts", "out"}},
    {"run", {"seed", "threads"}},
    {"stats", {"trials"}},
    {"cutoffs", {"o_h", "al_h", "al_o", "o_o", "al_al", "h_h", "h_o_long", "oxide_padding"}},
    {"surface", {"delta", "bin"}},
    {"transport",
     {"lead_onsite", "lead_hopping", "orbitals", "transverse_hopping", "barrier_sites", "barrier_hopping",
      "coupling", "fermi", "eta", "grid", "window", "target_jj", "target_jjh", "height_min", "height_max",
      "shift_min", "shift_max", "fit_min", "fit_max", "rel_tol"}},
    {"junction", {"gap_mev", "area", "patch_area", "md_area", "t_jj", "t_jjh", "alpha", "beta", "trials"}},
};

template <class T>
T get_value(const pt::ptree& sec, const std::string& section, const std::string& key) {
    const auto raw = sec.get<std::string>(key);
    std::istringstream ss(raw);
    T v{};
    if (!(ss >> v) || !(ss >> std::ws).eof())
        throw config_error("[" + section + "] " + key + ": cannot parse '" + raw + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) throw config_error("[" + section + "] " + key + " must be finite");
    return v;
}

double positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw config_error(what + " must be positive");
    return v;
}

} // namespace

pipeline_config parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw config_error(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
    }

    for (const auto& [section, body] : tree) {
        const auto it = known_keys.find(section);
        if (it == known_keys.end() || body.data().size() > 0)
            throw config_error("config: unknown section or top-level key '" + section + "'");
        for (const auto& [key, _] : body)
            if (!it->second.count(key)) throw config_error("config: unknown key [" + section + "] " + key);
    }

    pipeline_config c;
    auto path_of = [&](const std::string& raw) {
        std::filesystem::path p(raw);
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };

    if (auto s = tree.get_child_optional("paths")) {
        if (auto v = s->get_optional<std::string>("structures")) c.structures = path_of(*v);
        if (auto v = s->get_optional<std::string>("counts")) c.counts = path_of(*v);
        if (auto v = s->get_optional<std::string>("out")) c.out = path_of(*v);
    }
    if (auto s = tree.get_child_optional("run")) {
        if (s->count("seed")) c.seed = get_value<std::uint64_t>(*s, "run", "seed");
        if (s->count("threads")) c.threads = get_value<unsigned>(*s, "run", "threads");
    }
    if (auto s = tree.get_child_optional("stats")) {
        if (auto v = s->get_optional<std::string>("trials")) c.trials = parse_trials(*v);
    }
    if (auto s = tree.get_child_optional("cutoffs")) {
        const std::pair<const char*, std::pair<species, species>> pairs[] = {
            {"o_h", {species::O, species::H}},   {"al_h", {species::Al, species::H}},
            {"al_o", {species::Al, species::O}}, {"o_o", {species::O, species::O}},
            {"al_al", {species::Al, species::Al}}, {"h_h", {species::H, species::H}},
        };
        for (const auto& [key, sp] : pairs)
            if (s->count(key)) c.analysis.cutoffs.set(sp.first, sp.second, get_value<double>(*s, "cutoffs", key));
        if (s->count("h_o_long"))
            c.analysis.motif.h_o_long_cutoff = positive(get_value<double>(*s, "cutoffs", "h_o_long"), "h_o_long");
        if (s->count("oxide_padding")) c.analysis.oxide_padding = get_value<double>(*s, "cutoffs", "oxide_padding");
    }
    if (auto s = tree.get_child_optional("surface")) {
        if (s->count("delta")) c.analysis.surface_delta = positive(get_value<double>(*s, "surface", "delta"), "surface delta");
        if (s->count("bin")) c.analysis.surface_bin = positive(get_value<double>(*s, "surface", "bin"), "surface bin");
    }
    if (auto s = tree.get_child_optional("transport")) {
        auto& t = c.transport;
        auto& m = t.model;
        auto d = [&](const char* key, double& dst) {
            if (s->count(key)) dst = get_value<double>(*s, "transport", key);
        };
        d("lead_onsite", m.lead_onsite);
        d("lead_hopping", m.lead_hopping);
        d("transverse_hopping", m.transverse_hopping);
        d("fermi", m.fermi);
        d("eta", m.eta);
        d("window", t.window);
        d("target_jj", t.target_jj);
        d("target_jjh", t.target_jjh);
        d("rel_tol", t.rel_tol);
        if (s->count("orbitals")) m.orbitals = get_value<int>(*s, "transport", "orbitals");
        bool coupling_set = s->count("coupling") > 0;
        if (s->count("barrier_hopping")) m.barrier_hopping = get_value<double>(*s, "transport", "barrier_hopping");
        if (coupling_set) m.coupling = get_value<double>(*s, "transport", "coupling");
        else m.coupling = std::sqrt(std::abs(m.lead_hopping * m.barrier_hopping));
        if (s->count("barrier_sites")) {
            const auto n = get_value<int>(*s, "transport", "barrier_sites");
            if (n < 1) throw config_error("[transport] barrier_sites must be at least 1");
            m.barrier_onsite.assign(static_cast<std::size_t>(n), m.barrier_onsite.front());
        }
        if (s->count("grid")) {
            const auto g = get_value<long>(*s, "transport", "grid");
            if (g < 2) throw config_error("[transport] grid needs at least 2 points");
            t.grid_points = static_cast<std::size_t>(g);
        }
        if (s->count("height_min") || s->count("height_max")) {
            auto b = t.resolved_height_bounds();
            b.first -= m.fermi;
            b.second -= m.fermi;
            if (s->count("height_min")) b.first = get_value<double>(*s, "transport", "height_min");
            if (s->count("height_max")) b.second = get_value<double>(*s, "transport", "height_max");
            t.height_bounds = b;
        }
        d("shift_min", t.shift_bounds.first);
        d("shift_max", t.shift_bounds.second);
        d("fit_min", t.fit_window.first);
        d("fit_max", t.fit_window.second);
        positive(m.eta, "[transport] eta");
        positive(t.window, "[transport] window");
        positive(t.target_jj, "[transport] target_jj");
        positive(t.target_jjh, "[transport] target_jjh");
        if (m.orbitals < 1) throw config_error("[transport] orbitals must be at least 1");
    }
    if (auto s = tree.get_child_optional("junction")) {
        auto& p = c.ej.params;
        auto d = [&](const char* key, double& dst) {
            if (s->count(key)) dst = positive(get_value<double>(*s, "junction", key), std::string("[junction] ") + key);
        };
        d("gap_mev", p.gap_mev);
        d("area", p.area);
        d("patch_area", p.patch_area);
        d("md_area", p.md_area);
        if (s->count("t_jj")) c.ej.t_jj = get_value<double>(*s, "junction", "t_jj");
        if (s->count("t_jjh")) c.ej.t_jjh = get_value<double>(*s, "junction", "t_jjh");
        if (s->count("alpha")) c.ej.alpha = positive(get_value<double>(*s, "junction", "alpha"), "[junction] alpha");
        if (s->count("beta")) c.ej.beta = positive(get_value<double>(*s, "junction", "beta"), "[junction] beta");
        if (s->count("trials")) c.ej.trials = get_value<int>(*s, "junction", "trials");
    }
    return c;
}

pipeline_config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

unsigned resolve_threads(unsigned requested, unsigned fallback) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ALOX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return fallback > 0 ? fallback : 1;
}

} // namespace alox
