#include "alox/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

#include "alox/constants.hpp"
#include "alox/errors.hpp"

namespace alox {

std::string_view to_string(species s) {
    switch (s) {
    case species::Al: return "Al";
    case species::O: return "O";
    case species::H: return "H";
    }
    return "?";
}

species species_from_string(std::string_view label) {
    if (label == "Al") return species::Al;
    if (label == "O") return species::O;
    if (label == "H") return species::H;
    throw domain_error("unknown species '" + std::string(label) + "'");
}

std::size_t atomic_structure::count(species s) const {
    return static_cast<std::size_t>(
        std::count_if(atoms.begin(), atoms.end(), [s](const atom& a) { return a.kind == s; }));
}

vec3 atomic_structure::displacement(std::size_t i, std::size_t j) const {
    vec3 d{};
    for (int k = 0; k < 3; ++k) {
        d[k] = atoms[j].position[k] - atoms[i].position[k];
        if (box.periodic[k]) d[k] -= box.lengths[k] * std::nearbyint(d[k] / box.lengths[k]);
    }
    return d;
}

double atomic_structure::distance(std::size_t i, std::size_t j) const {
    const auto d = displacement(i, j);
    return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
}

void validate(const atomic_structure& s) {
    for (double l : s.box.lengths)
        if (!(l > 0.0) || !std::isfinite(l)) throw domain_error("cell lengths must be positive");
    for (const auto& a : s.atoms)
        for (double c : a.position)
            if (!std::isfinite(c)) throw domain_error("atom position is not finite");
}

namespace {

double parse_number(const std::string& tok, std::size_t line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw parse_error(line, "cannot parse number '" + tok + "'");
    }
    if (pos != tok.size() || !std::isfinite(v))
        throw parse_error(line, "cannot parse number '" + tok + "'");
    return v;
}

} // namespace

atomic_structure parse_xyz(std::istream& in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw parse_error(1, "missing atom count");
    std::size_t declared = 0;
    {
        std::istringstream ss(line);
        long n = -1;
        std::string extra;
        if (!(ss >> n) || n < 0 || (ss >> extra)) throw parse_error(1, "invalid atom count");
        declared = static_cast<std::size_t>(n);
    }

    ++lineno;
    std::string comment;
    if (!std::getline(in, comment)) throw parse_error(lineno, "missing comment line");

    atomic_structure s;
    bool have_lattice = false;
    static const std::regex lattice_re(R"(Lattice\s*=\s*\"([^\"]*)\")", std::regex::icase);
    static const std::regex pbc_re(R"(pbc\s*=\s*\"([^\"]*)\")", std::regex::icase);
    std::smatch m;
    if (std::regex_search(comment, m, lattice_re)) {
        std::istringstream ls(m[1].str());
        std::array<double, 9> v{};
        for (auto& x : v) {
            std::string tok;
            if (!(ls >> tok)) throw parse_error(2, "Lattice needs nine numbers");
            x = parse_number(tok, 2);
        }
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                if (r != c && std::abs(v[3 * r + c]) > 1e-8)
                    throw parse_error(2, "only orthorhombic cells are supported");
        s.box.lengths = {v[0], v[4], v[8]};
        for (double l : s.box.lengths)
            if (!(l > 0.0)) throw parse_error(2, "lattice lengths must be positive");
        have_lattice = true;
        if (std::regex_search(comment, m, pbc_re)) {
            std::istringstream ps(m[1].str());
            for (auto& p : s.box.periodic) {
                std::string tok;
                if (!(ps >> tok)) throw parse_error(2, "pbc needs three flags");
                p = (tok == "T" || tok == "t" || tok == "True" || tok == "1");
            }
        }
    }

    s.atoms.reserve(declared);
    while (s.atoms.size() < declared) {
        ++lineno;
        if (!std::getline(in, line))
            throw parse_error(lineno, "expected " + std::to_string(declared) + " atoms, found " +
                                          std::to_string(s.atoms.size()));
        std::istringstream ss(line);
        std::string label, x, y, z;
        if (!(ss >> label >> x >> y >> z)) throw parse_error(lineno, "expected 'species x y z'");
        atom a{};
        try {
            a.kind = species_from_string(label);
        } catch (const domain_error&) {
            throw parse_error(lineno, "unknown species '" + label + "'");
        }
        a.position = {parse_number(x, lineno), parse_number(y, lineno), parse_number(z, lineno)};
        s.atoms.push_back(a);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            throw parse_error(lineno, "more atoms than the declared " + std::to_string(declared));
    }

    if (!have_lattice) {
        vec3 lo{0, 0, 0}, hi{0, 0, 0};
        if (!s.atoms.empty()) {
            lo = hi = s.atoms.front().position;
            for (const auto& a : s.atoms)
                for (int k = 0; k < 3; ++k) {
                    lo[k] = std::min(lo[k], a.position[k]);
                    hi[k] = std::max(hi[k], a.position[k]);
                }
        }
        for (int k = 0; k < 3; ++k) s.box.lengths[k] = hi[k] - lo[k] + 10.0;
        s.box.periodic = {false, false, false};
    }
    return s;
}

atomic_structure parse_xyz(const std::string& text) {
    std::istringstream in(text);
    return parse_xyz(in);
}

atomic_structure read_xyz_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open structure file " + path);
    return parse_xyz(in);
}

void write_xyz(std::ostream& out, const atomic_structure& s, const std::string& comment) {
    const auto& l = s.box.lengths;
    auto flag = [](bool b) { return b ? "T" : "F"; };
    out << s.atoms.size() << '\n';
    out << std::setprecision(12) << "Lattice=\"" << l[0] << " 0 0 0 " << l[1] << " 0 0 0 " << l[2]
        << "\" pbc=\"" << flag(s.box.periodic[0]) << ' ' << flag(s.box.periodic[1]) << ' '
        << flag(s.box.periodic[2]) << '"';
    if (!comment.empty()) out << ' ' << comment;
    out << '\n';
    out << std::fixed << std::setprecision(8);
    for (const auto& a : s.atoms)
        out << to_string(a.kind) << ' ' << a.position[0] << ' ' << a.position[1] << ' '
            << a.position[2] << '\n';
    out << std::defaultfloat;
}

namespace {

int pair_slot(species a, species b) {
    auto i = static_cast<int>(a);
    auto j = static_cast<int>(b);
    return 3 * std::min(i, j) + std::max(i, j);
}

} // namespace

cutoff_table cutoff_table::defaults() {
    cutoff_table t;
    t.set(species::O, species::H, 1.2);
    t.set(species::Al, species::H, 2.0);
    t.set(species::Al, species::O, 2.2);
    t.set(species::O, species::O, 1.6);
    t.set(species::Al, species::Al, 3.0);
    t.set(species::H, species::H, 0.0);
    return t;
}

void cutoff_table::set(species a, species b, double cutoff) {
    if (!(cutoff >= 0.0) || !std::isfinite(cutoff))
        throw config_error("cutoffs must be finite and non-negative");
    values_[static_cast<std::size_t>(pair_slot(a, b))] = cutoff;
}

double cutoff_table::get(species a, species b) const {
    return values_[static_cast<std::size_t>(pair_slot(a, b))];
}

double cutoff_table::max_cutoff() const { return *std::max_element(values_.begin(), values_.end()); }

std::size_t bond_graph::edge_count() const {
    std::size_t n = 0;
    for (const auto& a : adjacency) n += a.size();
    return n / 2;
}

bool bond_graph::bonded(std::size_t i, std::size_t j) const {
    const auto& a = adjacency[i];
    return std::binary_search(a.begin(), a.end(), neighbor{j, 0.0},
                              [](const neighbor& x, const neighbor& y) { return x.index < y.index; });
}

bond_graph neighbor_graph(const atomic_structure& s, const cutoff_table& cutoffs) {
    validate(s);
    const double rc = cutoffs.max_cutoff();
    if (!(rc > 0.0)) throw config_error("at least one cutoff must be positive");
    for (int k = 0; k < 3; ++k)
        if (s.box.periodic[k] && rc >= 0.5 * s.box.lengths[k])
            throw config_error("cutoff " + std::to_string(rc) + " A reaches half the periodic cell length " +
                               std::to_string(s.box.lengths[k]) + " A");

    const std::size_t n = s.atoms.size();
    bond_graph g;
    g.adjacency.resize(n);
    if (n == 0) return g;

    std::array<int, 3> nbins{};
    vec3 origin{}, width{};
    for (int k = 0; k < 3; ++k) {
        if (s.box.periodic[k]) {
            nbins[k] = std::max(1, static_cast<int>(std::floor(s.box.lengths[k] / rc)));
            origin[k] = 0.0;
            width[k] = s.box.lengths[k] / nbins[k];
        } else {
            double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
            for (const auto& a : s.atoms) {
                lo = std::min(lo, a.position[k]);
                hi = std::max(hi, a.position[k]);
            }
            origin[k] = lo;
            width[k] = rc;
            nbins[k] = static_cast<int>(std::floor((hi - lo) / rc)) + 1;
        }
    }

    auto bin_of = [&](const vec3& p) {
        std::array<int, 3> b{};
        for (int k = 0; k < 3; ++k) {
            double x = p[k] - origin[k];
            if (s.box.periodic[k]) x -= s.box.lengths[k] * std::floor(x / s.box.lengths[k]);
            b[k] = std::clamp(static_cast<int>(std::floor(x / width[k])), 0, nbins[k] - 1);
        }
        return b;
    };
    auto flat = [&](const std::array<int, 3>& b) {
        return (static_cast<std::size_t>(b[0]) * static_cast<std::size_t>(nbins[1]) +
                static_cast<std::size_t>(b[1])) * static_cast<std::size_t>(nbins[2]) +
               static_cast<std::size_t>(b[2]);
    };

    std::vector<std::vector<std::size_t>> bins(static_cast<std::size_t>(nbins[0]) * nbins[1] * nbins[2]);
    std::vector<std::array<int, 3>> atom_bin(n);
    for (std::size_t i = 0; i < n; ++i) {
        atom_bin[i] = bin_of(s.atoms[i].position);
        bins[flat(atom_bin[i])].push_back(i);
    }

    for (std::size_t i = 0; i < n; ++i) {
        std::array<std::vector<int>, 3> axis;
        for (int k = 0; k < 3; ++k) {
            std::set<int> ids;
            for (int off = -1; off <= 1; ++off) {
                int b = atom_bin[i][k] + off;
                if (s.box.periodic[k]) b = ((b % nbins[k]) + nbins[k]) % nbins[k];
                else if (b < 0 || b >= nbins[k]) continue;
                ids.insert(b);
            }
            axis[k].assign(ids.begin(), ids.end());
        }
        for (int bx : axis[0])
            for (int by : axis[1])
                for (int bz : axis[2])
                    for (std::size_t j : bins[flat({bx, by, bz})]) {
                        if (j <= i) continue;
                        const double cut = cutoffs.get(s.atoms[i].kind, s.atoms[j].kind);
                        if (cut <= 0.0) continue;
                        const double d = s.distance(i, j);
                        if (d <= cut) {
                            g.adjacency[i].push_back({j, d});
                            g.adjacency[j].push_back({i, d});
                        }
                    }
    }
    for (auto& a : g.adjacency)
        std::sort(a.begin(), a.end(), [](const neighbor& x, const neighbor& y) { return x.index < y.index; });
    return g;
}

oxide_region find_oxide_region(const atomic_structure& s, const bond_graph& g, double padding) {
    oxide_region r;
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (const auto& a : s.atoms)
        if (a.kind == species::O) {
            lo = std::min(lo, a.position[2]);
            hi = std::max(hi, a.position[2]);
        }
    if (lo > hi) throw domain_error("oxide region: structure contains no O atoms");
    r.z_lo = lo - padding;
    r.z_hi = hi + padding;

    auto inside = [&](const atom& a) { return a.position[2] >= r.z_lo && a.position[2] <= r.z_hi; };
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
        const auto& a = s.atoms[i];
        bool member = false;
        switch (a.kind) {
        case species::O: member = true; break;
        case species::Al: member = inside(a); break;
        case species::H:
            member = inside(a) || std::any_of(g.adjacency[i].begin(), g.adjacency[i].end(),
                                              [&](const neighbor& nb) {
                                                  return s.atoms[nb.index].kind == species::O;
                                              });
            break;
        }
        if (!member) continue;
        r.members.push_back(i);
        switch (a.kind) {
        case species::Al: ++r.counts.n_al; break;
        case species::O: ++r.counts.n_o; break;
        case species::H: ++r.counts.n_h; break;
        }
    }
    return r;
}

stoichiometry_result stoichiometry(const oxide_region& region) {
    const auto& c = region.counts;
    if (c.n_al == 0) throw domain_error("stoichiometry: no Al atoms in the oxide region");
    const double total = static_cast<double>(c.n_al + c.n_o + c.n_h);
    return {static_cast<double>(c.n_o) / static_cast<double>(c.n_al),
            100.0 * static_cast<double>(c.n_h) / total};
}

std::vector<std::size_t> surface_sites(const atomic_structure& s, const oxide_region& region,
                                       double delta, double bin) {
    if (!(delta > 0.0) || !(bin > 0.0)) throw domain_error("surface_sites: delta and bin must be positive");
    if (region.members.empty()) throw domain_error("surface_sites: empty oxide region");

    std::array<int, 2> nbins{};
    std::array<double, 2> origin{};
    for (int k = 0; k < 2; ++k) {
        if (s.box.periodic[k]) {
            origin[k] = 0.0;
            nbins[k] = std::max(1, static_cast<int>(std::ceil(s.box.lengths[k] / bin - 1e-9)));
        } else {
            double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
            for (auto i : region.members) {
                lo = std::min(lo, s.atoms[i].position[k]);
                hi = std::max(hi, s.atoms[i].position[k]);
            }
            origin[k] = lo;
            nbins[k] = static_cast<int>(std::floor((hi - lo) / bin)) + 1;
        }
    }
    auto cell_of = [&](const vec3& p) {
        std::array<int, 2> c{};
        for (int k = 0; k < 2; ++k) {
            double x = p[k] - origin[k];
            if (s.box.periodic[k]) x -= s.box.lengths[k] * std::floor(x / s.box.lengths[k]);
            c[k] = std::clamp(static_cast<int>(std::floor(x / bin)), 0, nbins[k] - 1);
        }
        return static_cast<std::size_t>(c[0]) * static_cast<std::size_t>(nbins[1]) +
               static_cast<std::size_t>(c[1]);
    };

    std::vector<double> top(static_cast<std::size_t>(nbins[0]) * nbins[1],
                            std::numeric_limits<double>::lowest());
    for (auto i : region.members) {
        const auto& a = s.atoms[i];
        if (a.kind == species::H) continue;
        auto& t = top[cell_of(a.position)];
        t = std::max(t, a.position[2]);
    }
    std::vector<std::size_t> out;
    for (auto i : region.members) {
        const auto& a = s.atoms[i];
        const double t = top[cell_of(a.position)];
        // a bin holding only H has no framework height; its H atoms sit on the surface
        if (t == std::numeric_limits<double>::lowest() || a.position[2] >= t - delta) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double effective_time(double n_sim, double n_ref, double t_sim) {
    if (!(n_ref > 0.0)) throw domain_error("effective_time: reference count must be positive");
    return t_sim * n_sim / n_ref;
}

double ideal_gas_count(double pressure_pa, double volume_a3, double temperature_k) {
    if (!(pressure_pa > 0.0) || !(volume_a3 > 0.0) || !(temperature_k > 0.0))
        throw domain_error("ideal_gas_count: arguments must be positive");
    const double volume_m3 = volume_a3 * std::pow(constants::angstrom, 3);
    return pressure_pa * volume_m3 / (constants::boltzmann * temperature_k);
}

} // namespace alox
