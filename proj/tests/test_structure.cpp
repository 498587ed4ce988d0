#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "alox/errors.hpp"
#include "alox/structure.hpp"
#include "oracles.hpp"

using namespace alox;

namespace {

atomic_structure periodic_box(double a, double b, double c) {
    atomic_structure s;
    s.box.lengths = {a, b, c};
    return s;
}

// Alternating Al/O simple-cubic layers: `layers` planes at z = k * dz.
atomic_structure layered_slab(int nx, double spacing, int layers, double dz) {
    auto s = periodic_box(nx * spacing, nx * spacing, 40.0);
    s.box.periodic[2] = false;
    for (int k = 0; k < layers; ++k)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                s.atoms.push_back({(i + j + k) % 2 ? species::Al : species::O, {i * spacing, j * spacing, 5 + k * dz}});
    return s;
}

std::set<std::pair<std::size_t, std::size_t>> edges_of(const bond_graph& g) {
    std::set<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < g.adjacency.size(); ++i)
        for (const auto& nb : g.adjacency[i]) e.emplace(std::min(i, nb.index), std::max(i, nb.index));
    return e;
}

} // namespace

TEST_CASE("parse a small O2 file") {
    const auto s = parse_xyz("2\nO2 molecule\nO 0 0 0\nO 0 0 1.21\n");
    CHECK(s.count(species::O) == 2);
    CHECK(s.distance(0, 1) == doctest::Approx(1.21));
    // no lattice: bounding box plus 10 A, non-periodic
    CHECK(s.box.lengths[2] == doctest::Approx(11.21));
    CHECK_FALSE(s.box.periodic[0]);
}

TEST_CASE("parse errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        try {
            parse_xyz(text);
        } catch (const parse_error& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("5\nc\nO 0 0 0\nO 0 0 1\nAl 0 0 2\nH 0 0 3\n") == 7);
    CHECK(line_of("2\nc\nO 0 0 0\nXe 0 0 1\n") == 4);
    CHECK(line_of("2\nc\nO 0 0 0\nO 0 zero 1\n") == 4);
    CHECK(line_of("1\nc\nO 0 0 0\nO 0 0 1\n") == 4);
    CHECK(line_of("two\n") == 1);
    CHECK(line_of("1\nLattice=\"10 1 0 0 10 0 0 0 10\"\nO 0 0 0\n") == 2);
    CHECK(line_of("") == 1);
}

TEST_CASE("parse lattice and pbc flags") {
    const auto s = parse_xyz("1\nLattice=\"10 0 0 0 11 0 0 0 12\" pbc=\"T T F\" Properties=species:S:1:pos:R:3\nAl 1 2 3\n");
    CHECK(s.box.lengths == vec3{10, 11, 12});
    CHECK(s.box.periodic == std::array<bool, 3>{true, true, false});
}

TEST_CASE("4470-atom census") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto s = periodic_box(34.17, 34.17, 78.26);
    for (int i = 0; i < 2880; ++i) s.atoms.push_back({species::Al, {34.17 * u(rng), 34.17 * u(rng), 78.26 * u(rng)}});
    for (int i = 0; i < 1530; ++i) s.atoms.push_back({species::O, {34.17 * u(rng), 34.17 * u(rng), 78.26 * u(rng)}});
    for (int i = 0; i < 60; ++i) s.atoms.push_back({species::H, {34.17 * u(rng), 34.17 * u(rng), 78.26 * u(rng)}});
    std::ostringstream out;
    write_xyz(out, s, "fixture");
    const auto back = parse_xyz(out.str());
    CHECK(back.atoms.size() == 4470);
    CHECK(back.count(species::Al) == 2880);
    CHECK(back.count(species::O) == 1530);
    CHECK(back.count(species::H) == 60);
    for (std::size_t i = 0; i < s.atoms.size(); ++i)
        for (int k = 0; k < 3; ++k) CHECK(std::abs(back.atoms[i].position[k] - s.atoms[i].position[k]) < 1e-6);
    CHECK(back.box.lengths == s.box.lengths);
}

TEST_CASE("minimum-image bonding across a periodic boundary") {
    auto s = periodic_box(10, 10, 10);
    s.atoms = {{species::O, {0.2, 5, 5}}, {species::O, {9.8, 5, 5}}};
    const auto g = neighbor_graph(s, cutoff_table::defaults());
    REQUIRE(g.bonded(0, 1));
    CHECK(g.neighbors(0)[0].distance == doctest::Approx(0.4));
    s.box.periodic[0] = false;
    CHECK_FALSE(neighbor_graph(s, cutoff_table::defaults()).bonded(0, 1));
}

TEST_CASE("O-H cutoff") {
    auto s = periodic_box(10, 10, 10);
    s.atoms = {{species::O, {5, 5, 5}}, {species::H, {5, 5, 5.97}}};
    CHECK(neighbor_graph(s, cutoff_table::defaults()).bonded(0, 1));
    s.atoms[1].position[2] = 6.5;
    CHECK_FALSE(neighbor_graph(s, cutoff_table::defaults()).bonded(0, 1));
}

TEST_CASE("neighbor graph equals the brute-force scan") {
    const species kinds[] = {species::Al, species::O, species::H};
    for (std::size_t n : {100u, 250u, 500u}) {
        std::mt19937_64 rng(n);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> kind(0, 2);
        auto s = periodic_box(14.0, 15.5, 17.0);
        if (n == 250) s.box.periodic[2] = false;
        for (std::size_t i = 0; i < n; ++i)
            s.atoms.push_back(
                {kinds[kind(rng)], {14.0 * u(rng), 15.5 * u(rng), 17.0 * u(rng)}});
        const auto cut = cutoff_table::defaults();
        const auto g = neighbor_graph(s, cut);
        const auto want = oracle::brute_force_edges(s, cut);
        CHECK(edges_of(g) == std::set<std::pair<std::size_t, std::size_t>>(want.begin(), want.end()));
        // symmetry and cutoff compliance
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& nb : g.neighbors(i)) {
                CHECK(g.bonded(nb.index, i));
                CHECK(nb.distance <= cut.get(s.atoms[i].kind, s.atoms[nb.index].kind));
            }
    }
}

TEST_CASE("cutoff reaching half the cell is rejected") {
    auto s = periodic_box(5, 20, 20);
    s.atoms = {{species::Al, {1, 1, 1}}};
    CHECK_THROWS_AS(neighbor_graph(s, cutoff_table::defaults()), config_error);
    s.box.periodic[0] = false;
    CHECK_NOTHROW(neighbor_graph(s, cutoff_table::defaults()));
    auto cut = cutoff_table::defaults();
    CHECK_THROWS_AS(cut.set(species::O, species::H, -1.0), config_error);
}

TEST_CASE("oxide region of a constructed slab") {
    auto s = periodic_box(30, 30, 30);
    for (int i = 0; i < 8; ++i) s.atoms.push_back({species::Al, {3.0 * i, 1, 4.0 * i / 7.0}});
    for (int i = 0; i < 10; ++i) s.atoms.push_back({species::O, {3.0 * i, 10, 5 + 3.0 * i / 9.0}});
    for (int i = 0; i < 8; ++i) s.atoms.push_back({species::Al, {3.0 * i, 20, 5.5 + 0.3 * i}});
    const auto r = find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults()));
    CHECK(r.z_lo == doctest::Approx(4.5));
    CHECK(r.z_hi == doctest::Approx(8.5));
    CHECK(r.counts.n_o == 10);
    CHECK(r.counts.n_al == 8);
}

TEST_CASE("all-O structure and missing O") {
    auto s = periodic_box(20, 20, 20);
    s.atoms = {{species::O, {1, 1, 2}}, {species::O, {5, 5, 9}}, {species::O, {9, 9, 6}}};
    const auto r = find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults()));
    CHECK(r.members.size() == 3);
    CHECK(r.z_lo == doctest::Approx(1.5));
    CHECK(r.z_hi == doctest::Approx(9.5));
    CHECK_THROWS_AS(stoichiometry(r), domain_error);
    s.atoms = {{species::Al, {1, 1, 1}}};
    CHECK_THROWS_AS(find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults())), domain_error);
}

TEST_CASE("hydrogen bonded to an oxide O counts even above the slab") {
    auto s = periodic_box(20, 20, 20);
    s.atoms = {{species::Al, {1, 1, 5}}, {species::O, {1, 1, 6.8}}, {species::H, {1, 1, 7.77}},
               {species::H, {10, 10, 15}}};
    const auto r = find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults()));
    CHECK(r.counts.n_h == 1);
}

TEST_CASE("stoichiometry arithmetic") {
    oxide_region r;
    r.counts = {8, 10, 0};
    CHECK(stoichiometry(r).x == doctest::Approx(1.25));
    CHECK(stoichiometry(r).h_atomic_percent == 0.0);
    r.counts = {40, 50, 2};
    CHECK(stoichiometry(r).x == doctest::Approx(1.25));
    CHECK(stoichiometry(r).h_atomic_percent == doctest::Approx(200.0 / 92.0));
}

TEST_CASE("stoichiometry is invariant under atom permutation") {
    auto s = layered_slab(8, 2.0, 4, 2.0);
    s.atoms.push_back({species::H, {0, 0, 11.97}});
    const auto base = stoichiometry(find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults())));
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(s.atoms.begin(), s.atoms.end(), rng);
        const auto p = stoichiometry(find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults())));
        CHECK(p.x == base.x);
        CHECK(p.h_atomic_percent == base.h_atomic_percent);
    }
}

TEST_CASE("surface sites of a flat slab are the top layer") {
    const auto s = layered_slab(8, 2.0, 4, 2.0); // layers at z = 5, 7, 9, 11
    const auto r = find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults()));
    const auto sites = surface_sites(s, r, 1.5, 4.0);
    CHECK(sites.size() == 64);
    for (auto i : sites) CHECK(s.atoms[i].position[2] == doctest::Approx(11.0));
}

TEST_CASE("pit bottoms are surface sites of their own bin") {
    auto s = layered_slab(8, 2.0, 4, 1.5); // z = 5, 6.5, 8, 9.5
    // remove the two top layers inside the bin x, y in [4, 8): a 3 A deep pit
    std::erase_if(s.atoms, [](const atom& a) {
        return a.position[0] >= 4 && a.position[0] < 8 && a.position[1] >= 4 && a.position[1] < 8 &&
               a.position[2] > 7.0;
    });
    const auto r = find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults()));
    const auto sites = surface_sites(s, r, 1.0, 4.0);
    std::set<std::size_t> set(sites.begin(), sites.end());
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
        const auto& p = s.atoms[i].position;
        const bool in_pit = p[0] >= 4 && p[0] < 8 && p[1] >= 4 && p[1] < 8;
        const double top = in_pit ? 6.5 : 9.5;
        CHECK(set.count(i) == (p[2] >= top - 1.0 ? 1u : 0u));
    }
}

TEST_CASE("stepped slab matches a per-atom re-evaluation") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    auto s = periodic_box(24, 24, 40);
    s.box.periodic[2] = false;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            const int height = 2 + i / 3; // terraces along x
            for (int k = 0; k < height; ++k)
                s.atoms.push_back({(i + j + k) % 2 ? species::Al : species::O,
                                   {2.0 * i + 0.5, 2.0 * j + 0.5, 5 + 2.0 * k + jitter(rng)}});
        }
    const auto r = find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults()));
    for (double delta : {0.5, 1.0, 2.0, 3.5}) {
        const auto sites = surface_sites(s, r, delta, 4.0);
        std::set<std::size_t> set(sites.begin(), sites.end());
        for (auto i : r.members) {
            const auto& p = s.atoms[i].position;
            double top = -1e9;
            for (auto j : r.members) {
                const auto& q = s.atoms[j].position;
                if (std::floor(q[0] / 4.0) == std::floor(p[0] / 4.0) && std::floor(q[1] / 4.0) == std::floor(p[1] / 4.0))
                    top = std::max(top, q[2]);
            }
            CHECK(set.count(i) == (p[2] >= top - delta ? 1u : 0u));
        }
    }
}

TEST_CASE("surface sites grow monotonically with delta") {
    const auto s = layered_slab(8, 2.0, 5, 2.0);
    const auto r = find_oxide_region(s, neighbor_graph(s, cutoff_table::defaults()));
    std::vector<std::size_t> prev;
    for (double delta : {0.1, 1.0, 2.5, 4.5, 6.5, 100.0}) {
        const auto cur = surface_sites(s, r, delta, 4.0);
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = cur;
    }
    CHECK(prev.size() == r.members.size());
    CHECK_THROWS_AS(surface_sites(s, r, 0.0, 4.0), domain_error);
    CHECK_THROWS_AS(surface_sites(s, oxide_region{}, 1.0, 4.0), domain_error);
}

TEST_CASE("effective time") {
    CHECK(effective_time(750, 8.46e-3, 3e-12) == doctest::Approx(265.957e-9).epsilon(1e-5));
    CHECK(effective_time(5, 5, 3e-12) == doctest::Approx(3e-12));
    CHECK(effective_time(750, 4.23e-3, 3e-12) == doctest::Approx(2 * effective_time(750, 8.46e-3, 3e-12)));
    CHECK_THROWS_AS(effective_time(1, 0, 1), domain_error);
}

TEST_CASE("ideal gas count") {
    const double full = ideal_gas_count(1500, 34.17 * 34.17 * 78.26, 300);
    CHECK(full == doctest::Approx(3.3095e-2).epsilon(1e-3));
    // the gas-loading region above the slab (20 A tall) gives the quoted 8.46e-3
    CHECK(ideal_gas_count(1500, 34.17 * 34.17 * 20.0, 300) == doctest::Approx(8.46e-3).epsilon(2e-3));
    CHECK(ideal_gas_count(3000, 1000, 300) == doctest::Approx(2 * ideal_gas_count(1500, 1000, 300)));
    CHECK(ideal_gas_count(1500, 7000, 300) / 7000 == doctest::Approx(ideal_gas_count(1500, 1000, 300) / 1000));
    CHECK_THROWS_AS(ideal_gas_count(0, 1, 1), domain_error);
}
