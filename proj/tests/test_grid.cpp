#include "doctest.h"

#include <cmath>

#include "evade/errors.hpp"
#include "evade/grid.hpp"
#include "scenarios.hpp"

using namespace evade;

namespace {

Scenario chambered_box(double door_reach = 3.0) {
    // Vertical wall splitting the box, sealed at t = 0 by a door ball at the
    // origin that slides into the right chamber.
    Scenario sc = scenarios::walled_box(5.0);
    for (int k = 0; k < 5; ++k) {
        scenarios::add_static(sc, "wallp" + std::to_string(k), 0.65, {0.0, 1.0 + k});
        scenarios::add_static(sc, "walln" + std::to_string(k), 0.65, {0.0, -1.0 - k});
    }
    scenarios::add_moving(sc, "door", 0.65, {{0.0, {0.0, 0.0}}, {1.0, {door_reach, 0.0}}});
    return sc;
}

} // namespace

TEST_CASE("grid spec tiles the box") {
    Box box;
    box.min = {parse_decimal("0"), parse_decimal("0")};
    box.max = {parse_decimal("1"), parse_decimal("2")};
    GridSpec g = GridSpec::make(box, 0.5);
    REQUIRE(g.dims == std::vector<int>{2, 4});
    CHECK(g.cell[0] == doctest::Approx(0.5));
    CHECK(g.cell[1] == doctest::Approx(0.5));
    CHECK(g.cell_count() == 8);
    CHECK(g.stride == std::vector<long long>{1, 2});
    CHECK(g.half_diagonal() == doctest::Approx(0.25 * std::sqrt(2.0)));

    CHECK(g.center(0)[0] == doctest::Approx(0.25));
    CHECK(g.center(0)[1] == doctest::Approx(0.25));
    CHECK(g.center(3)[0] == doctest::Approx(0.75));
    CHECK(g.center(3)[1] == doctest::Approx(0.75));
    for (long long i = 0; i < g.cell_count(); ++i) {
        CHECK(g.cell_of(g.center(i)) == i);
        CHECK(g.flat_of(g.coords(i)) == i);
    }

    GridSpec s = GridSpec::subdivisions(box, 4);
    CHECK(s.dims == std::vector<int>{2, 4});
    CHECK_THROWS_AS(GridSpec::make(box, 0.0), InvalidArgument);
}

TEST_CASE("occupancy matches the cover margin cell by cell") {
    Scenario sc = scenarios::walled_box(5.0);
    scenarios::add_static(sc, "blob", 1.0, {0.0, 0.0});
    GridSpec spec = GridSpec::make(sc.domain, 0.5);
    SliceGrid g = analyze_slice(sc, 0.3, spec);
    const double kappa = spec.half_diagonal();
    for (long long i = 0; i < spec.cell_count(); ++i) {
        Point x = spec.center(i);
        double m = cover_margin(sc, 0.3, x);
        CHECK(g.margin[i] == doctest::Approx(m).epsilon(1e-12));
        Occ want = m > kappa ? Occ::Free : (m < -kappa ? Occ::Covered : Occ::Marginal);
        CHECK(g.occ[i] == want);
        CHECK((g.comp[i] >= 0) == (g.occ[i] == Occ::Free));
    }
    CHECK(g.occ[spec.cell_of({0.0, 0.0})] == Occ::Covered);
    CHECK(g.occ[spec.cell_of({3.0, 3.0})] == Occ::Free);
    // the free region is the box interior minus the central blob: one piece
    CHECK(g.comp_count == 1);
}

TEST_CASE("free components are labeled by their smallest cell") {
    Scenario sc = scenarios::walled_box(5.0);
    for (int y = -4; y <= 4; ++y)
        scenarios::add_static(sc, "wall" + std::to_string(y + 4), 0.65, {0.0, (double)y});
    GridSpec spec = GridSpec::make(sc.domain, 0.25);
    SliceGrid g = analyze_slice(sc, 0.0, spec);
    REQUIRE(g.comp_count == 2);
    CHECK(g.comp_of_point({-2.5, 0.0}) == 0); // scan order reaches the left side first
    CHECK(g.comp_of_point({2.5, 0.0}) == 1);
    CHECK(g.label(0) == "c" + std::to_string(g.comp_rep[0]));
    CHECK(g.comp_rep[0] < g.comp_rep[1]);
    CHECK(g.comp_max_margin[0] > 1.0);

    SliceGrid again = analyze_slice(sc, 0.0, spec);
    CHECK(again.labels() == g.labels());
    CHECK(again.comp == g.comp);

    CHECK_NOTHROW(check_clearance(sc, g));
}

TEST_CASE("a fully covered slice has no components and passes the checks") {
    Scenario sc = scenarios::walled_box(2.0);
    scenarios::add_static(sc, "giant", 5.0, {0.0, 0.0});
    GridSpec spec = GridSpec::make(sc.domain, 0.25);
    SliceGrid g = analyze_slice(sc, 0.5, spec);
    CHECK(g.comp_count == 0);
    CHECK_NOTHROW(check_clearance(sc, g));
}

TEST_CASE("clearance rejects components shallower than twice the diagonal") {
    Scenario sc = scenarios::walled_box(2.0);
    GridSpec coarse = GridSpec::make(sc.domain, 0.8);
    SliceGrid g = analyze_slice(sc, 0.0, coarse);
    REQUIRE(g.comp_count >= 1);
    CHECK_THROWS_AS(check_clearance(sc, g), ClearanceTooSmall);
    GridSpec fine = GridSpec::make(sc.domain, 0.2);
    CHECK_NOTHROW(check_clearance(sc, analyze_slice(sc, 0.0, fine)));
}

TEST_CASE("clearance rejects marginal bridges between components") {
    // A wall with a gap whose clear width keeps the midpoint margin at 0.1,
    // below kappa for 0.25 cells: the corridor reads MARGINAL, not FREE.
    Scenario sc = scenarios::walled_box(5.0);
    for (int k = 0; k < 5; ++k) {
        scenarios::add_static(sc, "wallp" + std::to_string(k), 0.9, {0.0, 1.0 + 0.8 * k});
        scenarios::add_static(sc, "walln" + std::to_string(k), 0.9, {0.0, -1.0 - 0.8 * k});
    }
    GridSpec spec = GridSpec::make(sc.domain, 0.25);
    SliceGrid g = analyze_slice(sc, 0.0, spec);
    REQUIRE(g.comp_count == 2); // the corridor is not free at this resolution
    CHECK_THROWS_AS(check_clearance(sc, g), ClearanceTooSmall);
}

TEST_CASE("pocket guard flags gaps smaller than a cell") {
    // Equilateral triple with pairwise overlap and an uncovered center gap
    // of depth 0.097. The gap is invisible at 0.25 cells. At 0.02 cells the
    // pocket is seen, but the seal pinches to zero thickness where the
    // circles cross, so the slice is still rejected: a triple pocket never
    // has usable clearance.
    Scenario sc = scenarios::walled_box(5.0);
    const double r = 1.9 / std::sqrt(3.0);
    scenarios::add_static(sc, "a", 1.0, {0.0, r});
    scenarios::add_static(sc, "b", 1.0, {-0.95, -r / 2.0});
    scenarios::add_static(sc, "c", 1.0, {0.95, -r / 2.0});

    GridSpec coarse = GridSpec::make(sc.domain, 0.25);
    SliceGrid gc = analyze_slice(sc, 0.0, coarse);
    CHECK(gc.comp_count == 1); // the gap is missed entirely
    CHECK_THROWS_AS(check_clearance(sc, gc), ClearanceTooSmall);

    GridSpec fine = GridSpec::make(sc.domain, 0.02);
    SliceGrid gf = analyze_slice(sc, 0.0, fine);
    CHECK(gf.comp_count == 2); // outer region plus the pocket
    CHECK_THROWS_AS(check_clearance(sc, gf), ClearanceTooSmall);
}

TEST_CASE("a dense ring seals a pocket with real clearance") {
    Scenario sc = scenarios::walled_box(5.0);
    scenarios::add_ring(sc, "ring", {0.0, 0.0}, 2.0, 14, 0.95);
    GridSpec spec = GridSpec::make(sc.domain, 0.25);
    SliceGrid g = analyze_slice(sc, 0.0, spec);
    REQUIRE(g.comp_count == 2);
    CHECK_NOTHROW(check_clearance(sc, g));
    CHECK(g.comp_of_point({0.0, 0.0}) == g.comp_of_point({0.1, 0.1}));
    CHECK(g.comp_of_point({0.0, 0.0}) != g.comp_of_point({3.5, 0.0}));
    // the outer room winds once around the ring, the pocket is simply
    // connected
    int outer = g.comp_of_point({3.5, 0.0});
    int pocket = g.comp_of_point({0.0, 0.0});
    CHECK(holes_of_component(g, outer).count() == 1);
    CHECK(holes_of_component(g, pocket).count() == 0);
}

TEST_CASE("march_components follows a merge across a removal") {
    Scenario sc = chambered_box();
    GridSpec spec = GridSpec::make(sc.domain, 0.25);
    SliceGrid before = analyze_slice(sc, 0.1, spec); // door closed: two chambers
    SliceGrid after = analyze_slice(sc, 0.7, spec);  // door well clear: one room
    REQUIRE(before.comp_count == 2);
    REQUIRE(after.comp_count == 1);

    std::vector<int> onto = march_components(sc, before, after);
    REQUIRE(onto.size() == 2);
    CHECK(onto[0] == 0);
    CHECK(onto[1] == 0);

    // the reverse direction would need the single room to split, which the
    // tracker rejects as untrustworthy
    CHECK_THROWS_AS(march_components(sc, after, before), ClearanceTooSmall);
}

TEST_CASE("holes of a component count its enclosed islands") {
    Scenario sc = scenarios::walled_box(5.0);
    GridSpec spec = GridSpec::make(sc.domain, 0.25);
    SliceGrid empty = analyze_slice(sc, 0.0, spec);
    REQUIRE(empty.comp_count == 1);
    CHECK(holes_of_component(empty, 0).count() == 0);

    scenarios::add_static(sc, "island", 0.8, {1.5, 1.5});
    SliceGrid one = analyze_slice(sc, 0.0, spec);
    REQUIRE(one.comp_count == 1);
    HoleSet hs = holes_of_component(one, 0);
    REQUIRE(hs.count() == 1);
    Point deep = spec.center(hs.deep[0]);
    CHECK(std::fabs(deep[0] - 1.5) < 0.2);
    CHECK(std::fabs(deep[1] - 1.5) < 0.2);
    CHECK_THROWS_AS(holes_of_component(one, 5), InvalidArgument);
}

TEST_CASE("march_h1 tracks splitting and appearing holes") {
    // An island ball sits enclosed at (0, 3.1). A mover rises from (0, 0.5)
    // to (0, 4.3): it merges with the island around t = 0.263 and docks onto
    // the fence around t = 0.803.
    Scenario sc = scenarios::walled_box(5.0);
    scenarios::add_static(sc, "island", 0.8, {0.0, 3.1});
    scenarios::add_moving(sc, "mover", 0.8, {{0.0, {0.0, 0.5}}, {1.0, {0.0, 4.3}}});
    GridSpec spec = GridSpec::make(sc.domain, 0.25);

    SliceGrid apart = analyze_slice(sc, 0.1, spec);  // island and mover separate
    SliceGrid merged = analyze_slice(sc, 0.5, spec); // one enclosed blob
    SliceGrid docked = analyze_slice(sc, 0.95, spec); // blob attached to the fence
    REQUIRE(apart.comp_count == 1);
    REQUIRE(merged.comp_count == 1);
    REQUIRE(docked.comp_count == 1);
    REQUIRE(holes_of_component(apart, 0).count() == 2);
    REQUIRE(holes_of_component(merged, 0).count() == 1);
    REQUIRE(holes_of_component(docked, 0).count() == 0);

    // no event between these times: identity on the single hole
    int landed = -1;
    IntMat keep = march_h1(sc, analyze_slice(sc, 0.45, spec), 0, merged, &landed);
    REQUIRE(keep.size() == 1);
    REQUIRE(keep[0].size() == 1);
    CHECK(keep[0][0] == 1);
    CHECK(landed == 0);

    // across the merge, toward the roomier earlier slice: the single loop
    // around the blob becomes the sum of the loops around island and mover
    IntMat split = march_h1(sc, merged, 0, apart, nullptr);
    REQUIRE(split.size() == 2);
    REQUIRE(split[0].size() == 1);
    CHECK(split[0][0] == 1);
    CHECK(split[1][0] == 1);

    // across the docking: the loop appears out of nothing and no old loop
    // maps onto it, so the matrix is a single empty row
    IntMat born = march_h1(sc, docked, 0, merged, nullptr);
    REQUIRE(born.size() == 1);
    CHECK(born[0].empty());
}
