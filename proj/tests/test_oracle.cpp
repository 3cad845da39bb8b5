#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "evade/errors.hpp"
#include "evade/geometry.hpp"
#include "evade/grid.hpp"
#include "evade/oracle.hpp"
#include "scenarios.hpp"

using namespace evade;

namespace {

// World on the [0,w]x[0,h] unit grid from one occupancy string per step,
// '.' free and '#' blocked, cell (x, y) at string index x + w*y.
GridWorld tiny_world(int w, int h, const std::vector<std::string>& frames) {
    Box box;
    box.min = {Decimal::from_double(0.0), Decimal::from_double(0.0)};
    box.max = {Decimal::from_double(w), Decimal::from_double(h)};
    GridWorld world;
    world.spec = GridSpec::make(box, 1.0);
    REQUIRE(world.spec.cell_count() == (long long)w * h);
    for (size_t s = 0; s < frames.size(); ++s) {
        REQUIRE(frames[s].size() == (size_t)(w * h));
        world.times.push_back(frames.size() == 1 ? 0.0
                                                 : (double)s / (frames.size() - 1));
        std::vector<char> row(frames[s].size());
        for (size_t c = 0; c < frames[s].size(); ++c)
            row[c] = frames[s][c] == '.' ? 1 : 0;
        world.free_cells.push_back(std::move(row));
    }
    return world;
}

void require_section(const GridWorld& w, const ReachResult& r) {
    REQUIRE(r.exists);
    REQUIRE(r.witness.size() == (size_t)w.steps());
    long long prev = -1;
    for (int s = 0; s < w.steps(); ++s) {
        CHECK(r.witness[s].first == doctest::Approx(w.times[s]));
        long long cell = w.spec.cell_of(r.witness[s].second);
        CHECK(w.is_free(s, cell));
        if (s > 0) {
            auto a = w.spec.coords(prev), b = w.spec.coords(cell);
            int diff = 0;
            for (size_t k = 0; k < a.size(); ++k) diff += std::abs(a[k] - b[k]);
            CHECK(diff <= 1);
        }
        prev = cell;
    }
}

} // namespace

TEST_CASE("a single always-free cell carries exactly one section") {
    GridWorld w = tiny_world(1, 1, {".", ".", "."});
    CHECK(path_space_components(w) == 1);
    ReachResult r = grid_reachability(w);
    require_section(w, r);
    for (const auto& [t, p] : r.witness) {
        CHECK(p[0] == doctest::Approx(0.5));
        CHECK(p[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("disconnected corridors keep their sections apart") {
    // two horizontal corridors separated by a blocked middle row
    GridWorld w = tiny_world(3, 3, {"...###...", "...###...", "...###..."});
    CHECK(path_space_components(w) == 2);
    std::vector<std::vector<int>> comp;
    CHECK(spacetime_components(w, comp) == 2);
    CHECK(comp[0][0] == comp[2][2]);       // same corridor, any step
    CHECK(comp[0][0] != comp[0][6]);       // across the blocked row
    require_section(w, grid_reachability(w));
}

TEST_CASE("a static obstacle splits a narrow corridor into two sections") {
    GridWorld w = tiny_world(3, 1, {".#.", ".#.", ".#.", ".#."});
    CHECK(path_space_components(w) == 2);
    ReachResult r = grid_reachability(w);
    require_section(w, r);
    CHECK(w.spec.cell_of(r.witness.front().second) ==
          w.spec.cell_of(r.witness.back().second));
}

TEST_CASE("a fully covered step blocks every section") {
    GridWorld w = tiny_world(2, 1, {"..", "##", ".."});
    ReachResult r = grid_reachability(w);
    CHECK_FALSE(r.exists);
    CHECK(r.witness.empty());
    CHECK(path_space_components(w) == 0);
    std::vector<std::vector<int>> comp;
    CHECK(spacetime_components(w, comp) == 2);
}

TEST_CASE("single moves glue every section of an open room") {
    GridWorld w = tiny_world(2, 2, {"....", "...."});
    CHECK(path_space_components(w) == 1);
}

TEST_CASE("a momentary opening adds crossing sections without merging the rest") {
    // middle cell opens at the middle step only: sections may stay left,
    // stay right, or cross in either direction, and no move turns a
    // crossing into a stay
    GridWorld open_mid = tiny_world(3, 1, {".#.", "...", ".#."});
    CHECK(path_space_components(open_mid) == 4);
    GridWorld closed = tiny_world(3, 1, {".#.", ".#.", ".#."});
    CHECK(path_space_components(closed) == 2);
}

TEST_CASE("enumeration refuses worlds beyond its budgets") {
    std::vector<std::string> many(260, std::string(400, '.'));
    GridWorld big_states = tiny_world(20, 20, many);
    CHECK_THROWS_AS(path_space_components(big_states), ResourceLimit);

    std::vector<std::string> wide(8, std::string(25, '.'));
    GridWorld big_paths = tiny_world(5, 5, wide);
    CHECK_THROWS_AS(path_space_components(big_paths, 100000, 1000), ResourceLimit);
}

TEST_CASE("grid world steps subdivide the event schedule") {
    Scenario sc = scenarios::reopening_door();
    sc.validate();
    EventSchedule es = detect_events(sc);
    REQUIRE(!es.events.empty());

    GridSpec spec = GridSpec::make(sc.domain, 0.2);
    GridWorld w = build_grid_world(sc, spec, es, 0.02);

    REQUIRE(w.steps() >= 2);
    CHECK(w.times.front() == 0.0);
    CHECK(w.times.back() == 1.0);
    for (int s = 1; s < w.steps(); ++s) {
        CHECK(w.times[s] > w.times[s - 1]);
        CHECK(w.times[s] - w.times[s - 1] <= 0.02 + 1e-9);
    }
    for (const NerveEvent& ev : es.events) {
        bool hit = false;
        for (double t : w.times)
            if (std::abs(t - ev.time) < 1e-12) hit = true;
        CHECK(hit);
    }

    // occupancy rows agree with the slice analysis they came from
    SliceGrid g = analyze_slice(sc, w.times[3], spec);
    for (long long c = 0; c < spec.cell_count(); ++c)
        CHECK(w.is_free(3, c) == (g.occ[c] == Occ::Free));
}

TEST_CASE("the reopening door forces a crossing and the search finds it") {
    Scenario sc = scenarios::reopening_door();
    sc.validate();
    EventSchedule es = detect_events(sc);
    GridSpec spec = GridSpec::make(sc.domain, 0.15);
    GridWorld w = build_grid_world(sc, spec, es, 0.02);

    ReachResult r = grid_reachability(w);
    require_section(w, r);

    // every survivor starts in the pen west of the wall
    CHECK(r.witness.front().second[0] < -0.55);
    CHECK(r.witness.front().second[0] > -1.8);
    // and ends past the wall gap, which reopens the right half
    CHECK(r.witness.back().second[0] > -0.3);
    bool right_open = false;
    for (long long c = 0; c < spec.cell_count(); ++c)
        if (w.is_free(w.steps() - 1, c) && spec.center(c)[0] > 0.7) right_open = true;
    CHECK(right_open);

    double cross_time = -1.0;
    for (int s = 0; s < w.steps(); ++s)
        if (r.witness[s].second[0] > -0.6) {
            cross_time = w.times[s];
            break;
        }
    CHECK(cross_time > 0.2);
    CHECK(cross_time < 0.75);
}

TEST_CASE("removing a sensor never blocks an existing witness") {
    Scenario sc = scenarios::reopening_door();
    sc.validate();
    EventSchedule es = detect_events(sc);
    GridSpec spec = GridSpec::make(sc.domain, 0.2);
    REQUIRE(grid_reachability(build_grid_world(sc, spec, es, 0.05)).exists);

    // the full schedule subdivides every reduced one, so it stays valid
    for (size_t drop = 0; drop < sc.sensors.size(); ++drop) {
        Scenario red = sc;
        red.sensors.erase(red.sensors.begin() + drop);
        GridWorld w = build_grid_world(red, spec, es, 0.05);
        CHECK(grid_reachability(w).exists);
    }
}

TEST_CASE("a sweeping wall leaves no section at any resolution") {
    Scenario sc = scenarios::sweeping_wall();
    sc.validate();
    EventSchedule es = detect_events(sc);
    GridSpec spec = GridSpec::make(sc.domain, 0.2);
    GridWorld w = build_grid_world(sc, spec, es, 0.02);

    ReachResult r = grid_reachability(w);
    CHECK_FALSE(r.exists);
    CHECK(r.witness.empty());

    // space does reopen behind the wall, but no section reaches it
    std::vector<std::vector<int>> comp;
    CHECK(spacetime_components(w, comp) >= 2);
    bool late_free = false;
    for (long long c = 0; c < spec.cell_count(); ++c)
        if (w.is_free(w.steps() - 1, c)) late_free = true;
    CHECK(late_free);
}

TEST_CASE("two static chambers stay reachable and separate") {
    Scenario sc = scenarios::two_chambers();
    sc.validate();
    EventSchedule es = detect_events(sc);
    CHECK(es.events.empty());

    GridSpec spec = GridSpec::make(sc.domain, 0.25);
    GridWorld w = build_grid_world(sc, spec, es, 0.1);
    require_section(w, grid_reachability(w));
    std::vector<std::vector<int>> comp;
    CHECK(spacetime_components(w, comp) == 2);
}
