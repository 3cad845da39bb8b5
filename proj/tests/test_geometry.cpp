#include "doctest.h"

#include <cmath>
#include <random>

#include "evade/errors.hpp"
#include "evade/geometry.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace evade;

namespace {

Trajectory line_sensor(const std::string& id, double r, std::vector<double> from,
                       std::vector<double> to) {
    Trajectory t;
    t.sensor_id = id;
    t.radius = Decimal::from_double(r);
    std::vector<Decimal> a, b;
    for (double x : from) a.push_back(Decimal::from_double(x));
    for (double x : to) b.push_back(Decimal::from_double(x));
    t.waypoints.push_back({Decimal::from_double(0.0), a});
    t.waypoints.push_back({Decimal::from_double(1.0), b});
    return t;
}

} // namespace

TEST_CASE("piecewise linear position evaluation") {
    auto t = line_sensor("s", 1.0, {0, 0}, {2, 0});
    CHECK(position_at(t, 0.5) == Point{1, 0});
    CHECK(position_at(t, 0.0) == Point{0, 0});
    CHECK(position_at(t, 1.0) == Point{2, 0});

    auto back = line_sensor("s", 1.0, {3, 0}, {0, 0});
    Point p = position_at(back, 1.0 / 3.0);
    CHECK(p[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p[1] == 0.0);

    auto constant = line_sensor("s", 1.0, {4, 5}, {4, 5});
    CHECK(position_at(constant, 0.37) == Point{4, 5});

    CHECK_THROWS_AS(position_at(t, -0.1), InvalidArgument);
    CHECK_THROWS_AS(position_at(t, 1.1), InvalidArgument);

    // multi-segment: corners are honored exactly
    Trajectory multi;
    multi.sensor_id = "m";
    multi.radius = Decimal::from_double(1.0);
    multi.waypoints.push_back({Decimal::from_double(0.0), {Decimal::from_double(0), Decimal::from_double(0)}});
    multi.waypoints.push_back({Decimal::from_double(0.25), {Decimal::from_double(1), Decimal::from_double(1)}});
    multi.waypoints.push_back({Decimal::from_double(1.0), {Decimal::from_double(1), Decimal::from_double(-2)}});
    CHECK(position_at(multi, 0.25) == Point{1, 1});
    Point mid = position_at(multi, 0.625);
    CHECK(mid[0] == doctest::Approx(1.0));
    CHECK(mid[1] == doctest::Approx(-0.5));
}

TEST_CASE("trajectory speed and mobility") {
    auto mover = line_sensor("s", 1.0, {0, 0}, {3, 4});
    CHECK(mover.mobile());
    CHECK(mover.max_speed() == doctest::Approx(5.0));
    auto still = line_sensor("s", 1.0, {2, 2}, {2, 2});
    CHECK(!still.mobile());
    CHECK(still.max_speed() == 0.0);
}

TEST_CASE("smallest enclosing ball of hand point sets") {
    auto one = miniball({{0, 0}});
    CHECK(one.radius == 0.0);
    CHECK(one.center == Point{0, 0});

    auto two = miniball({{0, 0}, {2, 0}});
    CHECK(two.radius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(two.center[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(two.center[1] == doctest::Approx(0.0));

    auto tri = miniball({{0, 0}, {2, 0}, {1, std::sqrt(3.0)}});
    CHECK(tri.radius == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(tri.center[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tri.center[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));

    // interior points do not matter
    auto with_inner = miniball({{0, 0}, {2, 0}, {1, 0.3}});
    CHECK(with_inner.radius == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(miniball({}), InvalidArgument);
}

TEST_CASE("smallest enclosing ball matches brute force on random sets") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> coord(-5, 5);
    std::uniform_int_distribution<int> count(1, 10);
    std::uniform_int_distribution<int> dims(2, 3);
    for (int trial = 0; trial < 200; ++trial) {
        int d = dims(rng), n = count(rng);
        std::vector<Point> pts(n, Point(d));
        for (auto& p : pts)
            for (auto& x : p) x = coord(rng);
        auto fast = miniball(pts);
        auto slow = oracles::smallest_ball_brute(pts);
        CHECK(fast.radius == doctest::Approx(slow.radius).epsilon(1e-9));
        for (const auto& p : pts) CHECK(dist(p, fast.center) <= fast.radius + 1e-9);
    }
}

TEST_CASE("smallest enclosing ball is rigid-motion invariant") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> coord(-3, 3), angle(0, 6.283);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point> pts(6, Point(2));
        for (auto& p : pts)
            for (auto& x : p) x = coord(rng);
        double r0 = miniball(pts).radius;
        double a = angle(rng), dx = coord(rng), dy = coord(rng);
        std::vector<Point> moved;
        for (const auto& p : pts)
            moved.push_back({p[0] * std::cos(a) - p[1] * std::sin(a) + dx,
                             p[0] * std::sin(a) + p[1] * std::cos(a) + dy});
        CHECK(miniball(moved).radius == doctest::Approx(r0).epsilon(1e-9));
    }
}

TEST_CASE("ball intersection predicate on hand cases") {
    double tol = 1e-9;
    CHECK(balls_intersect({{0, 0}, {2, 0}}, {1, 1}, tol) == Overlap::Marginal);
    CHECK(balls_intersect({{0, 0}, {2, 0}}, {0.9, 0.9}, tol) == Overlap::No);
    CHECK(balls_intersect({{0, 0}, {2, 0}}, {1.2, 1.2}, tol) == Overlap::Yes);

    // equilateral triple, side 2: pairwise yes at r=1.1, but the triple
    // needs the circumradius 2/sqrt(3) ~ 1.1547
    std::vector<Point> tri = {{0, 0}, {2, 0}, {1, std::sqrt(3.0)}};
    CHECK(balls_intersect(tri, {1.1, 1.1, 1.1}, tol) == Overlap::No);
    CHECK(balls_intersect({tri[0], tri[1]}, {1.1, 1.1}, tol) == Overlap::Yes);
    CHECK(balls_intersect({tri[0], tri[2]}, {1.1, 1.1}, tol) == Overlap::Yes);
    CHECK(balls_intersect({tri[1], tri[2]}, {1.1, 1.1}, tol) == Overlap::Yes);
    CHECK(balls_intersect(tri, {1.2, 1.2, 1.2}, tol) == Overlap::Yes);

    // one ball containing another
    CHECK(balls_intersect({{0, 0}, {0.1, 0}}, {5, 0.2}, tol) == Overlap::Yes);

    CHECK_THROWS_AS(balls_intersect({}, {}, tol), InvalidArgument);
    CHECK_THROWS_AS(balls_intersect({{0, 0}}, {1, 2}, tol), InvalidArgument);
}

TEST_CASE("intersection margin matches dense grid search") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> coord(-1.5, 1.5), rad(0.5, 1.5);
    std::uniform_int_distribution<int> count(1, 4);
    for (int trial = 0; trial < 40; ++trial) {
        int n = count(rng);
        std::vector<Point> centers(n, Point(2));
        std::vector<double> radii(n);
        for (auto& c : centers)
            for (auto& x : c) x = coord(rng);
        for (auto& r : radii) r = rad(rng);
        double got = intersection_margin(centers, radii);
        double grid = oracles::minimax_margin_grid(centers, radii, 0.01);
        // the grid overshoots by at most its pitch times sqrt(2)
        CHECK(got <= grid + 1e-9);
        CHECK(got >= grid - 0.02);
    }
}

TEST_CASE("intersection margin against the equal-radius formula") {
    std::mt19937 rng(4096);
    std::uniform_real_distribution<double> coord(-2, 2), rad(0.3, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + trial % 3;
        std::vector<Point> centers(n, Point(2));
        for (auto& c : centers)
            for (auto& x : c) x = coord(rng);
        double r = rad(rng);
        std::vector<double> radii(n, r);
        // the general support-set path must agree with miniball
        double general = intersection_margin(centers, radii);
        double viaMiniball = miniball(centers).radius - r;
        CHECK(general == doctest::Approx(viaMiniball).epsilon(1e-9));
    }
}

TEST_CASE("margin minimizer is a real point achieving the margin") {
    std::vector<Point> centers = {{0, 0}, {3, 0}, {1.5, 2}};
    std::vector<double> radii = {1.0, 1.4, 0.8};
    Point x;
    double m = intersection_margin(centers, radii, &x);
    REQUIRE(x.size() == 2);
    double v = -1e300;
    for (size_t j = 0; j < centers.size(); ++j)
        v = std::max(v, dist(x, centers[j]) - radii[j]);
    CHECK(v == doctest::Approx(m).epsilon(1e-9));
}

TEST_CASE("scenario validation") {
    Scenario sc = scenarios::walled_box(10.0);
    CHECK_NOTHROW(sc.validate());

    // waypoint outside the domain
    Scenario bad = sc;
    scenarios::add_moving(bad, "m", 1.0, {{0.0, {0, 0}}, {1.0, {11, 0}}});
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    // fence sensor that moves
    Scenario bad2 = sc;
    bad2.sensors[0].waypoints.back().position[0] = Decimal::from_double(3.25);
    CHECK_THROWS_AS(bad2.validate(), InvalidArgument);

    // missing fence: boundary uncovered
    Scenario open;
    open.dimension = 2;
    open.domain = sc.domain;
    scenarios::add_static(open, "s", 1.0, {0, 0});
    CHECK_THROWS_AS(open.validate(), InvalidArgument);

    // duplicate ids
    Scenario dup = sc;
    scenarios::add_static(dup, "x", 1.0, {0, 0});
    scenarios::add_static(dup, "x", 1.0, {3, 0});
    CHECK_THROWS_AS(dup.validate(), InvalidArgument);

    // nonpositive radius
    Scenario zero = sc;
    scenarios::add_static(zero, "z", 0.0, {0, 0});
    CHECK_THROWS_AS(zero.validate(), InvalidArgument);
}

TEST_CASE("event detection: approach creates one added edge") {
    Scenario sc = scenarios::walled_box(10.0);
    scenarios::add_static(sc, "a", 1.0, {0, 0});
    scenarios::add_moving(sc, "b", 1.0, {{0.0, {3, 0}}, {1.0, {0.25, 0}}});
    // distance 3 - 2.75 t = 2  =>  t = 4/11
    auto schedule = detect_events(sc);
    REQUIRE(schedule.events.size() == 1);
    const auto& e = schedule.events[0];
    CHECK(e.change == ChangeKind::Added);
    CHECK(e.time == doctest::Approx(4.0 / 11.0).epsilon(1e-7));
    int ia = -1, ib = -1;
    for (size_t i = 0; i < sc.sensors.size(); ++i) {
        if (sc.sensors[i].sensor_id == "a") ia = (int)i;
        if (sc.sensors[i].sensor_id == "b") ib = (int)i;
    }
    REQUIRE(e.simplices.size() == 1);
    CHECK(e.simplices[0] == Simplex{std::min(ia, ib), std::max(ia, ib)});
    CHECK(schedule.slice_times == std::vector<double>{0.0, 1.0});
}

TEST_CASE("event detection: static scenario has no events") {
    Scenario sc = scenarios::walled_box(10.0);
    scenarios::add_static(sc, "a", 1.0, {0, 0});
    scenarios::add_static(sc, "b", 1.0, {4, 0});
    auto schedule = detect_events(sc);
    CHECK(schedule.events.empty());
    CHECK(schedule.slice_times == std::vector<double>{0.0, 1.0});
}

TEST_CASE("event detection: crossing gives added then removed at quadratic roots") {
    Scenario sc = scenarios::walled_box(10.0);
    scenarios::add_static(sc, "a", 1.0, {0, 0});
    scenarios::add_moving(sc, "b", 1.0, {{0.0, {-4, 0.5}}, {1.0, {4, 0.5}}});
    auto schedule = detect_events(sc);
    REQUIRE(schedule.events.size() == 2);
    CHECK(schedule.events[0].change == ChangeKind::Added);
    CHECK(schedule.events[1].change == ChangeKind::Removed);

    auto want = oracles::pair_event_times_closed_form({0, 0}, {0, 0}, {-4, 0.5},
                                                      {4, 0.5}, 2.0);
    REQUIRE(want.size() == 2);
    CHECK(schedule.events[0].time == doctest::Approx(want[0]).epsilon(1e-9));
    CHECK(schedule.events[1].time == doctest::Approx(want[1]).epsilon(1e-9));

    REQUIRE(schedule.slice_times.size() == 3);
    CHECK(schedule.slice_times[1] ==
          doctest::Approx(0.5 * (want[0] + want[1])).epsilon(1e-9));
}

TEST_CASE("event times are stable under refining the scan step") {
    Scenario sc = scenarios::walled_box(10.0);
    scenarios::add_static(sc, "a", 1.0, {-1, 0});
    scenarios::add_moving(sc, "b", 1.2, {{0.0, {4, 1}}, {0.5, {0, 1}}, {1.0, {4, 1}}});
    DetectOptions coarse, fine;
    fine.dt_scan = coarse.dt_scan / 2;
    auto a = detect_events(sc, coarse);
    auto b = detect_events(sc, fine);
    REQUIRE(a.events.size() == b.events.size());
    for (size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].time == doctest::Approx(b.events[i].time).epsilon(1e-8));
        CHECK(a.events[i].change == b.events[i].change);
        CHECK(a.events[i].simplices == b.events[i].simplices);
    }
}

TEST_CASE("event detection reports each reported simplex flipping its margin") {
    Scenario sc = scenarios::walled_box(10.0);
    scenarios::add_static(sc, "a", 1.1, {0, 0});
    scenarios::add_static(sc, "b", 1.1, {2, 0});
    scenarios::add_moving(sc, "c", 1.1, {{0.0, {1, 4}}, {1.0, {1, 0.8}}});
    auto schedule = detect_events(sc);
    REQUIRE(!schedule.events.empty());
    for (size_t k = 0; k < schedule.events.size(); ++k) {
        const auto& e = schedule.events[k];
        double before = k == 0 ? 0.0 : schedule.events[k - 1].time;
        double after = k + 1 == schedule.events.size() ? 1.0 : schedule.events[k + 1].time;
        double tb = 0.5 * (before + e.time), ta = 0.5 * (e.time + after);
        for (const auto& s : e.simplices) {
            std::vector<Point> cb, ca;
            std::vector<double> rr;
            for (int j : s) {
                cb.push_back(sc.center_at(j, tb));
                ca.push_back(sc.center_at(j, ta));
                rr.push_back(sc.radius_of(j));
            }
            Overlap ob = balls_intersect(cb, rr, 1e-9);
            Overlap oa = balls_intersect(ca, rr, 1e-9);
            if (e.change == ChangeKind::Added) {
                CHECK(ob == Overlap::No);
                CHECK(oa == Overlap::Yes);
            } else {
                CHECK(ob == Overlap::Yes);
                CHECK(oa == Overlap::No);
            }
        }
    }
}

TEST_CASE("non-generic scenarios are rejected") {
    // two static sensors exactly tangent
    Scenario sc = scenarios::walled_box(10.0);
    scenarios::add_static(sc, "a", 1.0, {0, 0});
    scenarios::add_static(sc, "b", 1.0, {2, 0});
    CHECK_THROWS_AS(detect_events(sc), NonGenericScenario);

    // mobile sensor arriving at exact tangency at t=1
    Scenario sc2 = scenarios::walled_box(10.0);
    scenarios::add_static(sc2, "a", 1.0, {0, 0});
    scenarios::add_moving(sc2, "b", 1.0, {{0.0, {5, 0}}, {1.0, {2, 0}}});
    CHECK_THROWS_AS(detect_events(sc2), NonGenericScenario);

    // approach to tangency and retreat without crossing
    Scenario sc3 = scenarios::walled_box(10.0);
    scenarios::add_static(sc3, "a", 1.0, {0, 0});
    scenarios::add_moving(sc3, "b", 1.0, {{0.0, {5, 0}}, {0.5, {2, 0}}, {1.0, {5, 0}}});
    CHECK_THROWS_AS(detect_events(sc3), NonGenericScenario);
}

TEST_CASE("cover margin sign tracks containment") {
    Scenario sc = scenarios::walled_box(10.0);
    scenarios::add_static(sc, "a", 1.5, {0, 0});
    CHECK(cover_margin(sc, 0.3, {0, 0}) == doctest::Approx(-1.5));
    CHECK(cover_margin(sc, 0.3, {3, 0}) == doctest::Approx(1.5));
    CHECK(cover_margin(sc, 0.3, {0, 1.5}) == doctest::Approx(0.0));
}
