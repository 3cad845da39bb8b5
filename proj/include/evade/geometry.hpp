#pragma once

#include <string>
#include <vector>

#include "evade/decimal.hpp"
#include "evade/simplicial.hpp"

namespace evade {

using Point = std::vector<double>;

double dist(const Point& a, const Point& b);

/* One sensor: a ball of fixed radius whose center moves piecewise linearly.
 * Waypoint times are exact decimals, strictly increasing, and must span
 * [0,1]. Fence sensors never move; their job is to seal the domain border. */
struct Waypoint {
    Decimal time;
    std::vector<Decimal> position;
};

struct Trajectory {
    std::string sensor_id;
    Decimal radius;
    bool fence = false;
    std::vector<Waypoint> waypoints;

    bool mobile() const; // true when any two waypoints differ (exact compare)
    double max_speed() const;
};

/* Piecewise-linear position at time t in [0,1]; exact at waypoints. */
Point position_at(const Trajectory& traj, double t);

struct Box {
    std::vector<Decimal> min;
    std::vector<Decimal> max;

    int dim() const { return (int)min.size(); }
    double extent(int axis) const { return max[axis].value - min[axis].value; }
    bool contains(const std::vector<Decimal>& p) const; // exact, closed box
};

struct Scenario {
    int dimension = 2;
    Box domain;
    CoeffField field = CoeffField::Rational;
    std::vector<Trajectory> sensors;

    /* Structural checks plus sampled coverage of the domain boundary by the
     * fence balls. Throws InvalidArgument with the offending field. */
    void validate(double tol = 1e-9) const;

    Point center_at(int sensor, double t) const;
    double radius_of(int sensor) const { return sensors[sensor].radius.value; }
    double max_speed() const;
};

/* Smallest enclosing ball of a nonempty point set, d <= 8. Deterministic:
 * the internal ordering is shuffled with a fixed seed. */
struct MiniballResult {
    Point center;
    double radius = 0.0;
};
MiniballResult miniball(const std::vector<Point>& points);

/* Signed margin of a joint ball intersection: the minimum over x of
 * max_j (|x - c_j| - r_j). Negative means the balls share a point with room
 * to spare; positive means they miss. Exact up to floating point: the
 * optimum is located by enumerating support subsets. The minimizing point is
 * written to argmin when given. */
double intersection_margin(const std::vector<Point>& centers,
                           const std::vector<double>& radii,
                           Point* argmin = nullptr);

enum class Overlap { Yes, No, Marginal };

/* Whether all the balls share a common point, with MARGINAL returned when
 * the margin is within tol of zero. */
Overlap balls_intersect(const std::vector<Point>& centers,
                        const std::vector<double>& radii, double tol);

/* Signed distance of x to the covered region: min_j (|x - c_j(t)| - r_j).
 * Negative means x is inside some sensor ball at time t. */
double cover_margin(const Scenario& sc, double t, const Point& x);

/* A change of the nerve: one or more simplices (sensor index sets) appear
 * or disappear at the same time. Every event is pure: either additions or
 * removals. Changes in both directions inside one merge window would break
 * the one-way gluing of consecutive slices and are rejected as non-generic. */
enum class ChangeKind { Added, Removed };

struct NerveEvent {
    double time = 0.0;
    ChangeKind change = ChangeKind::Added;
    std::vector<Simplex> simplices; // sorted sensor index sets
};

struct EventSchedule {
    std::vector<NerveEvent> events;       // sorted by time, strictly inside (0,1)
    std::vector<double> slice_times;      // 0, midpoints between events, 1
};

struct DetectOptions {
    double tol = 1e-9;      // margin tolerance and time tolerance
    double dt_scan = 1e-3;  // initial sampling resolution along t
};

/* Finds every time at which some candidate simplex's joint intersection
 * appears or disappears. Candidates are cliques of the pairwise interaction
 * graph with at most d+1 vertices. Sign changes are located by scanning at
 * dt_scan and bisecting. Persistent tangencies, tangencies at t=0 or t=1,
 * and events on the boundary of [0,1] raise NonGenericScenario. */
EventSchedule detect_events(const Scenario& sc, const DetectOptions& opt = {});

} // namespace evade
