#pragma once

#include <utility>
#include <vector>

#include "evade/grid.hpp"

namespace evade {

/* Space-time occupancy table: one row of cells per step time. Steps
 * subdivide the event schedule, so no appearance or disappearance of a
 * corridor falls strictly inside a step, and a momentary closure cannot be
 * jumped over. Cells are free only when strictly clear of the covered
 * region (marginal cells never count as free). */
struct GridWorld {
    GridSpec spec;
    std::vector<double> times;
    std::vector<std::vector<char>> free_cells; // [step][cell]

    int steps() const { return (int)times.size(); }
    bool is_free(int step, long long cell) const { return free_cells[step][cell] != 0; }
};

GridWorld build_grid_world(const Scenario& sc, const GridSpec& spec,
                           const EventSchedule& schedule, double dt = 0.02);

/* Breadth-first reachability over (cell, step) states, moving to the same
 * or an axis-adjacent free cell at each following step. Exists when some
 * free cell of step 0 reaches the final step; the witness is one such
 * space-time polyline (step time, cell center). */
struct ReachResult {
    bool exists = false;
    std::vector<std::pair<double, Point>> witness;
};
ReachResult grid_reachability(const GridWorld& w);

/* Number of connected components of the set of lattice sections: all paths
 * choosing one free cell per step with consecutive cells equal or adjacent,
 * quotiented by single-step moves (replace one step's cell by an adjacent
 * free cell that keeps its time neighbors reachable). Throws ResourceLimit
 * when the state count exceeds state_budget or the path count exceeds
 * path_budget. */
long long path_space_components(const GridWorld& w, long long state_budget = 100000,
                                long long path_budget = 1000000);

/* Component id per (step, cell) of the space-time free region, connecting
 * cells within a step by axis adjacency and the same cell across
 * consecutive steps; -1 on non-free cells. Returns the component count.
 * A section can only ever stay inside one space-time component, so the
 * zigzag over the undivided time interval is read off from this table. */
int spacetime_components(const GridWorld& w, std::vector<std::vector<int>>& comp);

} // namespace evade
