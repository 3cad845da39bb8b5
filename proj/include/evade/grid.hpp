#pragma once

#include <string>
#include <vector>

#include "evade/geometry.hpp"

namespace evade {

/* Uniform cell grid tiling the domain box exactly: each axis is divided
 * into whole cells of edge at most the requested size. Flat indices run
 * with axis 0 fastest. */
struct GridSpec {
    Box box;
    std::vector<int> dims;
    std::vector<double> cell;        // per-axis edge length
    std::vector<long long> stride;

    static GridSpec make(const Box& box, double max_edge);
    /* n cells along the longest axis, other axes scaled to keep cells
     * close to square. */
    static GridSpec subdivisions(const Box& box, int n);

    int dim() const { return (int)dims.size(); }
    long long cell_count() const;
    double half_diagonal() const;    // kappa, the occupancy threshold
    double diagonal() const;
    Point center(long long flat) const;
    std::vector<int> coords(long long flat) const;
    long long flat_of(const std::vector<int>& c) const;
    long long cell_of(const Point& p) const; // p is clamped into the box
};

enum class Occ : unsigned char { Free, Covered, Marginal };

/* Occupancy of one time slice. A cell is FREE when the signed distance
 * from its center to the covered region exceeds the half diagonal kappa,
 * COVERED when below -kappa, MARGINAL in between. Since the margin changes
 * by at most kappa within a cell, every uncovered point of the domain lies
 * in a FREE or MARGINAL cell, and no chain of FREE cells can cross a
 * covered wall. Free cells are grouped by axis adjacency into components
 * numbered in order of their smallest cell, labeled "c<cell>"; the labels
 * depend only on the occupancy, so recomputing a slice reproduces them. */
struct SliceGrid {
    GridSpec spec;
    double time = 0.0;
    std::vector<double> margin;
    std::vector<Occ> occ;
    std::vector<int> comp;             // free component per cell, -1 otherwise
    int comp_count = 0;
    std::vector<long long> comp_rep;   // smallest cell of each component
    std::vector<long long> comp_deep;  // cell of maximal margin
    std::vector<double> comp_max_margin;

    std::string label(int c) const { return "c" + std::to_string(comp_rep[c]); }
    std::vector<std::string> labels() const;
    int comp_of_point(const Point& p) const; // -1 when that cell is not free
};

SliceGrid analyze_slice(const Scenario& sc, double t, const GridSpec& spec);

/* Trust checks for a slice, all throwing ClearanceTooSmall:
 *   - every free component must contain a cell whose margin exceeds twice
 *     the cell diagonal, otherwise the component may be an artifact;
 *   - adding the marginal cells must neither merge free components nor
 *     create a region with no free cell in it (no sub-resolution bridges,
 *     no sub-resolution pockets);
 *   - for every d+1 sensors that pairwise overlap without a common point,
 *     the deepest point of their mutual gap, when it is uncovered, must
 *     land in a FREE cell (a sealed gap smaller than a cell would
 *     otherwise go unseen). */
void check_clearance(const Scenario& sc, const SliceGrid& g, double tol = 1e-9);

/* Tracks free components from one slice to another by stepping time and
 * matching components of consecutive steps by overlap of their cells.
 * Components may merge along the way, which is the normal outcome of
 * crossing an event toward the roomier slice, but may not split or vanish:
 * such a step is halved, and persistent trouble at the minimum step raises
 * ClearanceTooSmall. Returns, per component of `from`, the component of
 * `to` it lands in. */
std::vector<int> march_components(const Scenario& sc, const SliceGrid& from,
                                  const SliceGrid& to);

/* Bounded complement pieces of one free component, dimension 2 only: the
 * connected groups (diagonal adjacency) of cells outside the component
 * that do not reach the grid border. The cycle rank of the component
 * equals the number of holes. deep[i] is the most covered cell of hole i,
 * the stable interior point a loop is tested against. */
struct HoleSet {
    std::vector<std::vector<long long>> holes; // sorted cell lists
    std::vector<long long> deep;

    int count() const { return (int)holes.size(); }
};
HoleSet holes_of_component(const SliceGrid& g, int comp);

/* Composite map on first homology induced by marching one free component
 * between slices, dimension 2 only. Rows index holes of the component of
 * `to` the march lands in (reported through to_comp when given), columns
 * index holes of from_comp; entry (j, i) is 1 when target hole j still
 * lies inside source hole i, so a column records what the loop around that
 * hole becomes. Holes that appear along the way get zero rows, holes that
 * fill in get zero columns. Stepping rules as in march_components. */
IntMat march_h1(const Scenario& sc, const SliceGrid& from, int from_comp,
                const SliceGrid& to, int* to_comp = nullptr);

} // namespace evade
