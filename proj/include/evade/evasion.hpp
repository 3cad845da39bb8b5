#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evade/geometry.hpp"
#include "evade/grid.hpp"
#include "evade/oracle.hpp"
#include "evade/simplicial.hpp"
#include "evade/zigzag.hpp"

namespace evade {

/* One analyzed time slice: the nerve of the covered region together with
 * the labeled free components of the uncovered region. */
struct SlicePair {
    double time = 0.0;
    SimplicialComplex covered_nerve;
    SliceGrid free;
};

/* Nerve of the covered region at a non-event time: one vertex per sensor, a
 * simplex for every set of at most d+1 sensors whose balls share a common
 * point. A marginal joint overlap means t sits too close to an event and
 * raises NonGenericScenario naming the offending simplex. */
SimplicialComplex slice_nerve(const Scenario& sc, double t, double tol = 1e-9);

/* Free components of the slice at t: occupancy analysis plus the clearance
 * checks. Throws ClearanceTooSmall as documented on check_clearance. */
SliceGrid free_components(const Scenario& sc, double t, const GridSpec& spec,
                          double tol = 1e-9);

SlicePair build_slice(const Scenario& sc, double t, const GridSpec& spec,
                      double tol = 1e-9);

/* All slices of a schedule: one per slice time. */
std::vector<SlicePair> build_slices(const Scenario& sc, const EventSchedule& schedule,
                                    const GridSpec& spec, double tol = 1e-9);

/* The slice nerves glued along the schedule. Each consecutive pair must
 * differ exactly by its event's simplices, added or removed as the event
 * says; any drift means a crossing was missed and raises
 * NonGenericScenario. */
struct StackedComplex {
    std::vector<SimplicialComplex> nerves; // one per slice
    std::vector<ChangeKind> glue;          // one per event
};
StackedComplex build_stacked(const EventSchedule& schedule,
                             const std::vector<SlicePair>& slices);

/* Zigzag of free-component sets over the schedule. Fibers are the slice
 * components; the span of an interval is the side with the larger free
 * region (the earlier slice when the event adds coverage, the later one
 * when it removes coverage), into which the other side is tracked by
 * marching the grid across the interval. A span with no event (only the
 * eventless whole-interval schedule has one) must march to a bijection. */
ZigzagSets build_ZX(const Scenario& sc, const EventSchedule& schedule,
                    const std::vector<SlicePair>& slices);
ZigzagSets build_ZX(const Scenario& sc, const EventSchedule& schedule,
                    const GridSpec& spec, double tol = 1e-9);

/* Per-slice comparison of the two sides of the duality dictionary: the
 * number of free components against the rank of H_{d-1} of the covered
 * nerve. */
struct DualityRow {
    double time = 0.0;
    int free_components = 0;
    int nerve_betti = 0;
    bool agree = false;
};
DualityRow duality_check(const Scenario& sc, double t, const GridSpec& spec,
                         CoeffField field, double tol = 1e-9);

/* Component chain derived purely from the covered side, dimension 2 only.
 * Per slice, each free component is fingerprinted by the winding numbers of
 * the H1 basis cycles of the nerve around a point deep inside it; the
 * fingerprint matrix must be square and invertible (the duality pairing),
 * and transporting fingerprints along the stacked inclusions must match
 * components one to one. The resulting chain has the same shape as the
 * reduced free-side zigzag, and its limit count must agree with
 * |lim of the free-side zigzag|; any failure raises IsoAssumptionViolated.
 * The transport runs over the rationals, where winding numbers live; the
 * field choice is used for the rank bookkeeping it is checked against. */
struct ZCResult {
    ReducedChain chain;
    LimResult lim;
};
ZCResult build_ZC_homology(const Scenario& sc, const EventSchedule& schedule,
                           const std::vector<SlicePair>& slices, CoeffField field);
ZCResult build_ZC_homology(const Scenario& sc, const EventSchedule& schedule,
                           CoeffField field, const GridSpec& spec, double tol = 1e-9);

enum class R1Mode { Off, Abelianized, Finite };

/* First derived limit of the loop classes over one compatible tuple of free
 * components, dimension 2 only. Fibers are the first homology of the chosen
 * component per slice (free abelian on its holes); maps follow the same
 * marching as the component zigzag. When every group is trivial the result
 * is exact (the fibers carry no loops at all); otherwise it is the
 * abelianized obstruction. */
struct GammaR1 {
    std::vector<int> tuple;
    std::string method;  // "FINITE_EXACT" or "ABELIANIZED"
    AbelianInvariants invariants;
};
GammaR1 r1lim_for_tuple(const Scenario& sc, const EventSchedule& schedule,
                        const std::vector<SlicePair>& slices,
                        const std::vector<int>& tuple, R1Mode mode);

struct EvadeOptions {
    int grid = 64;                      // cells along the longest box axis
    double tol = 1e-9;
    double dt_scan = 1e-3;
    double oracle_dt = 0.02;            // step bound for grid worlds
    std::optional<CoeffField> field;    // defaults to the scenario's field
    R1Mode r1lim = R1Mode::Off;
    bool with_oracle = false;
};

struct SectionReport {
    EventSchedule schedule;
    GridSpec spec;
    std::vector<SlicePair> slices;
    ZigzagSets zx;
    LimResult lim;
    bool exists = false;

    std::vector<DualityRow> duality;
    long long dual_lim = -1;            // covered-side chain limit, -1 when skipped

    std::vector<GammaR1> r1lim;         // one per lim tuple when requested

    bool oracle_ran = false;
    bool oracle_exists = false;
    std::vector<std::pair<double, Point>> witness;

    // limit of the undivided one-span zigzag (whole [0,1] as a single
    // interval, tracked through the space-time grid); it can only be
    // larger than the fine limit, and a strict gap on an empty fine limit
    // means the verdict hinges on the event partition
    long long coarse_lim = -1;
    bool coarse_agrees = true;
};

/* The full pipeline: validate, detect events, build slices and the
 * component zigzag, take its limit, and fill in the duality table, the
 * covered-side cross-check (d = 2), per-tuple loop obstructions and the
 * oracle run as requested. */
SectionReport decide_evasion(const Scenario& sc, const EvadeOptions& opt = {});

} // namespace evade
