#include "evade/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include "evade/errors.hpp"

namespace evade {

GridSpec GridSpec::make(const Box& box, double max_edge) {
    if (!(max_edge > 0.0)) throw InvalidArgument("grid cell size must be positive");
    GridSpec g;
    g.box = box;
    int d = box.dim();
    g.dims.resize(d);
    g.cell.resize(d);
    g.stride.resize(d);
    long long s = 1;
    for (int k = 0; k < d; ++k) {
        double extent = box.extent(k);
        if (!(extent > 0.0)) throw InvalidArgument("domain box has no extent on an axis");
        g.dims[k] = std::max(1, (int)std::ceil(extent / max_edge - 1e-12));
        g.cell[k] = extent / g.dims[k];
        g.stride[k] = s;
        s *= g.dims[k];
    }
    return g;
}

GridSpec GridSpec::subdivisions(const Box& box, int n) {
    if (n < 1) throw InvalidArgument("grid subdivision count must be at least 1");
    double longest = 0.0;
    for (int k = 0; k < box.dim(); ++k) longest = std::max(longest, box.extent(k));
    return make(box, longest / n);
}

long long GridSpec::cell_count() const {
    long long n = 1;
    for (int d : dims) n *= d;
    return n;
}

double GridSpec::diagonal() const {
    double s = 0.0;
    for (double c : cell) s += c * c;
    return std::sqrt(s);
}

double GridSpec::half_diagonal() const { return 0.5 * diagonal(); }

Point GridSpec::center(long long flat) const {
    Point x(dim());
    for (int k = 0; k < dim(); ++k) {
        long long i = (flat / stride[k]) % dims[k];
        x[k] = box.min[k].value + (i + 0.5) * cell[k];
    }
    return x;
}

std::vector<int> GridSpec::coords(long long flat) const {
    std::vector<int> c(dim());
    for (int k = 0; k < dim(); ++k) c[k] = (int)((flat / stride[k]) % dims[k]);
    return c;
}

long long GridSpec::flat_of(const std::vector<int>& c) const {
    long long f = 0;
    for (int k = 0; k < dim(); ++k) f += stride[k] * c[k];
    return f;
}

long long GridSpec::cell_of(const Point& p) const {
    long long f = 0;
    for (int k = 0; k < dim(); ++k) {
        long long i = (long long)std::floor((p[k] - box.min[k].value) / cell[k]);
        i = std::max(0LL, std::min((long long)dims[k] - 1, i));
        f += stride[k] * i;
    }
    return f;
}

std::vector<std::string> SliceGrid::labels() const {
    std::vector<std::string> out;
    out.reserve(comp_count);
    for (int c = 0; c < comp_count; ++c) out.push_back(label(c));
    return out;
}

int SliceGrid::comp_of_point(const Point& p) const { return comp[spec.cell_of(p)]; }

SliceGrid analyze_slice(const Scenario& sc, double t, const GridSpec& spec) {
    SliceGrid g;
    g.spec = spec;
    g.time = t;
    const int d = spec.dim();
    const long long n = spec.cell_count();
    g.margin.resize(n);
    g.occ.resize(n);
    g.comp.assign(n, -1);

    const int ns = (int)sc.sensors.size();
    std::vector<Point> pos(ns);
    std::vector<double> rad(ns);
    for (int j = 0; j < ns; ++j) {
        pos[j] = sc.center_at(j, t);
        rad[j] = sc.radius_of(j);
    }

    const double kappa = spec.half_diagonal();
    std::vector<int> c(d, 0);
    Point x(d);
    for (int k = 0; k < d; ++k) x[k] = spec.box.min[k].value + 0.5 * spec.cell[k];
    for (long long i = 0; i < n; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < ns; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                double dx = x[k] - pos[j][k];
                s += dx * dx;
            }
            m = std::min(m, std::sqrt(s) - rad[j]);
        }
        g.margin[i] = m;
        g.occ[i] = m > kappa ? Occ::Free : (m < -kappa ? Occ::Covered : Occ::Marginal);
        for (int k = 0; k < d; ++k) { // odometer over cell centers
            if (++c[k] < spec.dims[k]) {
                x[k] += spec.cell[k];
                break;
            }
            c[k] = 0;
            x[k] = spec.box.min[k].value + 0.5 * spec.cell[k];
        }
    }

    // free components by axis adjacency, in order of smallest member cell
    std::deque<long long> queue;
    for (long long i = 0; i < n; ++i) {
        if (g.occ[i] != Occ::Free || g.comp[i] >= 0) continue;
        int id = g.comp_count++;
        g.comp_rep.push_back(i);
        g.comp_deep.push_back(i);
        g.comp_max_margin.push_back(g.margin[i]);
        g.comp[i] = id;
        queue.push_back(i);
        while (!queue.empty()) {
            long long u = queue.front();
            queue.pop_front();
            if (g.margin[u] > g.comp_max_margin[id]) {
                g.comp_max_margin[id] = g.margin[u];
                g.comp_deep[id] = u;
            }
            for (int k = 0; k < d; ++k) {
                long long ck = (u / spec.stride[k]) % spec.dims[k];
                for (int dir = -1; dir <= 1; dir += 2) {
                    long long nk = ck + dir;
                    if (nk < 0 || nk >= spec.dims[k]) continue;
                    long long v = u + dir * spec.stride[k];
                    if (g.occ[v] == Occ::Free && g.comp[v] < 0) {
                        g.comp[v] = id;
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    return g;
}

namespace {

std::string cell_text(const GridSpec& spec, long long flat) {
    Point x = spec.center(flat);
    std::string s = "(";
    for (size_t k = 0; k < x.size(); ++k) {
        if (k) s += ", ";
        s += std::to_string(x[k]);
    }
    return s + ")";
}

/* Connected groups of cells passing `member`, axis adjacency. Returns the
 * group id per cell (-1 outside) and the group count. */
int flood_groups(const GridSpec& spec, const std::function<bool(long long)>& member,
                 std::vector<int>& group) {
    const long long n = spec.cell_count();
    const int d = spec.dim();
    group.assign(n, -1);
    int count = 0;
    std::deque<long long> queue;
    for (long long i = 0; i < n; ++i) {
        if (!member(i) || group[i] >= 0) continue;
        int id = count++;
        group[i] = id;
        queue.push_back(i);
        while (!queue.empty()) {
            long long u = queue.front();
            queue.pop_front();
            for (int k = 0; k < d; ++k) {
                long long ck = (u / spec.stride[k]) % spec.dims[k];
                for (int dir = -1; dir <= 1; dir += 2) {
                    long long nk = ck + dir;
                    if (nk < 0 || nk >= spec.dims[k]) continue;
                    long long v = u + dir * spec.stride[k];
                    if (member(v) && group[v] < 0) {
                        group[v] = id;
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    return count;
}

void pocket_guard(const Scenario& sc, const SliceGrid& g, double tol) {
    const int d = sc.dimension;
    const int ns = (int)sc.sensors.size();
    if (ns < d + 1) return;
    std::vector<Point> pos(ns);
    std::vector<double> rad(ns);
    for (int j = 0; j < ns; ++j) {
        pos[j] = sc.center_at(j, g.time);
        rad[j] = sc.radius_of(j);
    }
    std::vector<std::vector<int>> adj(ns);
    for (int i = 0; i < ns; ++i)
        for (int j = i + 1; j < ns; ++j)
            if (balls_intersect({pos[i], pos[j]}, {rad[i], rad[j]}, tol) != Overlap::No) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }

    std::vector<int> clique;
    std::function<void(const std::vector<int>&)> grow = [&](const std::vector<int>& cand) {
        if ((int)clique.size() == d + 1) {
            std::vector<Point> cp;
            std::vector<double> cr;
            for (int v : clique) {
                cp.push_back(pos[v]);
                cr.push_back(rad[v]);
            }
            Point gap;
            if (intersection_margin(cp, cr, &gap) <= tol) return; // common point exists
            for (int k = 0; k < d; ++k)
                if (gap[k] < g.spec.box.min[k].value || gap[k] > g.spec.box.max[k].value)
                    return; // the gap sits outside the domain
            double m = std::numeric_limits<double>::infinity();
            for (int j = 0; j < ns; ++j) m = std::min(m, dist(gap, pos[j]) - rad[j]);
            if (m <= tol) return; // some other sensor seals the gap
            if (g.occ[g.spec.cell_of(gap)] != Occ::Free)
                throw ClearanceTooSmall(
                    "uncovered gap between sensors near " + cell_text(g.spec, g.spec.cell_of(gap)) +
                    " at t = " + std::to_string(g.time) +
                    " is smaller than a grid cell; refine the grid");
            return;
        }
        for (size_t ci = 0; ci < cand.size(); ++ci) {
            int v = cand[ci];
            std::vector<int> next;
            for (size_t cj = ci + 1; cj < cand.size(); ++cj)
                if (std::binary_search(adj[v].begin(), adj[v].end(), cand[cj]))
                    next.push_back(cand[cj]);
            clique.push_back(v);
            if ((int)clique.size() + (int)next.size() >= d + 1) grow(next);
            clique.pop_back();
        }
    };
    std::vector<int> all(ns);
    for (int i = 0; i < ns; ++i) all[i] = i;
    for (auto& a : adj) std::sort(a.begin(), a.end());
    grow(all);
}

} // namespace

void check_clearance(const Scenario& sc, const SliceGrid& g, double tol) {
    const double need = 2.0 * g.spec.diagonal();
    for (int c = 0; c < g.comp_count; ++c)
        if (!(g.comp_max_margin[c] > need))
            throw ClearanceTooSmall(
                "free component " + g.label(c) + " at t = " + std::to_string(g.time) +
                " only reaches clearance " + std::to_string(g.comp_max_margin[c]) +
                ", below twice the cell diagonal " + std::to_string(need));

    // marginal cells must neither bridge free components nor form pockets
    std::vector<int> group;
    int groups = flood_groups(
        g.spec, [&](long long i) { return g.occ[i] != Occ::Covered; }, group);
    std::vector<int> seen_comp(groups, -1);
    std::vector<char> has_free(groups, 0);
    for (long long i = 0; i < g.spec.cell_count(); ++i) {
        if (group[i] < 0) continue;
        if (g.comp[i] < 0) continue;
        has_free[group[i]] = 1;
        if (seen_comp[group[i]] < 0) {
            seen_comp[group[i]] = g.comp[i];
        } else if (seen_comp[group[i]] != g.comp[i]) {
            throw ClearanceTooSmall(
                "marginal cells bridge free components " + g.label(seen_comp[group[i]]) +
                " and " + g.label(g.comp[i]) + " at t = " + std::to_string(g.time) +
                "; refine the grid");
        }
    }
    for (int q = 0; q < groups; ++q)
        if (!has_free[q]) {
            long long where = 0;
            for (long long i = 0; i < g.spec.cell_count(); ++i)
                if (group[i] == q) {
                    where = i;
                    break;
                }
            throw ClearanceTooSmall("marginal region with no free cell near " +
                                    cell_text(g.spec, where) + " at t = " +
                                    std::to_string(g.time) + "; refine the grid");
        }

    pocket_guard(sc, g, tol);
}

namespace {

/* Steps from `from` to `to`, handing each consecutive grid pair to
 * `advance`. A rejected step is halved; the final grid is exactly `to`. */
void march_driver(const Scenario& sc, const SliceGrid& from, const SliceGrid& to,
                  const std::function<bool(const SliceGrid&, const SliceGrid&)>& advance) {
    const double total = std::fabs(to.time - from.time);
    if (total == 0.0) {
        if (!advance(from, to))
            throw ClearanceTooSmall("cannot match free components between coincident slices");
        return;
    }
    const double dir = to.time > from.time ? 1.0 : -1.0;
    double cell_min = *std::min_element(from.spec.cell.begin(), from.spec.cell.end());
    double vmax = sc.max_speed();
    double step0 = total / 4.0;
    if (vmax > 0.0) step0 = std::min(step0, cell_min / (2.0 * vmax));
    const double step_min = std::max(total / 65536.0, 1e-12);

    SliceGrid cur = from;
    double step = step0;
    long long iterations = 0;
    while (cur.time != to.time) {
        if (++iterations > 200000)
            throw ResourceLimit("component tracking between slices exceeded its step budget");
        double t_next = cur.time + dir * step;
        bool last = dir * (t_next - to.time) >= 0.0 || std::fabs(to.time - t_next) < step_min;
        const SliceGrid& next = last ? to : analyze_slice(sc, t_next, cur.spec);
        if (advance(cur, next)) {
            cur = next;
            step = std::min(step * 2.0, step0);
        } else {
            step *= 0.5;
            if (step < step_min)
                throw ClearanceTooSmall(
                    "free components at t = " + std::to_string(cur.time) +
                    " cannot be tracked across the interval; refine the grid");
        }
    }
}

/* Single-step component matching: every tracked component must overlap
 * exactly one component of the next grid. Fills `target` (indexed by the
 * previous grid's component ids, -2 meaning untracked). */
bool match_step(const SliceGrid& prev, const SliceGrid& next, const std::vector<char>& tracked,
                std::vector<int>& target) {
    target.assign(prev.comp_count, -1);
    for (long long i = 0; i < prev.spec.cell_count(); ++i) {
        int a = prev.comp[i];
        int b = next.comp[i];
        if (a < 0 || b < 0 || !tracked[a]) continue;
        if (target[a] == -1) target[a] = b;
        else if (target[a] != b) return false; // the component split
    }
    for (int a = 0; a < prev.comp_count; ++a) {
        if (!tracked[a]) target[a] = -2;
        else if (target[a] == -1) return false; // the component vanished
    }
    return true;
}

} // namespace

std::vector<int> march_components(const Scenario& sc, const SliceGrid& from,
                                  const SliceGrid& to) {
    std::vector<int> where(from.comp_count); // current component id per origin
    for (int c = 0; c < from.comp_count; ++c) where[c] = c;

    std::vector<int> target;
    march_driver(sc, from, to, [&](const SliceGrid& prev, const SliceGrid& next) {
        std::vector<char> tracked(prev.comp_count, 0);
        for (int w : where) tracked[w] = 1;
        if (!match_step(prev, next, tracked, target)) return false;
        for (int& w : where) w = target[w];
        return true;
    });
    return where;
}

HoleSet holes_of_component(const SliceGrid& g, int comp) {
    if (g.spec.dim() != 2)
        throw InvalidArgument("hole analysis is only available in dimension 2");
    if (comp < 0 || comp >= g.comp_count) throw InvalidArgument("no such free component");
    const GridSpec& spec = g.spec;
    const long long n = spec.cell_count();
    const int nx = spec.dims[0], ny = spec.dims[1];

    std::vector<int> region(n, -1); // complement groups, diagonal adjacency
    std::vector<char> outer;
    std::vector<std::vector<long long>> cells;
    std::deque<long long> queue;
    for (long long i = 0; i < n; ++i) {
        if (g.comp[i] == comp || region[i] >= 0) continue;
        int id = (int)cells.size();
        cells.emplace_back();
        outer.push_back(0);
        region[i] = id;
        queue.push_back(i);
        while (!queue.empty()) {
            long long u = queue.front();
            queue.pop_front();
            cells[id].push_back(u);
            int ux = (int)(u % nx), uy = (int)(u / nx);
            if (ux == 0 || uy == 0 || ux == nx - 1 || uy == ny - 1) outer[id] = 1;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (!dx && !dy) continue;
                    int vx = ux + dx, vy = uy + dy;
                    if (vx < 0 || vy < 0 || vx >= nx || vy >= ny) continue;
                    long long v = vx + (long long)vy * nx;
                    if (g.comp[v] != comp && region[v] < 0) {
                        region[v] = id;
                        queue.push_back(v);
                    }
                }
        }
    }

    HoleSet hs;
    for (size_t id = 0; id < cells.size(); ++id) {
        if (outer[id]) continue;
        std::sort(cells[id].begin(), cells[id].end());
        long long deep = cells[id][0];
        for (long long u : cells[id])
            if (g.margin[u] < g.margin[deep]) deep = u;
        hs.deep.push_back(deep);
        hs.holes.push_back(std::move(cells[id]));
    }
    return hs;
}

IntMat march_h1(const Scenario& sc, const SliceGrid& from, int from_comp,
                const SliceGrid& to, int* to_comp) {
    HoleSet cur_holes = holes_of_component(from, from_comp);
    int cur = from_comp;
    const int origin_rank = cur_holes.count();
    IntMat total(origin_rank, std::vector<BigInt>(origin_rank, 0));
    for (int i = 0; i < origin_rank; ++i) total[i][i] = 1;

    std::vector<int> target;
    march_driver(sc, from, to, [&](const SliceGrid& prev, const SliceGrid& next) {
        std::vector<char> tracked(prev.comp_count, 0);
        tracked[cur] = 1;
        if (!match_step(prev, next, tracked, target)) return false;
        int nxt = target[cur];
        HoleSet next_holes = holes_of_component(next, nxt);
        IntMat step(next_holes.count(), std::vector<BigInt>((size_t)cur_holes.count(), 0));
        for (int j = 0; j < next_holes.count(); ++j) {
            long long dc = next_holes.deep[j];
            if (prev.comp[dc] == cur) return false; // hole drifted into free cells
            for (int i = 0; i < cur_holes.count(); ++i)
                if (std::binary_search(cur_holes.holes[i].begin(), cur_holes.holes[i].end(), dc)) {
                    step[j][i] = 1;
                    break;
                }
            // not found: the hole was just enclosed, so its row stays zero
        }
        // holes may split or fill in while the region grows, but never merge;
        // an apparent merge means the step is too wide to trust
        for (int j = 0; j < next_holes.count(); ++j) {
            int sources = 0;
            for (int i = 0; i < cur_holes.count(); ++i)
                if (std::binary_search(next_holes.holes[j].begin(), next_holes.holes[j].end(),
                                       cur_holes.deep[i]))
                    ++sources;
            if (sources > 1) return false;
        }
        IntMat composed(next_holes.count(), std::vector<BigInt>(origin_rank, 0));
        for (int j = 0; j < next_holes.count(); ++j)
            for (int k = 0; k < cur_holes.count(); ++k)
                if (step[j][k] != 0)
                    for (int i = 0; i < origin_rank; ++i)
                        composed[j][i] += step[j][k] * total[k][i];
        cur = nxt;
        cur_holes = std::move(next_holes);
        total = std::move(composed);
        return true;
    });
    if (to_comp) *to_comp = cur;
    return total;
}

} // namespace evade
