#include "evade/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <unordered_map>

#include "evade/errors.hpp"

namespace evade {

GridWorld build_grid_world(const Scenario& sc, const GridSpec& spec,
                           const EventSchedule& schedule, double dt) {
    if (!(dt > 0.0))
        throw InvalidArgument("grid world needs a positive step length");

    std::vector<double> anchors;
    anchors.push_back(0.0);
    for (const NerveEvent& ev : schedule.events)
        if (ev.time > 0.0 && ev.time < 1.0) anchors.push_back(ev.time);
    anchors.push_back(1.0);
    std::sort(anchors.begin(), anchors.end());

    GridWorld w;
    w.spec = spec;
    w.times.push_back(0.0);
    for (size_t i = 0; i + 1 < anchors.size(); ++i) {
        double a = anchors[i], b = anchors[i + 1];
        if (!(b > a)) continue;
        int k = std::max(1, (int)std::ceil((b - a) / dt - 1e-12));
        for (int j = 1; j <= k; ++j)
            w.times.push_back(j == k ? b : a + (b - a) * j / k);
    }

    w.free_cells.reserve(w.times.size());
    for (double t : w.times) {
        SliceGrid g = analyze_slice(sc, t, spec);
        std::vector<char> row(g.occ.size(), 0);
        for (size_t c = 0; c < g.occ.size(); ++c)
            if (g.occ[c] == Occ::Free) row[c] = 1;
        w.free_cells.push_back(std::move(row));
    }
    return w;
}

namespace {

bool adjacent_or_equal(const GridSpec& spec, long long a, long long b) {
    std::vector<int> ca = spec.coords(a), cb = spec.coords(b);
    int diff = 0;
    for (int k = 0; k < spec.dim(); ++k) diff += std::abs(ca[k] - cb[k]);
    return diff <= 1;
}

// Same or axis-adjacent cells, the only moves between consecutive steps.
std::vector<long long> move_targets(const GridSpec& spec, long long cell) {
    std::vector<long long> out;
    out.reserve(1 + 2 * spec.dim());
    out.push_back(cell);
    std::vector<int> xyz = spec.coords(cell);
    for (int k = 0; k < spec.dim(); ++k) {
        if (xyz[k] > 0) out.push_back(cell - spec.stride[k]);
        if (xyz[k] + 1 < spec.dims[k]) out.push_back(cell + spec.stride[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

ReachResult grid_reachability(const GridWorld& w) {
    ReachResult res;
    if (w.steps() == 0) return res;
    const long long n = w.spec.cell_count();
    const int T = w.steps();

    // parent[s][c] = cell occupied at step s-1, -1 if unreached, -2 for roots
    std::vector<std::vector<long long>> parent(T, std::vector<long long>(n, -1));
    for (long long c = 0; c < n; ++c)
        if (w.is_free(0, c)) parent[0][c] = -2;

    for (int s = 0; s + 1 < T; ++s) {
        for (long long c = 0; c < n; ++c) {
            if (parent[s][c] == -1) continue;
            for (long long d : move_targets(w.spec, c))
                if (w.is_free(s + 1, d) && parent[s + 1][d] == -1)
                    parent[s + 1][d] = c;
        }
    }

    long long end = -1;
    for (long long c = 0; c < n && end < 0; ++c)
        if (parent[T - 1][c] != -1) end = c;
    if (end < 0) return res;

    res.exists = true;
    std::vector<long long> cells(T);
    long long c = end;
    for (int s = T - 1; s >= 0; --s) {
        cells[s] = c;
        c = parent[s][c];
    }
    for (int s = 0; s < T; ++s)
        res.witness.emplace_back(w.times[s], w.spec.center(cells[s]));
    return res;
}

namespace {

struct PathHash {
    size_t operator()(const std::vector<long long>& p) const {
        size_t h = 1469598103934665603ull;
        for (long long v : p) {
            h ^= (size_t)v;
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct UnionFind {
    std::vector<int> up;
    explicit UnionFind(int n) : up(n) {
        for (int i = 0; i < n; ++i) up[i] = i;
    }
    int find(int a) {
        while (up[a] != a) a = up[a] = up[up[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) up[a] = b;
    }
};

} // namespace

long long path_space_components(const GridWorld& w, long long state_budget,
                                long long path_budget) {
    const int T = w.steps();
    if (T == 0) return 0;
    const long long n = w.spec.cell_count();

    long long states = 0;
    for (int s = 0; s < T; ++s)
        for (long long c = 0; c < n; ++c)
            if (w.is_free(s, c)) ++states;
    if (states > state_budget)
        throw ResourceLimit("too many free space-time cells to enumerate sections");

    // Enumerate every section in lexicographic order.
    std::vector<std::vector<long long>> paths;
    std::unordered_map<std::vector<long long>, int, PathHash> index;
    std::vector<long long> cur(T);

    std::vector<std::vector<long long>> frames(T); // candidate stacks per depth
    int depth = 0;
    for (long long c = n - 1; c >= 0; --c)
        if (w.is_free(0, c)) frames[0].push_back(c);
    while (depth >= 0) {
        if (frames[depth].empty()) {
            --depth;
            continue;
        }
        cur[depth] = frames[depth].back();
        frames[depth].pop_back();
        if (depth == T - 1) {
            if ((long long)paths.size() >= path_budget)
                throw ResourceLimit("too many sections to enumerate");
            index.emplace(cur, (int)paths.size());
            paths.push_back(cur);
            continue;
        }
        ++depth;
        frames[depth].clear();
        std::vector<long long> next = move_targets(w.spec, cur[depth - 1]);
        for (auto it = next.rbegin(); it != next.rend(); ++it)
            if (w.is_free(depth, *it)) frames[depth].push_back(*it);
    }

    // Glue sections that differ by one elementary move: replace the cell of
    // one step by an axis neighbor, provided the step before and after can
    // still reach it.
    UnionFind uf((int)paths.size());
    std::vector<long long> probe;
    for (size_t p = 0; p < paths.size(); ++p) {
        for (int s = 0; s < T; ++s) {
            std::vector<int> xyz = w.spec.coords(paths[p][s]);
            for (int k = 0; k < w.spec.dim(); ++k) {
                for (int dir = -1; dir <= 1; dir += 2) {
                    int x = xyz[k] + dir;
                    if (x < 0 || x >= w.spec.dims[k]) continue;
                    long long alt = paths[p][s] + dir * w.spec.stride[k];
                    if (!w.is_free(s, alt)) continue;
                    if (s > 0 && !adjacent_or_equal(w.spec, paths[p][s - 1], alt)) continue;
                    if (s + 1 < T && !adjacent_or_equal(w.spec, alt, paths[p][s + 1])) continue;
                    probe = paths[p];
                    probe[s] = alt;
                    auto it = index.find(probe);
                    if (it != index.end()) uf.unite((int)p, it->second);
                }
            }
        }
    }

    long long comps = 0;
    for (size_t p = 0; p < paths.size(); ++p)
        if (uf.find((int)p) == (int)p) ++comps;
    return comps;
}

int spacetime_components(const GridWorld& w, std::vector<std::vector<int>>& comp) {
    const int T = w.steps();
    const long long n = w.spec.cell_count();
    comp.assign(T, std::vector<int>(n, -1));
    int count = 0;
    std::queue<std::pair<int, long long>> bfs;
    for (int s0 = 0; s0 < T; ++s0) {
        for (long long c0 = 0; c0 < n; ++c0) {
            if (!w.is_free(s0, c0) || comp[s0][c0] != -1) continue;
            comp[s0][c0] = count;
            bfs.emplace(s0, c0);
            while (!bfs.empty()) {
                auto [s, c] = bfs.front();
                bfs.pop();
                std::vector<int> xyz = w.spec.coords(c);
                for (int k = 0; k < w.spec.dim(); ++k) {
                    for (int dir = -1; dir <= 1; dir += 2) {
                        int x = xyz[k] + dir;
                        if (x < 0 || x >= w.spec.dims[k]) continue;
                        long long d = c + dir * w.spec.stride[k];
                        if (w.is_free(s, d) && comp[s][d] == -1) {
                            comp[s][d] = count;
                            bfs.emplace(s, d);
                        }
                    }
                }
                for (int ds = -1; ds <= 1; ds += 2) {
                    int s2 = s + ds;
                    if (s2 < 0 || s2 >= T) continue;
                    if (w.is_free(s2, c) && comp[s2][c] == -1) {
                        comp[s2][c] = count;
                        bfs.emplace(s2, c);
                    }
                }
            }
            ++count;
        }
    }
    return count;
}

} // namespace evade
