#include "evade/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "evade/errors.hpp"

namespace evade {

double dist(const Point& a, const Point& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

bool Trajectory::mobile() const {
    for (size_t i = 1; i < waypoints.size(); ++i)
        for (size_t k = 0; k < waypoints[i].position.size(); ++k)
            if (waypoints[i].position[k].exact != waypoints[0].position[k].exact)
                return true;
    return false;
}

double Trajectory::max_speed() const {
    double best = 0;
    for (size_t i = 1; i < waypoints.size(); ++i) {
        double dt = waypoints[i].time.value - waypoints[i - 1].time.value;
        double dd = 0;
        for (size_t k = 0; k < waypoints[i].position.size(); ++k) {
            double dx = waypoints[i].position[k].value - waypoints[i - 1].position[k].value;
            dd += dx * dx;
        }
        best = std::max(best, std::sqrt(dd) / dt);
    }
    return best;
}

Point position_at(const Trajectory& traj, double t) {
    if (t < 0.0 || t > 1.0) throw InvalidArgument("time outside [0,1]");
    const auto& wp = traj.waypoints;
    size_t hi = 1;
    while (hi + 1 < wp.size() && wp[hi].time.value < t) ++hi;
    double a = wp[hi - 1].time.value, b = wp[hi].time.value;
    double u = t <= a ? 0.0 : (t >= b ? 1.0 : (t - a) / (b - a));
    Point p(wp[hi].position.size());
    for (size_t k = 0; k < p.size(); ++k) {
        double x0 = wp[hi - 1].position[k].value, x1 = wp[hi].position[k].value;
        p[k] = x0 + u * (x1 - x0);
    }
    return p;
}

bool Box::contains(const std::vector<Decimal>& p) const {
    for (size_t k = 0; k < min.size(); ++k)
        if (p[k].exact < min[k].exact || p[k].exact > max[k].exact) return false;
    return true;
}

Point Scenario::center_at(int sensor, double t) const {
    return position_at(sensors[sensor], t);
}

double Scenario::max_speed() const {
    double best = 0;
    for (const auto& s : sensors) best = std::max(best, s.max_speed());
    return best;
}

void Scenario::validate(double tol) const {
    if (dimension < 2 || dimension > 8)
        throw InvalidArgument("dimension must be between 2 and 8");
    if (domain.dim() != dimension || (int)domain.max.size() != dimension)
        throw InvalidArgument("domain box does not match dimension");
    for (int k = 0; k < dimension; ++k)
        if (!(domain.min[k].exact < domain.max[k].exact))
            throw InvalidArgument("domain box is empty on axis " + std::to_string(k));

    std::set<std::string> ids;
    for (const auto& s : sensors) {
        const std::string where = "sensor '" + s.sensor_id + "'";
        if (s.sensor_id.empty()) throw InvalidArgument("sensor with empty id");
        if (!ids.insert(s.sensor_id).second)
            throw InvalidArgument("duplicate sensor id '" + s.sensor_id + "'");
        if (!(s.radius.exact > 0)) throw InvalidArgument(where + ": radius must be positive");
        if (s.waypoints.size() < 2)
            throw InvalidArgument(where + ": needs waypoints at t=0 and t=1");
        if (s.waypoints.front().time.exact != 0 || s.waypoints.back().time.exact != 1)
            throw InvalidArgument(where + ": waypoints must start at t=0 and end at t=1");
        for (size_t i = 0; i < s.waypoints.size(); ++i) {
            if (i > 0 && !(s.waypoints[i - 1].time.exact < s.waypoints[i].time.exact))
                throw InvalidArgument(where + ": waypoint times must strictly increase");
            if ((int)s.waypoints[i].position.size() != dimension)
                throw InvalidArgument(where + ": waypoint has wrong dimension");
            if (!domain.contains(s.waypoints[i].position))
                throw InvalidArgument(where + ": waypoint outside the domain");
        }
        if (s.fence && s.mobile())
            throw InvalidArgument(where + ": fence sensors must not move");
    }

    // sampled check that the fence seals the domain boundary
    std::vector<Point> fence_centers;
    std::vector<double> fence_radii;
    for (const auto& s : sensors)
        if (s.fence) {
            Point c(dimension);
            for (int k = 0; k < dimension; ++k) c[k] = s.waypoints[0].position[k].value;
            fence_centers.push_back(c);
            fence_radii.push_back(s.radius.value);
        }
    static const int kSamplesByDim[] = {48, 24, 12, 8, 8, 8, 8};
    int n_samp = kSamplesByDim[dimension - 2];
    std::vector<int> idx(dimension - 1, 0);
    for (int axis = 0; axis < dimension; ++axis) {
        for (int side = 0; side < 2; ++side) {
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                Point x(dimension);
                x[axis] = side ? domain.max[axis].value : domain.min[axis].value;
                int pos = 0;
                for (int k = 0; k < dimension; ++k) {
                    if (k == axis) continue;
                    double u = (double)idx[pos++] / n_samp;
                    x[k] = domain.min[k].value + u * domain.extent(k);
                }
                double best = 1e300;
                for (size_t j = 0; j < fence_centers.size(); ++j)
                    best = std::min(best, dist(x, fence_centers[j]) - fence_radii[j]);
                if (best > -tol) {
                    std::ostringstream os;
                    os << "domain boundary not covered by fence sensors near (";
                    for (int k = 0; k < dimension; ++k) os << (k ? "," : "") << x[k];
                    os << ")";
                    throw InvalidArgument(os.str());
                }
                int p = 0;
                while (p < dimension - 1 && ++idx[p] > n_samp) idx[p++] = 0;
                if (p == dimension - 1) break;
            }
        }
    }
}

namespace {

/* Solve G y = rhs with partial pivoting; near-singular pivots leave their
 * variable at zero. Returns false when the system was singular. */
bool gram_solve(std::vector<std::vector<double>> G, std::vector<double> rhs,
                std::vector<double>& y) {
    int k = (int)G.size();
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    y.assign(k, 0.0);
    double scale = 1e-30;
    for (const auto& row : G)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    bool full_rank = true;
    for (int c = 0; c < k; ++c) {
        int pr = c;
        for (int i = c + 1; i < k; ++i)
            if (std::fabs(G[i][c]) > std::fabs(G[pr][c])) pr = i;
        if (std::fabs(G[pr][c]) < 1e-12 * scale) {
            full_rank = false;
            continue;
        }
        std::swap(G[c], G[pr]);
        std::swap(rhs[c], rhs[pr]);
        for (int i = 0; i < k; ++i) {
            if (i == c || G[i][c] == 0.0) continue;
            double f = G[i][c] / G[c][c];
            for (int j = c; j < k; ++j) G[i][j] -= f * G[c][j];
            rhs[i] -= f * rhs[c];
        }
    }
    for (int c = 0; c < k; ++c)
        if (std::fabs(G[c][c]) >= 1e-12 * scale) y[c] = rhs[c] / G[c][c];
    return full_rank;
}

/* Smallest ball having every point of R on its boundary. */
MiniballResult circumball(const std::vector<Point>& R) {
    MiniballResult out;
    if (R.empty()) {
        out.radius = -1.0;
        return out;
    }
    int d = (int)R[0].size();
    int k = (int)R.size() - 1;
    if (k == 0) {
        out.center = R[0];
        out.radius = 0.0;
        return out;
    }
    std::vector<std::vector<double>> V(k, std::vector<double>(d));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) V[i][j] = R[i + 1][j] - R[0][j];
    std::vector<std::vector<double>> G(k, std::vector<double>(k));
    std::vector<double> w(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            double s = 0;
            for (int a = 0; a < d; ++a) s += V[i][a] * V[j][a];
            G[i][j] = s;
        }
        w[i] = G[i][i] / 2.0;
    }
    std::vector<double> y;
    gram_solve(G, w, y);
    out.center = R[0];
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < d; ++a) out.center[a] += y[i] * V[i][a];
    out.radius = 0;
    for (const auto& p : R) out.radius = std::max(out.radius, dist(out.center, p));
    return out;
}

MiniballResult welzl(std::vector<Point>& pts, size_t n, std::vector<Point>& support, int d) {
    if (n == 0 || (int)support.size() == d + 1) return circumball(support);
    MiniballResult ball = welzl(pts, n - 1, support, d);
    const Point& p = pts[n - 1];
    if (ball.radius >= 0 && dist(p, ball.center) <= ball.radius + 1e-10) return ball;
    support.push_back(p);
    MiniballResult better = welzl(pts, n - 1, support, d);
    support.pop_back();
    return better;
}

} // namespace

MiniballResult miniball(const std::vector<Point>& points) {
    if (points.empty()) throw InvalidArgument("smallest enclosing ball of no points");
    int d = (int)points[0].size();
    if (d < 1 || d > 8) throw InvalidArgument("dimension must be between 1 and 8");
    for (const auto& p : points)
        if ((int)p.size() != d) throw InvalidArgument("points of mixed dimension");
    std::vector<Point> pts = points;
    std::mt19937 rng(987654321u);
    std::shuffle(pts.begin(), pts.end(), rng);
    std::vector<Point> support;
    return welzl(pts, pts.size(), support, d);
}

double intersection_margin(const std::vector<Point>& centers,
                           const std::vector<double>& radii, Point* argmin) {
    int n = (int)centers.size();
    if (n == 0) throw InvalidArgument("intersection margin of no balls");
    if ((int)radii.size() != n) throw InvalidArgument("centers and radii differ in length");
    int d = (int)centers[0].size();

    double best = 1e300;
    Point best_x;
    auto full_value = [&](const Point& x) {
        double v = -1e300;
        for (int j = 0; j < n; ++j) v = std::max(v, dist(x, centers[j]) - radii[j]);
        return v;
    };
    auto consider = [&](const Point& x) {
        double v = full_value(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    };

    // single-ball candidates: each center
    for (int j = 0; j < n; ++j) consider(centers[j]);

    // support subsets of size 2..d+1: points where the margins of the subset
    // coincide, found by solving on the affine hull of the subset's centers
    std::vector<int> subset;
    std::function<void(int)> enumerate = [&](int start) {
        if ((int)subset.size() >= 2) {
            int k = (int)subset.size() - 1;
            const Point& c0 = centers[subset[0]];
            double r0 = radii[subset[0]];
            std::vector<std::vector<double>> V(k, std::vector<double>(d));
            for (int i = 0; i < k; ++i)
                for (int a = 0; a < d; ++a) V[i][a] = centers[subset[i + 1]][a] - c0[a];
            std::vector<std::vector<double>> G(k, std::vector<double>(k));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    double s = 0;
                    for (int a = 0; a < d; ++a) s += V[i][a] * V[j][a];
                    G[i][j] = s;
                }
            std::vector<double> w(k), u(k);
            for (int i = 0; i < k; ++i) {
                double ri = radii[subset[i + 1]];
                w[i] = (G[i][i] - ri * ri + r0 * r0) / 2.0;
                u[i] = -(ri - r0);
            }
            std::vector<double> y0, y1;
            bool ok = gram_solve(G, w, y0);
            ok = gram_solve(G, u, y1) && ok;
            if (ok) {
                auto quad = [&](const std::vector<double>& a, const std::vector<double>& b) {
                    double s = 0;
                    for (int i = 0; i < k; ++i)
                        for (int j = 0; j < k; ++j) s += a[i] * G[i][j] * b[j];
                    return s;
                };
                // |x - c0| = s + r0 on the line x(s) = c0 + V(y0 + s y1)
                double A = quad(y1, y1) - 1.0;
                double B = 2.0 * quad(y0, y1) - 2.0 * r0;
                double C = quad(y0, y0) - r0 * r0;
                std::vector<double> roots;
                if (std::fabs(A) < 1e-14) {
                    if (std::fabs(B) > 1e-14) roots.push_back(-C / B);
                } else {
                    double disc = B * B - 4 * A * C;
                    if (disc >= 0) {
                        double sq = std::sqrt(disc);
                        roots.push_back((-B + sq) / (2 * A));
                        roots.push_back((-B - sq) / (2 * A));
                    }
                }
                for (double s : roots) {
                    bool feasible = true;
                    for (int idx : subset)
                        if (s + radii[idx] < -1e-9) feasible = false;
                    if (!feasible) continue;
                    Point x = c0;
                    for (int i = 0; i < k; ++i)
                        for (int a = 0; a < d; ++a) x[a] += (y0[i] + s * y1[i]) * V[i][a];
                    consider(x);
                }
            }
        }
        if ((int)subset.size() == d + 1) return;
        for (int next = start; next < n; ++next) {
            subset.push_back(next);
            enumerate(next + 1);
            subset.pop_back();
        }
    };
    enumerate(0);

    if (argmin) *argmin = best_x;
    return best;
}

Overlap balls_intersect(const std::vector<Point>& centers,
                        const std::vector<double>& radii, double tol) {
    if (centers.empty() || centers.size() != radii.size())
        throw InvalidArgument("balls_intersect needs matching nonempty lists");
    bool equal_radii = true;
    for (double r : radii) equal_radii = equal_radii && r == radii[0];
    double margin;
    if (equal_radii)
        margin = miniball(centers).radius - radii[0];
    else
        margin = intersection_margin(centers, radii);
    if (margin < -tol) return Overlap::Yes;
    if (margin > tol) return Overlap::No;
    return Overlap::Marginal;
}

double cover_margin(const Scenario& sc, double t, const Point& x) {
    double best = 1e300;
    for (size_t j = 0; j < sc.sensors.size(); ++j)
        best = std::min(best, dist(x, sc.center_at((int)j, t)) - sc.radius_of((int)j));
    return best;
}

namespace {

std::string simplex_text(const Simplex& s) {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "}";
    return os.str();
}

double simplex_margin(const Scenario& sc, const Simplex& s, double t) {
    std::vector<Point> centers;
    std::vector<double> radii;
    for (int j : s) {
        centers.push_back(sc.center_at(j, t));
        radii.push_back(sc.radius_of(j));
    }
    return intersection_margin(centers, radii);
}

/* Minimum distance between two sensor centers over [0,1], exact per linear
 * segment of the relative motion. */
double min_pair_distance(const Scenario& sc, int i, int j) {
    std::vector<double> times = {0.0, 1.0};
    for (const auto& w : sc.sensors[i].waypoints) times.push_back(w.time.value);
    for (const auto& w : sc.sensors[j].waypoints) times.push_back(w.time.value);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    double best = 1e300;
    for (size_t k = 0; k + 1 < times.size(); ++k) {
        Point qa = sc.center_at(i, times[k]), qb = sc.center_at(i, times[k + 1]);
        Point pa = sc.center_at(j, times[k]), pb = sc.center_at(j, times[k + 1]);
        int d = (int)qa.size();
        double aa = 0, ab = 0, bb = 0;
        for (int a = 0; a < d; ++a) {
            double u0 = qa[a] - pa[a];
            double u1 = (qb[a] - pb[a]) - u0;
            aa += u0 * u0;
            ab += u0 * u1;
            bb += u1 * u1;
        }
        double u = bb > 0 ? std::clamp(-ab / bb, 0.0, 1.0) : 0.0;
        double dd = aa + 2 * ab * u + bb * u * u;
        best = std::min(best, std::sqrt(std::max(0.0, dd)));
    }
    return best;
}

struct RawEvent {
    double time;
    Simplex simplex;
    bool added;
};

class EventScanner {
public:
    EventScanner(const Scenario& sc, const DetectOptions& opt) : sc_(sc), opt_(opt) {}

    void scan(const Simplex& s) {
        simplex_ = s;
        found_ = 0;
        events_.clear();
        double phi0 = simplex_margin(sc_, s, 0.0);
        double phi1 = simplex_margin(sc_, s, 1.0);
        if (std::fabs(phi0) <= opt_.tol)
            non_generic("margin within tolerance at t=0");
        if (std::fabs(phi1) <= opt_.tol)
            non_generic("margin within tolerance at t=1");
        scan_range(0.0, 1.0, opt_.dt_scan);
    }

    std::vector<RawEvent> take() { return std::move(events_); }

private:
    void non_generic(const std::string& what, double a = 0.0, double b = 1.0) {
        std::ostringstream os;
        os << "simplex " << simplex_text(simplex_) << ": " << what << " on ["
           << a << ", " << b << "]";
        throw NonGenericScenario(os.str());
    }

    void scan_range(double lo, double hi, double dt) {
        int steps = std::max(2, (int)std::ceil((hi - lo) / dt));
        std::vector<double> t(steps + 1), phi(steps + 1);
        std::vector<int> cls(steps + 1);
        for (int k = 0; k <= steps; ++k) {
            t[k] = lo + (hi - lo) * k / steps;
            phi[k] = simplex_margin(sc_, simplex_, t[k]);
            cls[k] = phi[k] > opt_.tol ? 1 : (phi[k] < -opt_.tol ? -1 : 0);
        }
        for (int k = 0; k + 1 <= steps; ++k)
            if (cls[k] == 0 && cls[k + 1] == 0)
                non_generic("persistent tangency", t[k], t[k + 1]);
        for (int k = 0; k <= steps; ++k) {
            if (cls[k] != 0) {
                if (k + 1 <= steps && cls[k + 1] == -cls[k])
                    bisect(t[k], t[k + 1], phi[k]);
                continue;
            }
            // lone marginal sample; t=0 and t=1 were checked up front
            if (k == 0 || k == steps)
                non_generic("tangency at range endpoint", lo, hi);
            if (cls[k - 1] == -cls[k + 1])
                bisect(t[k - 1], t[k + 1], phi[k - 1]);
            else
                resolve_dip(t[k - 1], t[k + 1], cls[k - 1]);
        }
    }

    /* The margin grazes zero inside (a,b) while having the same strict sign
     * at both ends. Shrink toward the extremum to decide between a double
     * crossing, a tangency within tolerance, and a clean miss. */
    void resolve_dip(double a, double b, int end_sign) {
        double sgn = end_sign > 0 ? 1.0 : -1.0;
        double lo = a, hi = b;
        auto value = [&](double t) { return sgn * simplex_margin(sc_, simplex_, t); };
        for (int iter = 0; iter < 300 && hi - lo > opt_.tol; ++iter) {
            double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            double f1 = value(m1), f2 = value(m2);
            double inner = std::min(f1, f2);
            double t_inner = f1 <= f2 ? m1 : m2;
            if (std::fabs(inner) <= opt_.tol)
                non_generic("tangency without sign change", a, b);
            if (inner < 0) {
                // crossed and came back: one event on each side of the dip
                bisect(a, t_inner, sgn);
                bisect(t_inner, b, -sgn);
                return;
            }
            if (f1 > f2) lo = m1;
            else hi = m2;
        }
        // extremum stayed strictly on the endpoint side: no event here
    }

    void bisect(double a, double b, double phi_a) {
        bool a_positive = phi_a > 0;
        while (b - a > opt_.tol) {
            double mid = 0.5 * (a + b);
            double v = simplex_margin(sc_, simplex_, mid);
            if ((v > 0) == a_positive) a = mid;
            else b = mid;
        }
        if (++found_ > 100) non_generic("too many nerve changes");
        // going from positive margin to negative means the balls begin to meet
        events_.push_back({0.5 * (a + b), simplex_, a_positive});
    }

    const Scenario& sc_;
    const DetectOptions& opt_;
    Simplex simplex_;
    int found_ = 0;
    std::vector<RawEvent> events_;
};

} // namespace

EventSchedule detect_events(const Scenario& sc, const DetectOptions& opt) {
    sc.validate(opt.tol);
    int n = (int)sc.sensors.size();
    int d = sc.dimension;

    // pairwise broad phase
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double reach = sc.radius_of(i) + sc.radius_of(j) + 1e-6;
            if (min_pair_distance(sc, i, j) <= reach) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }

    // candidate simplices: cliques with 2..d+1 vertices
    std::vector<Simplex> candidates;
    std::vector<int> clique;
    std::function<void(int, std::vector<int>)> grow = [&](int last, std::vector<int> common) {
        if ((int)clique.size() >= 2) candidates.push_back(clique);
        if ((int)clique.size() == d + 1) return;
        for (int v : common) {
            if (v <= last) continue;
            std::vector<int> next;
            for (int w : common)
                if (w != v && std::binary_search(adj[v].begin(), adj[v].end(), w))
                    next.push_back(w);
            clique.push_back(v);
            grow(v, next);
            clique.pop_back();
        }
    };
    for (int i = 0; i < n; ++i) std::sort(adj[i].begin(), adj[i].end());
    for (int v = 0; v < n; ++v) {
        clique = {v};
        std::vector<int> common;
        for (int w : adj[v])
            if (w > v) common.push_back(w);
        grow(v, common);
    }
    std::sort(candidates.begin(), candidates.end());

    // static candidates cannot change; they only need a tangency check
    std::vector<RawEvent> raw;
    EventScanner scanner(sc, opt);
    for (const Simplex& s : candidates) {
        bool any_mobile = false;
        for (int v : s) any_mobile = any_mobile || sc.sensors[v].mobile();
        if (!any_mobile) {
            double phi = simplex_margin(sc, s, 0.0);
            if (std::fabs(phi) <= opt.tol)
                throw NonGenericScenario("simplex " + simplex_text(s) +
                                         ": static tangency on [0, 1]");
            continue;
        }
        scanner.scan(s);
        for (auto& e : scanner.take()) raw.push_back(e);
    }

    std::sort(raw.begin(), raw.end(), [](const RawEvent& a, const RawEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.simplex < b.simplex;
    });

    EventSchedule out;
    const double merge_window = 4 * opt.tol;
    size_t i = 0;
    while (i < raw.size()) {
        size_t j = i + 1;
        while (j < raw.size() && raw[j].time - raw[i].time <= merge_window) ++j;
        double t_mid = 0.5 * (raw[i].time + raw[j - 1].time);
        if (t_mid < 10 * opt.tol || t_mid > 1.0 - 10 * opt.tol)
            throw NonGenericScenario("nerve change too close to an endpoint of [0,1]");
        std::vector<Simplex> added, removed;
        for (size_t k = i; k < j; ++k)
            (raw[k].added ? added : removed).push_back(raw[k].simplex);
        for (const Simplex& s : added)
            if (std::find(removed.begin(), removed.end(), s) != removed.end())
                throw NonGenericScenario("simplex " + simplex_text(s) +
                                         " both added and removed within the merge window");
        if (!added.empty() && !removed.empty())
            throw NonGenericScenario(
                "additions and removals coincide near t = " + std::to_string(t_mid) +
                "; slices cannot be separated");
        NerveEvent e;
        e.time = t_mid;
        e.change = added.empty() ? ChangeKind::Removed : ChangeKind::Added;
        e.simplices = added.empty() ? removed : added;
        out.events.push_back(e);
        i = j;
    }

    for (size_t k = 0; k + 1 < out.events.size(); ++k)
        if (!(out.events[k].time < out.events[k + 1].time))
            throw NonGenericScenario("nerve changes too close together to separate");

    // one slice before the first event, one between each consecutive pair,
    // one after the last
    out.slice_times.push_back(0.0);
    for (size_t k = 0; k + 1 < out.events.size(); ++k)
        out.slice_times.push_back(0.5 * (out.events[k].time + out.events[k + 1].time));
    out.slice_times.push_back(1.0);
    return out;
}

} // namespace evade
