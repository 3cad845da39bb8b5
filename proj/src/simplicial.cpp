#include "evade/simplicial.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "evade/errors.hpp"

namespace evade {

namespace {

std::string simplex_text(const Simplex& s) {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "}";
    return os.str();
}

/* Arithmetic mod 2, packaged so the elimination code below is field generic. */
struct F2 {
    uint8_t v = 0;
    F2() = default;
    explicit F2(int x) : v(uint8_t(x & 1)) {}
    bool zero() const { return v == 0; }
    F2 operator+(F2 o) const { return F2(v ^ o.v); }
    F2 operator-(F2 o) const { return F2(v ^ o.v); }
    F2 operator*(F2 o) const { return F2(v & o.v); }
    F2 operator-() const { return *this; }
    F2 inv() const { return *this; }
};

struct Rat {
    Rational v = 0;
    Rat() = default;
    explicit Rat(int x) : v(x) {}
    explicit Rat(Rational x) : v(std::move(x)) {}
    bool zero() const { return v == 0; }
    Rat operator+(const Rat& o) const { return Rat(v + o.v); }
    Rat operator-(const Rat& o) const { return Rat(v - o.v); }
    Rat operator*(const Rat& o) const { return Rat(v * o.v); }
    Rat operator-() const { return Rat(-v); }
    Rat inv() const { return Rat(1 / v); }
};

template <class T> using Mat = std::vector<std::vector<T>>;

/* In-place reduced row echelon form; returns pivot columns in order.
 * Pivot choice scans columns left to right, so results are deterministic. */
template <class T>
std::vector<int> rref(Mat<T>& m) {
    std::vector<int> pivots;
    int rows = (int)m.size();
    int cols = rows ? (int)m[0].size() : 0;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pr = -1;
        for (int i = r; i < rows; ++i)
            if (!m[i][c].zero()) { pr = i; break; }
        if (pr < 0) continue;
        std::swap(m[r], m[pr]);
        T piv_inv = m[r][c].inv();
        for (int j = c; j < cols; ++j) m[r][j] = m[r][j] * piv_inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c].zero()) continue;
            T f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

/* Basis of the null space of m (columns are variables), from its RREF. */
template <class T>
std::vector<std::vector<T>> kernel_basis(Mat<T> m, int cols) {
    std::vector<int> pivots = rref(m);
    std::vector<char> is_pivot(cols, 0);
    for (int c : pivots) is_pivot[c] = 1;
    std::vector<std::vector<T>> basis;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<T> x(cols);
        x[f] = T(1);
        for (size_t r = 0; r < pivots.size(); ++r) {
            // row r of the RREF reads: x[pivots[r]] + sum(m[r][j] x[j]) = 0
            x[pivots[r]] = -m[r][f];
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

/* Incremental reducer: keeps rows in echelon form and can tell whether a new
 * vector lies in the span of those already absorbed. */
template <class T>
struct Reducer {
    std::vector<std::vector<T>> rows; // echelon rows
    std::vector<int> lead;            // pivot column per row

    // Reduces v in place; returns true if v was independent (and absorbs it).
    bool absorb(std::vector<T> v) {
        reduce(v);
        int p = pivot_of(v);
        if (p < 0) return false;
        T inv = v[p].inv();
        for (auto& x : v) x = x * inv;
        rows.push_back(std::move(v));
        lead.push_back(p);
        return true;
    }

    bool in_span(std::vector<T> v) {
        reduce(v);
        return pivot_of(v) < 0;
    }

    void reduce(std::vector<T>& v) const {
        for (size_t r = 0; r < rows.size(); ++r) {
            if (v[lead[r]].zero()) continue;
            T f = v[lead[r]];
            const auto& row = rows[r];
            for (size_t j = 0; j < v.size(); ++j) v[j] = v[j] - f * row[j];
        }
    }

    static int pivot_of(const std::vector<T>& v) {
        for (size_t j = 0; j < v.size(); ++j)
            if (!v[j].zero()) return (int)j;
        return -1;
    }
};

/* Solves A x = b for A with independent columns; returns false when b is
 * outside the column span. */
template <class T>
bool solve_columns(const std::vector<std::vector<T>>& columns, std::vector<T> b,
                   std::vector<T>& x_out) {
    int n = (int)b.size();
    int k = (int)columns.size();
    Mat<T> aug(n, std::vector<T>(k + 1));
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) aug[i][j] = columns[j][i];
    for (int i = 0; i < n; ++i) aug[i][k] = b[i];
    std::vector<int> pivots = rref(aug);
    std::vector<T> x(k);
    for (size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == k) return false; // inconsistent
        x[pivots[r]] = aug[r][k];
    }
    x_out = std::move(x);
    return true;
}

/* Boundary matrix of K in degree k: rows are (k-1)-simplices, columns are
 * k-simplices, signs alternate in the face ordering. */
template <class T>
Mat<T> boundary_matrix(const SimplicialComplex& K, int k) {
    const auto& rows_s = K.simplices(k - 1);
    const auto& cols_s = K.simplices(k);
    Mat<T> m(rows_s.size(), std::vector<T>(cols_s.size()));
    for (size_t c = 0; c < cols_s.size(); ++c) {
        const Simplex& s = cols_s[c];
        int sign = 1;
        for (size_t drop = 0; drop < s.size(); ++drop) {
            Simplex face;
            face.reserve(s.size() - 1);
            for (size_t i = 0; i < s.size(); ++i)
                if (i != drop) face.push_back(s[i]);
            auto idx = K.index_of(face);
            m[*idx][c] = m[*idx][c] + T(sign);
            sign = -sign;
        }
    }
    return m;
}

template <class T>
struct HomologyBasis {
    std::vector<std::vector<T>> cycles;    // chosen homology representatives
    std::vector<std::vector<T>> boundary;  // basis of im(boundary from degree+1)
};

template <class T>
HomologyBasis<T> homology_basis(const SimplicialComplex& K, int k) {
    int nk = (k >= 0 && k <= K.dim()) ? (int)K.simplices(k).size() : 0;
    HomologyBasis<T> out;
    if (nk == 0) return out;

    std::vector<std::vector<T>> cycles;
    if (k == 0) {
        for (int i = 0; i < nk; ++i) {
            std::vector<T> e(nk);
            e[i] = T(1);
            cycles.push_back(std::move(e));
        }
    } else {
        cycles = kernel_basis(boundary_matrix<T>(K, k), nk);
    }

    if (k + 1 <= K.dim() && !K.simplices(k + 1).empty()) {
        Mat<T> d = boundary_matrix<T>(K, k + 1);
        Mat<T> work = d;
        std::vector<int> pivots = rref(work);
        for (int c : pivots) {
            std::vector<T> col(nk);
            for (int i = 0; i < nk; ++i) col[i] = d[i][c];
            out.boundary.push_back(std::move(col));
        }
    }

    Reducer<T> red;
    for (const auto& b : out.boundary) red.absorb(b);
    for (auto& z : cycles) {
        std::vector<T> copy = z;
        if (red.absorb(std::move(copy))) out.cycles.push_back(std::move(z));
    }
    return out;
}

Rational to_rational(F2 x) { return Rational(int(x.v)); }
Rational to_rational(const Rat& x) { return x.v; }

template <class T>
HomologyResult betti_impl(const SimplicialComplex& K, int degree, CoeffField field) {
    HomologyBasis<T> hb = homology_basis<T>(K, degree);
    HomologyResult res;
    res.degree = degree;
    res.field = field;
    res.betti = (int)hb.cycles.size();
    for (const auto& z : hb.cycles) {
        std::vector<Rational> row;
        row.reserve(z.size());
        for (const auto& x : z) row.push_back(to_rational(x));
        res.cycle_basis.push_back(std::move(row));
    }
    return res;
}

template <class T>
InducedMap induced_impl(const SimplicialComplex& K, const SimplicialComplex& L,
                        int degree, CoeffField field) {
    HomologyBasis<T> hk = homology_basis<T>(K, degree);
    HomologyBasis<T> hl = homology_basis<T>(L, degree);

    int nL = (degree >= 0 && degree <= L.dim()) ? (int)L.simplices(degree).size() : 0;
    std::vector<std::vector<T>> columns = hl.cycles;
    for (const auto& b : hl.boundary) columns.push_back(b);

    InducedMap out;
    out.degree = degree;
    out.field = field;
    out.matrix.assign(hl.cycles.size(), std::vector<Rational>(hk.cycles.size(), Rational(0)));

    const auto& k_simp = (degree <= K.dim() && degree >= 0)
                             ? K.simplices(degree)
                             : std::vector<Simplex>{};
    for (size_t j = 0; j < hk.cycles.size(); ++j) {
        std::vector<T> chain(nL);
        for (size_t c = 0; c < k_simp.size(); ++c) {
            if (hk.cycles[j][c].zero()) continue;
            auto idx = L.index_of(k_simp[c]);
            chain[*idx] = hk.cycles[j][c];
        }
        std::vector<T> x;
        if (!solve_columns(columns, std::move(chain), x))
            throw IsoAssumptionViolated("image chain not expressible in target homology basis");
        for (size_t i = 0; i < hl.cycles.size(); ++i)
            out.matrix[i][j] = to_rational(x[i]);
    }
    return out;
}

} // namespace

Simplex sorted_simplex(Simplex s) {
    std::sort(s.begin(), s.end());
    auto last = std::unique(s.begin(), s.end());
    if (last != s.end()) throw InvalidArgument("simplex has repeated vertices");
    return s;
}

SimplicialComplex SimplicialComplex::from_maximal(const std::vector<Simplex>& maximal) {
    std::set<Simplex> all;
    for (const Simplex& raw : maximal) {
        Simplex s = sorted_simplex(raw);
        if (s.empty()) throw InvalidArgument("empty simplex");
        size_t n = s.size();
        if (n > 30) throw InvalidArgument("simplex too large");
        for (uint32_t mask = 1; mask < (1u << n); ++mask) {
            Simplex face;
            for (size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) face.push_back(s[i]);
            all.insert(std::move(face));
        }
    }
    SimplicialComplex K;
    for (const Simplex& s : all) {
        int k = (int)s.size() - 1;
        if ((int)K.by_dim_.size() <= k) K.by_dim_.resize(k + 1);
        K.by_dim_[k].push_back(s);
    }
    // std::set iteration is lexicographic per dimension-mixed order; re-sort per dim
    for (auto& v : K.by_dim_) std::sort(v.begin(), v.end());
    return K;
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const {
    static const std::vector<Simplex> empty;
    if (k < 0 || k >= (int)by_dim_.size()) return empty;
    return by_dim_[k];
}

size_t SimplicialComplex::simplex_count() const {
    size_t n = 0;
    for (const auto& v : by_dim_) n += v.size();
    return n;
}

bool SimplicialComplex::contains(const Simplex& s) const {
    return index_of(s).has_value();
}

std::optional<int> SimplicialComplex::index_of(const Simplex& s) const {
    int k = (int)s.size() - 1;
    if (k < 0 || k >= (int)by_dim_.size()) return std::nullopt;
    const auto& v = by_dim_[k];
    auto it = std::lower_bound(v.begin(), v.end(), s);
    if (it == v.end() || *it != s) return std::nullopt;
    return (int)(it - v.begin());
}

std::vector<int> SimplicialComplex::vertices() const {
    std::vector<int> out;
    for (const Simplex& s : simplices(0)) out.push_back(s[0]);
    return out;
}

bool SimplicialComplex::includes(const SimplicialComplex& sub, Simplex* missing) const {
    for (int k = 0; k <= sub.dim(); ++k)
        for (const Simplex& s : sub.simplices(k))
            if (!contains(s)) {
                if (missing) *missing = s;
                return false;
            }
    return true;
}

std::vector<Simplex> SimplicialComplex::all_simplices() const {
    std::vector<Simplex> out;
    for (const auto& v : by_dim_) out.insert(out.end(), v.begin(), v.end());
    return out;
}

SimplicialComplex SimplicialComplex::with_added(const std::vector<Simplex>& add) const {
    std::set<Simplex> all;
    for (const auto& v : by_dim_) all.insert(v.begin(), v.end());
    for (const Simplex& raw : add) {
        Simplex s = sorted_simplex(raw);
        if (all.count(s))
            throw InvalidArgument("added simplex already present: " + simplex_text(s));
        all.insert(s);
    }
    // verify downward closure of the result
    for (const Simplex& s : all) {
        if (s.size() == 1) continue;
        for (size_t drop = 0; drop < s.size(); ++drop) {
            Simplex face;
            for (size_t i = 0; i < s.size(); ++i)
                if (i != drop) face.push_back(s[i]);
            if (!all.count(face))
                throw InvalidArgument("addition breaks closure: missing face " +
                                      simplex_text(face) + " of " + simplex_text(s));
        }
    }
    SimplicialComplex K;
    for (const Simplex& s : all) {
        int k = (int)s.size() - 1;
        if ((int)K.by_dim_.size() <= k) K.by_dim_.resize(k + 1);
        K.by_dim_[k].push_back(s);
    }
    for (auto& v : K.by_dim_) std::sort(v.begin(), v.end());
    return K;
}

SimplicialComplex SimplicialComplex::with_removed(const std::vector<Simplex>& remove) const {
    std::set<Simplex> all;
    for (const auto& v : by_dim_) all.insert(v.begin(), v.end());
    for (const Simplex& raw : remove) {
        Simplex s = sorted_simplex(raw);
        if (!all.erase(s))
            throw InvalidArgument("removed simplex not present: " + simplex_text(s));
    }
    for (const Simplex& s : all) {
        if (s.size() == 1) continue;
        for (size_t drop = 0; drop < s.size(); ++drop) {
            Simplex face;
            for (size_t i = 0; i < s.size(); ++i)
                if (i != drop) face.push_back(s[i]);
            if (!all.count(face))
                throw InvalidArgument("removal leaves dangling coface " + simplex_text(s));
        }
    }
    SimplicialComplex K;
    for (const Simplex& s : all) {
        int k = (int)s.size() - 1;
        if ((int)K.by_dim_.size() <= k) K.by_dim_.resize(k + 1);
        K.by_dim_[k].push_back(s);
    }
    for (auto& v : K.by_dim_) std::sort(v.begin(), v.end());
    while (!K.by_dim_.empty() && K.by_dim_.back().empty()) K.by_dim_.pop_back();
    return K;
}

Components components(const SimplicialComplex& K) {
    std::map<int, int> parent;
    for (int v : K.vertices()) parent[v] = v;
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    for (const Simplex& e : K.simplices(1)) {
        int a = find(e[0]), b = find(e[1]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    Components out;
    for (auto& [v, _] : parent) out.representative[v] = find(v);
    std::set<int> reps;
    for (auto& [v, r] : out.representative) reps.insert(r);
    out.reps.assign(reps.begin(), reps.end());
    out.count = (int)out.reps.size();
    return out;
}

HomologyResult betti(const SimplicialComplex& K, int degree, CoeffField field) {
    if (degree < 0) throw InvalidArgument("negative homology degree");
    if (field == CoeffField::GF2) return betti_impl<F2>(K, degree, field);
    return betti_impl<Rat>(K, degree, field);
}

InducedMap induced_map(const SimplicialComplex& K, const SimplicialComplex& L,
                       int degree, CoeffField field) {
    Simplex missing;
    if (!L.includes(K, &missing))
        throw InvalidArgument("induced_map requires an inclusion; missing simplex " +
                              simplex_text(missing));
    if (field == CoeffField::GF2) return induced_impl<F2>(K, L, degree, field);
    return induced_impl<Rat>(K, L, degree, field);
}

std::vector<BigInt> smith_normal_form(IntMat a) {
    int rows = (int)a.size();
    int cols = rows ? (int)a[0].size() : 0;
    using boost::multiprecision::abs;
    int t = 0;
    while (t < rows && t < cols) {
        int pi = -1, pj = -1;
        BigInt best = 0;
        for (int i = t; i < rows; ++i)
            for (int j = t; j < cols; ++j)
                if (a[i][j] != 0 && (pi < 0 || abs(a[i][j]) < best)) {
                    pi = i;
                    pj = j;
                    best = abs(a[i][j]);
                }
        if (pi < 0) break;
        std::swap(a[t], a[pi]);
        for (int i = 0; i < rows; ++i) std::swap(a[i][t], a[i][pj]);

        bool clean = false;
        while (!clean) {
            clean = true;
            for (int i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                BigInt q = a[i][t] / a[t][t];
                for (int j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) {
                    std::swap(a[t], a[i]); // smaller remainder becomes the pivot
                    clean = false;
                }
            }
            if (!clean) continue;
            for (int j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                BigInt q = a[t][j] / a[t][t];
                for (int i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) {
                    for (int i = 0; i < rows; ++i) std::swap(a[i][t], a[i][j]);
                    clean = false;
                }
            }
        }

        // pivot must divide everything that remains; if not, fold the
        // offending row in and repeat with a smaller pivot
        bool redo = false;
        for (int i = t + 1; i < rows && !redo; ++i)
            for (int j = t + 1; j < cols && !redo; ++j)
                if (a[i][j] % a[t][t] != 0) {
                    for (int jj = t; jj < cols; ++jj) a[t][jj] += a[i][jj];
                    redo = true;
                }
        if (redo) continue;
        ++t;
    }
    std::vector<BigInt> d;
    for (int i = 0; i < t; ++i) d.push_back(abs(a[i][i]));
    return d;
}

int int_rank(IntMat m) {
    Mat<Rat> q(m.size());
    for (size_t i = 0; i < m.size(); ++i) {
        q[i].resize(m[i].size());
        for (size_t j = 0; j < m[i].size(); ++j) q[i][j] = Rat(Rational(m[i][j]));
    }
    return (int)rref(q).size();
}

} // namespace evade
