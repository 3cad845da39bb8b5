#include "evade/zigzag.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "evade/errors.hpp"

namespace evade {

namespace {

std::string at_span(int j) {
    std::ostringstream os;
    os << "span " << j;
    return os.str();
}

void check_index_map(const std::vector<int>& m, size_t domain, size_t codomain,
                     const std::string& where) {
    if (m.size() != domain)
        throw InvalidArgument(where + ": map table has wrong domain size");
    for (int v : m)
        if (v < 0 || (size_t)v >= codomain)
            throw InvalidArgument(where + ": map image out of range");
}

/* True when v lies in the integer row span of `rows`. Works on a copy in
 * column-echelon order with Euclidean elimination. */
bool in_row_lattice(IntMat rows, std::vector<BigInt> v) {
    using boost::multiprecision::abs;
    size_t cols = v.size();
    size_t r = 0;
    for (size_t c = 0; c < cols; ++c) {
        // gather a single pivot for column c among rows r..end
        while (true) {
            int best = -1;
            for (size_t i = r; i < rows.size(); ++i)
                if (rows[i][c] != 0 &&
                    (best < 0 || abs(rows[i][c]) < abs(rows[best][c])))
                    best = (int)i;
            if (best < 0) break;
            std::swap(rows[r], rows[best]);
            bool others = false;
            for (size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0) continue;
                BigInt q = rows[i][c] / rows[r][c];
                for (size_t k = c; k < cols; ++k) rows[i][k] -= q * rows[r][k];
                if (rows[i][c] != 0) others = true;
            }
            if (!others) break;
        }
        bool have_pivot = r < rows.size() && rows[r][c] != 0;
        if (v[c] != 0) {
            if (!have_pivot || v[c] % rows[r][c] != 0) return false;
            BigInt q = v[c] / rows[r][c];
            for (size_t k = c; k < cols; ++k) v[k] -= q * rows[r][k];
        }
        if (have_pivot) ++r;
    }
    return true;
}

std::vector<BigInt> apply_matrix(const IntMat& m, const std::vector<BigInt>& x) {
    std::vector<BigInt> y(m.size(), 0);
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
    return y;
}

} // namespace

void ZigzagSets::validate() const {
    if (fibers.empty()) throw InvalidArgument("zigzag needs at least one fiber");
    size_t n = spans.size();
    if (fibers.size() != n + 1)
        throw InvalidArgument("zigzag needs one more fiber than spans");
    if (alpha.size() != n || beta.size() != n)
        throw InvalidArgument("zigzag needs one alpha and one beta per span");
    for (size_t j = 0; j < n; ++j) {
        check_index_map(alpha[j], fibers[j].size(), spans[j].size(),
                        at_span((int)j) + " alpha");
        check_index_map(beta[j], fibers[j + 1].size(), spans[j].size(),
                        at_span((int)j) + " beta");
    }
}

LimResult lim_sets(const ZigzagSets& z, long long budget) {
    z.validate();
    int n = z.span_count();
    LimResult out;
    for (const auto& f : z.fibers)
        if (f.empty()) return out;

    // viable[i][a]: the partial tuple ending with a at fiber i can be completed
    std::vector<std::vector<char>> viable(n + 1);
    viable[n].assign(z.fibers[n].size(), 1);
    for (int j = n - 1; j >= 0; --j) {
        // which span values admit a viable continuation at fiber j+1
        std::vector<char> span_ok(z.spans[j].size(), 0);
        for (size_t a1 = 0; a1 < z.fibers[j + 1].size(); ++a1)
            if (viable[j + 1][a1]) span_ok[z.beta[j][a1]] = 1;
        viable[j].assign(z.fibers[j].size(), 0);
        for (size_t a = 0; a < z.fibers[j].size(); ++a)
            viable[j][a] = span_ok[z.alpha[j][a]];
    }

    std::vector<int> tuple(n + 1);
    // depth-first in index order; every visited prefix completes, so the
    // work is proportional to the output
    std::function<void(int)> extend = [&](int i) {
        if (i == n + 1) {
            if ((long long)out.tuples.size() >= budget)
                throw ResourceLimit("limit enumeration exceeds budget");
            out.tuples.push_back(tuple);
            return;
        }
        for (size_t a = 0; a < z.fibers[i].size(); ++a) {
            if (!viable[i][a]) continue;
            if (i > 0 && z.alpha[i - 1][tuple[i - 1]] != z.beta[i - 1][a]) continue;
            tuple[i] = (int)a;
            extend(i + 1);
        }
    };
    extend(0);
    return out;
}

ReducedChain reduce_spans(const ZigzagSets& z, const std::vector<IsoSide>& side) {
    z.validate();
    int n = z.span_count();
    if ((int)side.size() != n)
        throw InvalidArgument("need one declared iso side per span");
    ReducedChain out;
    out.fibers = z.fibers;
    for (int j = 0; j < n; ++j) {
        const std::vector<int>& leg = side[j] == IsoSide::Left ? z.alpha[j] : z.beta[j];
        // bijective = every span element hit exactly once
        std::vector<int> preimage(z.spans[j].size(), -1);
        bool ok = leg.size() == z.spans[j].size();
        for (size_t a = 0; a < leg.size() && ok; ++a) {
            if (preimage[leg[a]] != -1) ok = false;
            else preimage[leg[a]] = (int)a;
        }
        if (!ok)
            throw IsoAssumptionViolated(
                at_span(j) + ": declared " +
                (side[j] == IsoSide::Left ? std::string("left") : std::string("right")) +
                " map is not a bijection");
        ChainArrow arrow;
        if (side[j] == IsoSide::Left) {
            // collapse through alpha^{-1}: arrow runs from fiber j+1 back to j
            arrow.forward = false;
            arrow.map.resize(z.fibers[j + 1].size());
            for (size_t a1 = 0; a1 < arrow.map.size(); ++a1)
                arrow.map[a1] = preimage[z.beta[j][a1]];
        } else {
            arrow.forward = true;
            arrow.map.resize(z.fibers[j].size());
            for (size_t a0 = 0; a0 < arrow.map.size(); ++a0)
                arrow.map[a0] = preimage[z.alpha[j][a0]];
        }
        out.arrows.push_back(std::move(arrow));
    }
    return out;
}

LimResult lim_chain(const ReducedChain& c, long long budget) {
    int n = (int)c.arrows.size();
    if ((int)c.fibers.size() != n + 1)
        throw InvalidArgument("chain needs one more fiber than arrows");
    LimResult out;
    for (const auto& f : c.fibers)
        if (f.empty()) return out;

    std::vector<std::vector<char>> viable(n + 1);
    viable[n].assign(c.fibers[n].size(), 1);
    for (int j = n - 1; j >= 0; --j) {
        viable[j].assign(c.fibers[j].size(), 0);
        const ChainArrow& ar = c.arrows[j];
        if (ar.forward) {
            for (size_t a = 0; a < c.fibers[j].size(); ++a)
                viable[j][a] = viable[j + 1][ar.map[a]];
        } else {
            for (size_t a1 = 0; a1 < c.fibers[j + 1].size(); ++a1)
                if (viable[j + 1][a1]) viable[j][ar.map[a1]] = 1;
        }
    }

    std::vector<int> tuple(n + 1);
    std::function<void(int)> extend = [&](int i) {
        if (i == n + 1) {
            if ((long long)out.tuples.size() >= budget)
                throw ResourceLimit("limit enumeration exceeds budget");
            out.tuples.push_back(tuple);
            return;
        }
        for (size_t a = 0; a < c.fibers[i].size(); ++a) {
            if (!viable[i][a]) continue;
            if (i > 0) {
                const ChainArrow& ar = c.arrows[i - 1];
                if (ar.forward && ar.map[tuple[i - 1]] != (int)a) continue;
                if (!ar.forward && ar.map[a] != tuple[i - 1]) continue;
            }
            tuple[i] = (int)a;
            extend(i + 1);
        }
    };
    extend(0);
    return out;
}

BigInt AbelianInvariants::order() const {
    if (free_rank > 0) return 0;
    BigInt n = 1;
    for (const BigInt& d : torsion) n *= d;
    return n;
}

std::string AbelianInvariants::describe() const {
    if (trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    auto sep = [&]() {
        if (!first) os << " + ";
        first = false;
    };
    if (free_rank == 1) { sep(); os << "Z"; }
    else if (free_rank > 1) { sep(); os << "Z^" << free_rank; }
    for (const BigInt& d : torsion) { sep(); os << "Z/" << d; }
    return os.str();
}

void ZigzagAb::validate() const {
    if (fibers.empty()) throw InvalidArgument("zigzag needs at least one fiber");
    size_t n = spans.size();
    if (fibers.size() != n + 1)
        throw InvalidArgument("zigzag needs one more fiber than spans");
    if (alpha.size() != n || beta.size() != n)
        throw InvalidArgument("zigzag needs one alpha and one beta per span");
    auto check_pres = [](const AbPresentation& p, const std::string& where) {
        if (p.rank < 0) throw InvalidArgument(where + ": negative rank");
        for (const auto& row : p.relations)
            if ((int)row.size() != p.rank)
                throw InvalidArgument(where + ": relation row has wrong length");
    };
    for (size_t i = 0; i < fibers.size(); ++i)
        check_pres(fibers[i], "fiber " + std::to_string(i));
    for (size_t j = 0; j < n; ++j) check_pres(spans[j], at_span((int)j));

    auto check_map = [](const IntMat& m, const AbPresentation& from,
                        const AbPresentation& to, const std::string& where) {
        if ((int)m.size() != to.rank)
            throw InvalidArgument(where + ": matrix has wrong row count");
        for (const auto& row : m)
            if ((int)row.size() != from.rank)
                throw InvalidArgument(where + ": matrix has wrong column count");
        for (const auto& rel : from.relations)
            if (!in_row_lattice(to.relations, apply_matrix(m, rel)))
                throw InvalidArgument(where + ": map does not respect relations");
    };
    for (size_t j = 0; j < n; ++j) {
        check_map(alpha[j], fibers[j], spans[j], at_span((int)j) + " alpha");
        check_map(beta[j], fibers[j + 1], spans[j], at_span((int)j) + " beta");
    }
}

AbelianInvariants r1lim_ab(const ZigzagAb& z) {
    z.validate();
    int n = z.span_count();

    std::vector<int> span_offset(n + 1, 0);
    for (int j = 0; j < n; ++j) span_offset[j + 1] = span_offset[j] + z.spans[j].rank;
    int total_span = span_offset[n];
    std::vector<int> fiber_offset(n + 2, 0);
    for (int i = 0; i <= n; ++i) fiber_offset[i + 1] = fiber_offset[i] + z.fibers[i].rank;
    int total_fiber = fiber_offset[n + 1];

    AbelianInvariants out;
    if (total_span == 0) return out;

    int rel_count = 0;
    for (int j = 0; j < n; ++j) rel_count += (int)z.spans[j].relations.size();

    // columns: the difference map on fiber generators, then one column per
    // span relation so the cokernel is taken in the presented group
    IntMat m(total_span, std::vector<BigInt>(total_fiber + rel_count, 0));
    for (int j = 0; j < n; ++j) {
        for (int r = 0; r < z.spans[j].rank; ++r) {
            for (int c = 0; c < z.fibers[j].rank; ++c)
                m[span_offset[j] + r][fiber_offset[j] + c] = z.alpha[j][r][c];
            for (int c = 0; c < z.fibers[j + 1].rank; ++c)
                m[span_offset[j] + r][fiber_offset[j + 1] + c] = -z.beta[j][r][c];
        }
    }
    int col = total_fiber;
    for (int j = 0; j < n; ++j)
        for (const auto& rel : z.spans[j].relations) {
            for (int r = 0; r < z.spans[j].rank; ++r)
                m[span_offset[j] + r][col] = rel[r];
            ++col;
        }

    std::vector<BigInt> d = smith_normal_form(std::move(m));
    out.free_rank = total_span - (int)d.size();
    for (const BigInt& x : d)
        if (x > 1) out.torsion.push_back(x);
    return out;
}

int FiniteGroup::identity() const {
    int n = size();
    for (int e = 0; e < n; ++e) {
        bool ok = true;
        for (int x = 0; x < n && ok; ++x)
            ok = table[e][x] == x && table[x][e] == x;
        if (ok) return e;
    }
    throw InvalidArgument("multiplication table has no identity");
}

int FiniteGroup::inverse(int a) const {
    int e = identity();
    for (int b = 0; b < size(); ++b)
        if (table[a][b] == e && table[b][a] == e) return b;
    throw InvalidArgument("element has no inverse");
}

void FiniteGroup::validate() const {
    int n = size();
    if (n == 0) throw InvalidArgument("group must be nonempty");
    if ((int)table.size() != n)
        throw InvalidArgument("multiplication table has wrong size");
    for (const auto& row : table) {
        if ((int)row.size() != n)
            throw InvalidArgument("multiplication table has wrong size");
        for (int v : row)
            if (v < 0 || v >= n) throw InvalidArgument("table entry out of range");
    }
    int e = identity();
    for (int a = 0; a < n; ++a) (void)inverse(a);
    (void)e;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (table[table[a][b]][c] != table[a][table[b][c]])
                    throw InvalidArgument("multiplication table is not associative");
}

FiniteGroup FiniteGroup::trivial() {
    FiniteGroup g;
    g.elements = {"e"};
    g.table = {{0}};
    return g;
}

FiniteGroup FiniteGroup::cyclic(int n) {
    if (n < 1) throw InvalidArgument("cyclic group needs positive order");
    FiniteGroup g;
    for (int i = 0; i < n; ++i) g.elements.push_back(std::to_string(i));
    g.table.assign(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) g.table[a][b] = (a + b) % n;
    return g;
}

void ZigzagFinite::validate() const {
    if (fibers.empty()) throw InvalidArgument("zigzag needs at least one fiber");
    size_t n = spans.size();
    if (fibers.size() != n + 1)
        throw InvalidArgument("zigzag needs one more fiber than spans");
    if (alpha.size() != n || beta.size() != n)
        throw InvalidArgument("zigzag needs one alpha and one beta per span");
    for (const auto& g : fibers) g.validate();
    for (const auto& g : spans) g.validate();
    auto check_hom = [](const std::vector<int>& m, const FiniteGroup& from,
                        const FiniteGroup& to, const std::string& where) {
        check_index_map(m, from.size(), to.size(), where);
        for (int a = 0; a < from.size(); ++a)
            for (int b = 0; b < from.size(); ++b)
                if (m[from.table[a][b]] != to.table[m[a]][m[b]])
                    throw InvalidArgument(where + ": map is not a homomorphism");
    };
    for (size_t j = 0; j < n; ++j) {
        check_hom(alpha[j], fibers[j], spans[j], at_span((int)j) + " alpha");
        check_hom(beta[j], fibers[j + 1], spans[j], at_span((int)j) + " beta");
    }
}

OrbitResult r1lim_finite(const ZigzagFinite& z, long long budget) {
    z.validate();
    int n = z.span_count();
    OrbitResult out;
    if (n == 0) {
        out.orbit_count = 1;
        out.representatives = {{}};
        return out;
    }

    long long states = 1;
    for (const auto& g : z.spans) {
        states *= g.size();
        if (states > budget)
            throw ResourceLimit("product of span group orders exceeds budget");
    }

    std::vector<long long> stride(n);
    long long acc = 1;
    for (int j = n - 1; j >= 0; --j) {
        stride[j] = acc;
        acc *= z.spans[j].size();
    }
    auto decode = [&](long long s, std::vector<int>& h) {
        for (int j = 0; j < n; ++j) {
            h[j] = (int)(s / stride[j]) % z.spans[j].size();
        }
    };
    auto encode = [&](const std::vector<int>& h) {
        long long s = 0;
        for (int j = 0; j < n; ++j) s += stride[j] * h[j];
        return s;
    };

    std::vector<std::vector<int>> span_inv(n);
    for (int j = 0; j < n; ++j) {
        span_inv[j].resize(z.spans[j].size());
        for (int a = 0; a < z.spans[j].size(); ++a) span_inv[j][a] = z.spans[j].inverse(a);
    }
    std::vector<int> fiber_id(n + 1);
    for (int i = 0; i <= n; ++i) fiber_id[i] = z.fibers[i].identity();

    std::vector<long long> parent(states);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<long long(long long)> find = [&](long long x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](long long a, long long b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };

    std::vector<int> h(n), img(n);
    for (long long s = 0; s < states; ++s) {
        decode(s, h);
        // a generator g in fiber i multiplies span i-1 on the right by
        // beta(g)^{-1} and span i on the left by alpha(g)
        for (int i = 0; i <= n; ++i) {
            for (int g = 0; g < z.fibers[i].size(); ++g) {
                if (g == fiber_id[i]) continue;
                img = h;
                if (i >= 1) {
                    int j = i - 1;
                    img[j] = z.spans[j].table[h[j]][span_inv[j][z.beta[j][g]]];
                }
                if (i <= n - 1) {
                    img[i] = z.spans[i].table[z.alpha[i][g]][h[i]];
                }
                unite(s, encode(img));
            }
        }
    }

    for (long long s = 0; s < states; ++s) {
        if (find(s) != s) continue;
        decode(s, h);
        out.representatives.push_back(h);
    }
    out.orbit_count = (long long)out.representatives.size();
    return out;
}

} // namespace evade
