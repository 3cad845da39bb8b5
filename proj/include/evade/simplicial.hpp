#pragma once

#include <map>
#include <optional>
#include <vector>

#include "evade/decimal.hpp"

namespace evade {

/* Coefficient field for homology computations. */
enum class CoeffField { GF2, Rational };

/* A simplex is its sorted list of vertex ids. */
using Simplex = std::vector<int>;

Simplex sorted_simplex(Simplex s);

/* Finite abstract simplicial complex, stored as sorted simplex lists per
 * dimension. Downward closure is maintained by construction. */
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    /* Closes the given simplices under taking faces. */
    static SimplicialComplex from_maximal(const std::vector<Simplex>& maximal);

    int dim() const { return (int)by_dim_.size() - 1; }
    const std::vector<Simplex>& simplices(int k) const;
    size_t simplex_count() const;
    bool contains(const Simplex& s) const;
    std::vector<int> vertices() const;

    /* Index of a simplex within simplices(k), or nullopt. */
    std::optional<int> index_of(const Simplex& s) const;

    /* True when every simplex of `sub` is present here; otherwise fills
     * `missing` with one counterexample. */
    bool includes(const SimplicialComplex& sub, Simplex* missing = nullptr) const;

    /* New complex with the given simplices added (faces must already be
     * present or among the additions) / removed (no remaining cofaces). */
    SimplicialComplex with_added(const std::vector<Simplex>& add) const;
    SimplicialComplex with_removed(const std::vector<Simplex>& remove) const;

    bool operator==(const SimplicialComplex& o) const { return by_dim_ == o.by_dim_; }

    std::vector<Simplex> all_simplices() const;

private:
    // by_dim_[k] = sorted list of k-simplices
    std::vector<std::vector<Simplex>> by_dim_;
};

/* Connected components of the 1-skeleton (isolated vertices count). */
struct Components {
    int count = 0;
    std::map<int, int> representative; // vertex -> smallest vertex id in its component
    std::vector<int> reps;             // sorted distinct representatives
};
Components components(const SimplicialComplex& K);

/* Homology of K in one degree over the chosen field. Basis chains are stored
 * with rational entries; over GF2 they are 0/1 and understood mod 2. The
 * basis is deterministic for a fixed complex: elimination pivots follow the
 * sorted simplex order. */
struct HomologyResult {
    int degree = 0;
    int betti = 0;
    CoeffField field = CoeffField::GF2;
    // cycle_basis[i][j] = coefficient of the j-th `degree`-simplex in basis cycle i
    std::vector<std::vector<Rational>> cycle_basis;
};
HomologyResult betti(const SimplicialComplex& K, int degree, CoeffField field);

/* Matrix of H_degree(K) -> H_degree(L) induced by an inclusion K ⊆ L,
 * written in the deterministic bases produced by betti(). matrix[i][j] is
 * the coefficient of L-basis element i in the image of K-basis element j. */
struct InducedMap {
    int degree = 0;
    CoeffField field = CoeffField::GF2;
    std::vector<std::vector<Rational>> matrix;
};
InducedMap induced_map(const SimplicialComplex& K, const SimplicialComplex& L,
                       int degree, CoeffField field);

/* Integer matrices for presentations and difference maps. */
using IntMat = std::vector<std::vector<BigInt>>;

/* Nonzero diagonal entries d1 | d2 | ... of the Smith normal form. */
std::vector<BigInt> smith_normal_form(IntMat m);

/* Rank of an integer matrix (over the rationals). */
int int_rank(IntMat m);

} // namespace evade
