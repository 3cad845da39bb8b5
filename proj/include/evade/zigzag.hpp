#pragma once

#include <string>
#include <vector>

#include "evade/simplicial.hpp"

namespace evade {

/* Zigzag diagram of finite sets
 *
 *   A_0 --alpha_0--> B_0 <--beta_0-- A_1 --alpha_1--> B_1 <-- ... -- A_n
 *
 * with n+1 fibers and n spans. Elements carry string labels; maps are stored
 * by element index (alpha[j][a] is the index in spans[j] of the image of
 * fibers[j][a]).
 */
struct ZigzagSets {
    std::vector<std::vector<std::string>> fibers;
    std::vector<std::vector<std::string>> spans;
    std::vector<std::vector<int>> alpha; // alpha[j] : fibers[j]   -> spans[j]
    std::vector<std::vector<int>> beta;  // beta[j]  : fibers[j+1] -> spans[j]

    int span_count() const { return (int)spans.size(); }
    void validate() const; // shapes, totality, indices in range
};

/* Limit of a zigzag of sets: all tuples (a_0,...,a_n), one index per fiber,
 * with alpha_j(a_j) = beta_j(a_{j+1}) for every span. Tuples are listed in
 * lexicographic order of their index vectors. */
struct LimResult {
    std::vector<std::vector<int>> tuples;
    bool empty() const { return tuples.empty(); }
    long long count() const { return (long long)tuples.size(); }
};

LimResult lim_sets(const ZigzagSets& z, long long budget = 1000000);

/* Which leg of a span is claimed to be a bijection. */
enum class IsoSide { Left, Right };

/* A zigzag with every span collapsed to a single map between neighboring
 * fibers. A forward arrow j maps fiber j to fiber j+1; a backward arrow maps
 * fiber j+1 to fiber j. */
struct ChainArrow {
    bool forward = true;
    std::vector<int> map; // indexed by source fiber element
};
struct ReducedChain {
    std::vector<std::vector<std::string>> fibers;
    std::vector<ChainArrow> arrows; // arrows[j] sits between fibers j and j+1
};

/* Collapses each span using the declared bijective leg: with alpha_j
 * bijective the span becomes the backward arrow alpha_j^{-1} o beta_j, with
 * beta_j bijective the forward arrow beta_j^{-1} o alpha_j. Throws
 * IsoAssumptionViolated naming the span when the declared leg is not a
 * bijection. The limit is unchanged. */
ReducedChain reduce_spans(const ZigzagSets& z, const std::vector<IsoSide>& side);

/* Limit of a reduced chain, same tuple convention as lim_sets. */
LimResult lim_chain(const ReducedChain& c, long long budget = 1000000);

/* Finitely generated abelian group presented as Z^rank modulo the subgroup
 * generated by the relation rows. */
struct AbPresentation {
    int rank = 0;
    IntMat relations; // each row has `rank` entries
};

/* Zigzag of abelian groups, same shape as ZigzagSets. A map into a span is
 * an integer matrix with spans[j].rank rows. */
struct ZigzagAb {
    std::vector<AbPresentation> fibers;
    std::vector<AbPresentation> spans;
    std::vector<IntMat> alpha; // alpha[j] : fibers[j]   -> spans[j]
    std::vector<IntMat> beta;  // beta[j]  : fibers[j+1] -> spans[j]

    int span_count() const { return (int)spans.size(); }
    void validate() const; // shapes and relation compatibility of every map
};

/* Invariants of a finitely generated abelian group: free rank plus torsion
 * divisors d_1 | d_2 | ..., each > 1. */
struct AbelianInvariants {
    int free_rank = 0;
    std::vector<BigInt> torsion;

    bool trivial() const { return free_rank == 0 && torsion.empty(); }
    /* Group order when finite (free_rank == 0), else 0. */
    BigInt order() const;
    std::string describe() const; // e.g. "0", "Z^2", "Z/2 + Z/4", "Z + Z/3"
};

/* First derived limit of a zigzag of abelian groups: the cokernel of the
 * difference map (a_i)_i |-> (alpha_j(a_j) - beta_j(a_{j+1}))_j into the
 * product of the spans, with span relations quotiented out. */
AbelianInvariants r1lim_ab(const ZigzagAb& z);

/* Finite group given by its multiplication table. Element 0 need not be the
 * identity; validate() locates it and checks the group axioms. */
struct FiniteGroup {
    std::vector<std::string> elements;
    std::vector<std::vector<int>> table; // table[a][b] = index of a*b

    int size() const { return (int)elements.size(); }
    int identity() const;
    int inverse(int a) const;
    void validate() const;

    static FiniteGroup trivial();
    static FiniteGroup cyclic(int n);
};

/* Zigzag of finite groups, same shape; maps are element-index tables and
 * must be homomorphisms. */
struct ZigzagFinite {
    std::vector<FiniteGroup> fibers;
    std::vector<FiniteGroup> spans;
    std::vector<std::vector<int>> alpha;
    std::vector<std::vector<int>> beta;

    int span_count() const { return (int)spans.size(); }
    void validate() const;
};

/* First derived limit of a zigzag of finite groups, as the orbit set of the
 * product of the fibers acting on the product of the spans by
 * (g_i) . (h_j) = (alpha_j(g_j) h_j beta_j(g_{j+1})^{-1}). Orbits are listed
 * by their lexicographically smallest tuple. Throws when the product of span
 * orders exceeds the budget. */
struct OrbitResult {
    long long orbit_count = 0;
    std::vector<std::vector<int>> representatives;
};

OrbitResult r1lim_finite(const ZigzagFinite& z, long long budget = 10000);

} // namespace evade
