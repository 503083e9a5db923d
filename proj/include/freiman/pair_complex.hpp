#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "freiman/errors.hpp"
#include "freiman/hom_space.hpp"
#include "freiman/modmat.hpp"
#include "freiman/zn.hpp"

namespace freiman {

/**
 * Linear constraints on functions phi : Z_N -> Z_N with phi(0) = 0, expressed
 * over the N-1 difference labels 1..N-1.  Every row has at most three nonzero
 * entries with coefficients in {+1, -1, +2, -2} after merging repeated labels;
 * all-zero rows are never stored.
 */
struct DifferenceConstraintSystem {
    std::uint32_t modulus = 0;
    // each row sorted by label, label in [1, N)
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> rows;

    std::vector<std::uint32_t> dense_row(std::size_t i) const {
        std::vector<std::uint32_t> out(modulus - 1, 0);
        for (auto [label, coeff] : rows[i]) out[label - 1] = coeff;
        return out;
    }
};

/// Some x has x, x+d1, x+d1+d2 all in A; the three values may repeat.
inline bool is_additive_pair(const SubsetOfZn& set, std::uint32_t d1, std::uint32_t d2) {
    const auto& g = set.group();
    for (std::uint32_t x : set.members())
        if (set.contains(g.add(x, d1)) && set.contains(g.add(x, g.add(d1, d2)))) return true;
    return false;
}

namespace detail {

// All additive pairs of A with both differences nonzero, via the O(|A|^3)
// triple scan (d1, d2) = (v - u, w - v).
inline std::set<std::pair<std::uint32_t, std::uint32_t>> additive_pairs(const SubsetOfZn& set) {
    const auto& g = set.group();
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
    const auto& mem = set.members();
    for (std::uint32_t u : mem)
        for (std::uint32_t v : mem) {
            std::uint32_t d1 = g.sub(v, u);
            if (d1 == 0) continue;
            for (std::uint32_t w : mem) {
                std::uint32_t d2 = g.sub(w, v);
                if (d2 != 0) pairs.emplace(d1, d2);
            }
        }
    return pairs;
}

}  // namespace detail

/// One row phi(d1) + phi(d2) - phi(d1+d2) = 0 per additive pair; terms with
/// label 0 drop out since phi(0) = 0.  Rows deduplicated.
inline DifferenceConstraintSystem build_pair_constraints(const SubsetOfZn& set) {
    set.group().require_prime();
    const auto& g = set.group();
    DifferenceConstraintSystem sys;
    sys.modulus = g.modulus();

    std::set<std::vector<std::pair<std::uint32_t, std::uint32_t>>> seen;
    for (auto [d1, d2] : detail::additive_pairs(set)) {
        std::map<std::uint32_t, std::uint32_t> coeff;  // label -> coefficient
        auto bump = [&](std::uint32_t label, bool plus) {
            if (label == 0) return;
            std::uint32_t& slot = coeff[label];
            slot = plus ? g.add(slot, 1) : g.sub(slot, 1);
        };
        bump(d1, true);
        bump(d2, true);
        bump(g.add(d1, d2), false);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> row;
        for (auto [label, c] : coeff)
            if (c != 0) row.emplace_back(label, c);
        if (!row.empty() && seen.insert(row).second) sys.rows.push_back(std::move(row));
    }
    return sys;
}

namespace detail {

inline SolvedSystem solve_difference_system(const DifferenceConstraintSystem& sys) {
    RowReducer reducer(sys.modulus, sys.modulus - 1);
    for (std::size_t i = 0; i < sys.rows.size(); ++i) reducer.insert(sys.dense_row(i));
    SolvedSystem out;
    out.rank = reducer.rank();
    out.kernel = reducer.kernel_basis();
    return out;
}

inline void require_full_difference_set(const SubsetOfZn& set) {
    if (difference_set(set).size() != set.modulus())
        throw DifferenceSetIncomplete("A - A must cover Z_N");
}

}  // namespace detail

/// dim over F_N of the solution space of the pair constraints, i.e.
/// (N - 1) - rank.  Requires A - A = Z_N.
inline std::uint32_t induced_space_dimension(const SubsetOfZn& set) {
    set.group().require_prime();
    detail::require_full_difference_set(set);
    auto solved = detail::solve_difference_system(build_pair_constraints(set));
    return (set.modulus() - 1) - solved.rank;
}

/// Kernel basis of the pair constraints as full tables phi(0..N-1), phi(0)=0.
inline std::vector<std::vector<std::uint32_t>> induced_space_basis(const SubsetOfZn& set) {
    set.group().require_prime();
    detail::require_full_difference_set(set);
    auto solved = detail::solve_difference_system(build_pair_constraints(set));
    std::vector<std::vector<std::uint32_t>> out;
    for (const auto& vec : solved.kernel) {
        std::vector<std::uint32_t> phi(set.modulus(), 0);
        for (std::uint32_t label = 1; label < set.modulus(); ++label) phi[label] = vec[label - 1];
        out.push_back(std::move(phi));
    }
    return out;
}

/// The homological linearity criterion: the solution space is one-dimensional
/// exactly when the row rank reaches N - 2.
inline bool is_linear_via_pairs(const SubsetOfZn& set) {
    set.group().require_prime();
    if (set.size() < 3) throw DegenerateSet("linearity is vacuous below three points");
    return induced_space_dimension(set) == 1;
}

/// phi(d) = f(x + d) - f(x) for any witness x; all witnesses must agree.
struct InducedFunction {
    std::uint32_t modulus = 0;
    std::vector<std::uint32_t> values;  // indexed by d, values[0] == 0
};

inline InducedFunction induced_function(const SubsetOfZn& set, const FreimanHom& f) {
    const auto& g = set.group();
    InducedFunction phi;
    phi.modulus = g.modulus();
    phi.values.assign(g.modulus(), 0);
    std::vector<bool> defined(g.modulus(), false);
    // witness agreement is checked over the differences that exist, so a bad
    // table is reported even when the difference set is incomplete
    for (std::uint32_t x : set.members())
        for (std::uint32_t y : set.members()) {
            std::uint32_t d = g.sub(y, x);
            std::uint32_t value = g.sub(f.value_at(y), f.value_at(x));
            if (!defined[d]) {
                defined[d] = true;
                phi.values[d] = value;
            } else if (phi.values[d] != value) {
                throw NotWellDefined("witnesses disagree; f is not a Freiman homomorphism");
            }
        }
    detail::require_full_difference_set(set);
    return phi;
}

/**
 * Lifts a solution of the pair constraints to a homomorphism on A by
 * restriction, translating first so that 0 lies in the set.  The result is
 * re-verified; a table outside the kernel is rejected.
 */
inline FreimanHom extend_pair_solution_to_hom(const SubsetOfZn& set,
                                              const std::vector<std::uint32_t>& phi) {
    detail::require_full_difference_set(set);
    const auto& g = set.group();
    if (phi.size() != g.modulus() || phi[0] != 0)
        throw InvalidConfig("phi must be a full table with phi(0) = 0");
    std::uint32_t shift = set.contains(0) ? 0 : set.members().front();
    FreimanHom f;
    f.domain = set.members();
    for (std::uint32_t a : f.domain) f.values.push_back(phi[g.sub(a, shift)]);
    if (!verify_freiman_hom(set, f))
        throw NotWellDefined("table is not in the kernel of the pair constraints");
    return f;
}

/// One row e_{d1} + e_{d2} + e_{d3} per 2-cell label: every triple of edge
/// labels summing to zero that is witnessed by three distinct points of A.
inline DifferenceConstraintSystem triangle_cell_rows(const SubsetOfZn& set) {
    set.group().require_prime();
    const auto& g = set.group();
    DifferenceConstraintSystem sys;
    sys.modulus = g.modulus();
    std::set<std::vector<std::pair<std::uint32_t, std::uint32_t>>> rows;
    const auto& mem = set.members();
    for (std::uint32_t x : mem)
        for (std::uint32_t y : mem) {
            if (y == x) continue;
            for (std::uint32_t z : mem) {
                if (z == x || z == y) continue;
                std::map<std::uint32_t, std::uint32_t> coeff;
                for (std::uint32_t label : {g.sub(y, x), g.sub(z, y), g.sub(x, z)})
                    coeff[label] = g.add(coeff[label], 1);
                std::vector<std::pair<std::uint32_t, std::uint32_t>> row(coeff.begin(), coeff.end());
                rows.insert(std::move(row));
            }
        }
    sys.rows.assign(rows.begin(), rows.end());
    return sys;
}

/**
 * Rank over F_N of the module spanned by the 2-cell boundary rows together
 * with the reversal rows e_d + e_{N-d}.  Agrees with
 * (N - 1) - induced_space_dimension(A).
 */
inline std::uint32_t triangle_generator_rank(const SubsetOfZn& set) {
    detail::require_full_difference_set(set);
    const auto& g = set.group();
    const std::uint32_t n = g.modulus();
    DifferenceConstraintSystem cells = triangle_cell_rows(set);

    RowReducer reducer(n, n - 1);
    for (std::size_t i = 0; i < cells.rows.size(); ++i) reducer.insert(cells.dense_row(i));
    for (std::uint32_t d = 1; d <= (n - 1) / 2; ++d) {
        std::vector<std::uint32_t> dense(n - 1, 0);
        dense[d - 1] = 1;
        dense[n - d - 1] = 1;
        reducer.insert(std::move(dense));
    }
    return reducer.rank();
}

}  // namespace freiman
