#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "freiman/errors.hpp"
#include "freiman/modmat.hpp"
#include "freiman/zn.hpp"

namespace freiman {

/**
 * A function on the members of A, stored as a value table aligned with the
 * sorted member list.  Whether it actually preserves additive quadruples is a
 * property checked by verify(), not enforced by construction.
 */
struct FreimanHom {
    std::vector<std::uint32_t> domain;  // sorted members of A
    std::vector<std::uint32_t> values;  // values[i] = f(domain[i])

    std::uint32_t value_at(std::uint32_t a) const {
        auto it = std::lower_bound(domain.begin(), domain.end(), a);
        if (it == domain.end() || *it != a) throw InvalidConfig("value requested off-domain");
        return values[static_cast<std::size_t>(it - domain.begin())];
    }
};

/// f(a) - f(b) = f(c) - f(d) over every nontrivial additive quadruple of A.
inline bool verify_freiman_hom(const SubsetOfZn& set, const FreimanHom& f) {
    if (f.domain != set.members() || f.values.size() != f.domain.size()) return false;
    const auto& g = set.group();
    for (const auto& q : enumerate_additive_quadruples(set, /*include_trivial=*/false)) {
        std::uint32_t lhs = g.sub(f.value_at(q.a), f.value_at(q.b));
        std::uint32_t rhs = g.sub(f.value_at(q.c), f.value_at(q.d));
        if (lhs != rhs) return false;
    }
    return true;
}

/// Quadruple constraints as a matrix over F_N: one column per member of A in
/// ascending order, one row per nontrivial quadruple with the (+1,-1,-1,+1)
/// pattern merged across repeated elements.  Exact duplicate rows are dropped.
struct HomConstraints {
    std::uint32_t modulus = 0;
    std::vector<std::uint32_t> columns;              // sorted members of A
    std::vector<std::vector<std::uint32_t>> rows;    // dense over columns
};

inline HomConstraints build_hom_constraints(const SubsetOfZn& set) {
    set.group().require_prime();
    const auto& g = set.group();
    HomConstraints sys;
    sys.modulus = g.modulus();
    sys.columns = set.members();

    std::vector<std::uint32_t> index_of(g.modulus(), 0);
    for (std::size_t i = 0; i < sys.columns.size(); ++i) index_of[sys.columns[i]] = static_cast<std::uint32_t>(i);

    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& q : enumerate_additive_quadruples(set, /*include_trivial=*/false)) {
        std::vector<std::uint32_t> row(sys.columns.size(), 0);
        auto bump = [&](std::uint32_t elem, bool plus) {
            std::uint32_t& slot = row[index_of[elem]];
            slot = plus ? g.add(slot, 1) : g.sub(slot, 1);
        };
        bump(q.a, true);
        bump(q.b, false);
        bump(q.c, false);
        bump(q.d, true);
        bool nonzero = false;
        for (auto v : row) nonzero |= (v != 0);
        if (nonzero && seen.insert(row).second) sys.rows.push_back(row);
    }
    return sys;
}

struct HomSpaceResult {
    std::uint32_t dimension = 0;      // dim of the solution space over F_N
    std::uint32_t rank = 0;           // dimension - 1
    std::vector<FreimanHom> basis;    // kernel basis, pivot-normalized
};

/**
 * Exact computation of the homomorphism space by elimination over F_N.
 * The kernel always contains the constants and the identity restricted to A.
 */
inline HomSpaceResult solve_hom_space(const SubsetOfZn& set) {
    set.group().require_prime();
    if (set.size() < 2) throw DegenerateSet("need at least two elements");
    HomConstraints sys = build_hom_constraints(set);
    SolvedSystem solved = solve_mod_system(sys.modulus, sys.columns.size(), sys.rows);

    HomSpaceResult out;
    out.dimension = static_cast<std::uint32_t>(sys.columns.size()) - solved.rank;
    out.rank = out.dimension - 1;
    for (auto& vec : solved.kernel)
        out.basis.push_back(FreimanHom{sys.columns, std::move(vec)});
    return out;
}

/// True when the only homomorphisms are restrictions of x -> ax + b.
inline bool is_linear(const SubsetOfZn& set) {
    set.group().require_prime();
    if (set.size() < 3) throw DegenerateSet("linearity is vacuous below three points");
    return solve_hom_space(set).rank == 1;
}

/**
 * Independent oracle: counts functions f : A -> Z_N that preserve every
 * additive quadruple, by exhausting all N^|A| assignments.
 */
inline std::uint64_t brute_force_hom_count(const SubsetOfZn& set) {
    const std::uint32_t n = set.modulus();
    const std::uint32_t k = set.size();
    double budget = 1.0;
    for (std::uint32_t i = 0; i < k; ++i) {
        budget *= n;
        if (budget > 1e7) throw TooLarge("N^|A| exceeds the enumeration bound");
    }
    const auto& mem = set.members();
    std::vector<std::uint32_t> col(set.modulus(), 0);
    for (std::size_t i = 0; i < mem.size(); ++i) col[mem[i]] = static_cast<std::uint32_t>(i);

    struct IdxQuad { std::uint32_t a, b, c, d; };
    std::vector<IdxQuad> quads;
    for (const auto& q : enumerate_additive_quadruples(set, false))
        quads.push_back({col[q.a], col[q.b], col[q.c], col[q.d]});

    const auto& g = set.group();
    std::vector<std::uint32_t> f(k, 0);
    std::uint64_t count = 0;
    while (true) {
        bool ok = true;
        for (const auto& q : quads) {
            if (g.sub(f[q.a], f[q.b]) != g.sub(f[q.c], f[q.d])) { ok = false; break; }
        }
        if (ok) ++count;
        // odometer
        std::uint32_t pos = 0;
        while (pos < k && ++f[pos] == n) f[pos++] = 0;
        if (pos == k) break;
    }
    return count;
}

/// No (x, y, z) in A^3 has x + y = z + x0 except the multiset-trivial
/// {x, y} = {z, x0} solutions.
inline bool is_isolated_element(const SubsetOfZn& set, std::uint32_t x0) {
    const auto& g = set.group();
    for (std::uint32_t x : set.members())
        for (std::uint32_t y : set.members()) {
            std::uint32_t z = g.sub(g.add(x, y), x0);
            if (!set.contains(z)) continue;
            bool trivial = (x == z && y == x0) || (x == x0 && y == z);
            if (!trivial) return false;
        }
    return true;
}

/// Scans members in descending order and returns the first isolated one.
inline std::optional<std::uint32_t> find_isolated_element(const SubsetOfZn& set) {
    if (set.size() < 3) return std::nullopt;
    const auto& mem = set.members();
    for (auto it = mem.rbegin(); it != mem.rend(); ++it)
        if (is_isolated_element(set, *it)) return *it;
    return std::nullopt;
}

/// The indicator construction: f(x0) = 1, zero elsewhere.  Isolation of x0
/// guarantees no nontrivial quadruple touches x0, so the table verifies.
inline FreimanHom indicator_hom_from_isolated(const SubsetOfZn& set, std::uint32_t x0) {
    if (set.size() < 3) throw DegenerateSet("need at least three elements");
    if (!set.contains(x0) || !is_isolated_element(set, x0))
        throw NotIsolated("element fails the isolation predicate");
    FreimanHom f;
    f.domain = set.members();
    f.values.assign(f.domain.size(), 0);
    for (std::size_t i = 0; i < f.domain.size(); ++i)
        if (f.domain[i] == x0) f.values[i] = 1;
    return f;
}

/**
 * Interpolates the unique candidate (a, b) with f = a*x + b through the first
 * two points of A and tests it on the rest; O(|A|) instead of scanning all
 * N^2 linear maps.
 */
inline bool is_restriction_of_linear(const SubsetOfZn& set, const FreimanHom& f) {
    const auto& g = set.group();
    if (f.domain.size() < 2) return true;
    std::uint32_t x0 = f.domain[0], x1 = f.domain[1];
    std::uint32_t slope = g.mul(g.sub(f.values[1], f.values[0]), g.inv(g.sub(x1, x0)));
    std::uint32_t intercept = g.sub(f.values[0], g.mul(slope, x0));
    for (std::size_t i = 2; i < f.domain.size(); ++i)
        if (f.values[i] != g.add(g.mul(slope, f.domain[i]), intercept)) return false;
    return true;
}

}  // namespace freiman
