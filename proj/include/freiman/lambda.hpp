#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "freiman/errors.hpp"
#include "freiman/zn.hpp"

namespace freiman {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint32_t kDefaultLevelCap = 3;
inline constexpr std::uint64_t kDefaultTupleBudget = 1ull << 26;

/// Degree of the level-i count polynomial is 2d + 1 = 3^{i+1}.
inline std::uint32_t lambda_free_dimension(std::uint32_t level) {
    std::uint32_t pow3 = 3;
    for (std::uint32_t i = 0; i < level; ++i) pow3 *= 3;
    return (pow3 - 1) / 2;  // (3^{i+1} - 1) / 2
}

inline std::uint32_t lambda_degree(std::uint32_t level) {
    return 2 * lambda_free_dimension(level) + 1;
}

enum class LambdaMode : std::uint8_t { exact_count = 0, positivity = 1 };

/**
 * Per-level values of the recursive count polynomial, stored up to translation:
 * the value for (a, b, c) depends only on the difference pair (b - a, c - a),
 * so a level is an N x N table instead of N^3 entries.  Exact mode keeps
 * arbitrary-precision counts (they reach N^{(3^{i+1}-1)/2}); positivity mode
 * keeps one bit per entry.
 */
struct LambdaTable {
    std::uint32_t level = 0;
    std::uint32_t modulus = 0;
    LambdaMode mode = LambdaMode::exact_count;
    std::vector<BigInt> counts;    // row-major (u, v), exact mode
    std::vector<std::uint8_t> bits;  // positivity mode

    std::size_t index(std::uint32_t u, std::uint32_t v) const {
        return static_cast<std::size_t>(u) * modulus + v;
    }

    const BigInt& count_by_diff(std::uint32_t u, std::uint32_t v) const {
        return counts[index(u, v)];
    }

    bool positive_by_diff(std::uint32_t u, std::uint32_t v) const {
        return mode == LambdaMode::positivity ? bits[index(u, v)] != 0
                                              : counts[index(u, v)] > 0;
    }

    const BigInt& count(std::uint32_t a, std::uint32_t b, std::uint32_t c) const {
        CyclicGroup g(modulus);
        return count_by_diff(g.sub(b, a), g.sub(c, a));
    }

    bool positive(std::uint32_t a, std::uint32_t b, std::uint32_t c) const {
        CyclicGroup g(modulus);
        return positive_by_diff(g.sub(b, a), g.sub(c, a));
    }
};

/// Number of x with x + a, x + b, x + c all in A.
inline std::uint64_t lambda0(const SubsetOfZn& set, std::uint32_t a, std::uint32_t b,
                             std::uint32_t c) {
    const auto& g = set.group();
    std::uint64_t count = 0;
    for (std::uint32_t x = 0; x < g.modulus(); ++x)
        if (set.contains(g.add(x, a)) && set.contains(g.add(x, b)) && set.contains(g.add(x, c)))
            ++count;
    return count;
}

/**
 * Bottom-up tables T_0 .. T_i.  Each level follows from the previous through
 *   T'(u, v) = sum_w T(u, w) T(w, v) T(u - w, v - w),
 * which is the difference-pair form of the subdivision recursion.
 */
inline std::vector<LambdaTable> build_lambda_tables(const SubsetOfZn& set, std::uint32_t level,
                                                    LambdaMode mode,
                                                    std::uint32_t level_cap = kDefaultLevelCap) {
    if (level > level_cap) throw LevelCapExceeded("requested level exceeds the cap");
    const auto& g = set.group();
    const std::uint32_t n = g.modulus();

    std::vector<LambdaTable> tables;
    tables.reserve(level + 1);

    LambdaTable base;
    base.level = 0;
    base.modulus = n;
    base.mode = mode;
    if (mode == LambdaMode::exact_count)
        base.counts.assign(static_cast<std::size_t>(n) * n, BigInt(0));
    else
        base.bits.assign(static_cast<std::size_t>(n) * n, 0);
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = 0; v < n; ++v) {
            std::uint64_t c = lambda0(set, 0, u, v);
            if (mode == LambdaMode::exact_count)
                base.counts[base.index(u, v)] = c;
            else
                base.bits[base.index(u, v)] = c > 0 ? 1 : 0;
        }
    tables.push_back(std::move(base));

    for (std::uint32_t i = 0; i < level; ++i) {
        const LambdaTable& prev = tables.back();
        LambdaTable next;
        next.level = i + 1;
        next.modulus = n;
        next.mode = mode;
        if (mode == LambdaMode::exact_count) {
            next.counts.assign(static_cast<std::size_t>(n) * n, BigInt(0));
            for (std::uint32_t u = 0; u < n; ++u)
                for (std::uint32_t v = 0; v < n; ++v) {
                    BigInt total = 0;
                    for (std::uint32_t w = 0; w < n; ++w)
                        total += prev.count_by_diff(u, w) * prev.count_by_diff(w, v) *
                                 prev.count_by_diff(g.sub(u, w), g.sub(v, w));
                    next.counts[next.index(u, v)] = std::move(total);
                }
        } else {
            next.bits.assign(static_cast<std::size_t>(n) * n, 0);
            for (std::uint32_t u = 0; u < n; ++u)
                for (std::uint32_t v = 0; v < n; ++v) {
                    std::uint8_t bit = 0;
                    for (std::uint32_t w = 0; w < n && !bit; ++w)
                        bit = prev.positive_by_diff(u, w) && prev.positive_by_diff(w, v) &&
                              prev.positive_by_diff(g.sub(u, w), g.sub(v, w));
                    next.bits[next.index(u, v)] = bit;
                }
        }
        tables.push_back(std::move(next));
    }
    return tables;
}

inline LambdaTable lambda_table(const SubsetOfZn& set, std::uint32_t level, LambdaMode mode,
                                std::uint32_t level_cap = kDefaultLevelCap) {
    auto tables = build_lambda_tables(set, level, mode, level_cap);
    return std::move(tables.back());
}

/// Positivity over all triples with a, b, c distinct, i.e. difference pairs
/// (u, v) with u, v nonzero and u != v.
inline bool all_triangles_positive(const LambdaTable& table) {
    const std::uint32_t n = table.modulus;
    for (std::uint32_t u = 1; u < n; ++u)
        for (std::uint32_t v = 1; v < n; ++v)
            if (u != v && !table.positive_by_diff(u, v)) return false;
    return true;
}

inline bool all_triangles_positive(const SubsetOfZn& set, std::uint32_t level,
                                   std::uint32_t level_cap = kDefaultLevelCap) {
    return all_triangles_positive(lambda_table(set, level, LambdaMode::positivity, level_cap));
}

/// Smallest level at or below i_max with full positivity; each level is
/// checked independently (monotonicity in the level is not assumed).
inline std::optional<std::uint32_t> min_level_all_positive(const SubsetOfZn& set,
                                                           std::uint32_t i_max,
                                                           std::uint32_t level_cap = kDefaultLevelCap) {
    auto tables = build_lambda_tables(set, i_max, LambdaMode::positivity, level_cap);
    for (std::uint32_t i = 0; i <= i_max; ++i)
        if (all_triangles_positive(tables[i])) return i;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Symbolic linear forms of the flattened recursion.
// ---------------------------------------------------------------------------

/// A form x + y given as two indices into the symbol list (a, b, c, v_1, .., v_d);
/// symbols 0, 1, 2 are the parameters, 3 + k is the free variable v_{k+1}.
struct LinearForm {
    std::uint32_t first = 0;
    std::uint32_t second = 0;  // always a free variable
    bool operator==(const LinearForm&) const = default;
};

struct LinearFormSet {
    std::uint32_t level = 0;
    std::uint32_t dimension = 0;  // number of free variables d, 2d + 1 = 3^{i+1}
    std::vector<LinearForm> forms;
};

/**
 * The flattened form list, built by the same three-block substitution the
 * level recursion performs: block 1 substitutes parameters (a, b, z), block 2
 * (a, z, c), block 3 (z, b, c), with z appended as the last free variable.
 * Level 0 is (v_1 + a, v_1 + b, v_1 + c).
 */
inline LinearFormSet psi_forms(std::uint32_t level, std::uint32_t level_cap = kDefaultLevelCap) {
    if (level > level_cap) throw LevelCapExceeded("requested level exceeds the cap");
    LinearFormSet current;
    current.level = 0;
    current.dimension = 1;
    current.forms = {{0, 3}, {1, 3}, {2, 3}};
    for (std::uint32_t i = 0; i < level; ++i) {
        const std::uint32_t d = current.dimension;
        LinearFormSet next;
        next.level = i + 1;
        next.dimension = 3 * d + 1;
        const std::uint32_t z_symbol = 3 + next.dimension - 1;
        // parameter substitution and variable offset per block
        const std::array<std::array<std::uint32_t, 3>, 3> param_map = {{
            {0, 1, z_symbol},
            {0, z_symbol, 2},
            {z_symbol, 1, 2},
        }};
        for (std::uint32_t block = 0; block < 3; ++block) {
            const std::uint32_t var_offset = block * d;
            for (const LinearForm& f : current.forms) {
                auto substitute = [&](std::uint32_t symbol) {
                    return symbol < 3 ? param_map[block][symbol] : symbol + var_offset;
                };
                next.forms.push_back({substitute(f.first), substitute(f.second)});
            }
        }
        current = std::move(next);
    }
    return current;
}

/// Checks the structural properties of a form set: the second slot is a free
/// variable, the two slots differ, and no two forms coincide as pairs.
inline bool validate_psi_forms(const LinearFormSet& set) {
    if (set.forms.size() != 2 * static_cast<std::size_t>(set.dimension) + 1) return false;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const LinearForm& f : set.forms) {
        if (f.second < 3 || f.second >= 3 + set.dimension) return false;
        if (f.first >= 3 + set.dimension) return false;
        if (f.first == f.second) return false;
        auto key = std::minmax(f.first, f.second);
        if (!seen.insert({key.first, key.second}).second) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Short-relation degeneracy.
// ---------------------------------------------------------------------------

namespace detail {

struct Relation {
    // (symbol index, coefficient); coefficients sum to at most 4 in absolute value
    std::vector<std::pair<std::uint32_t, int>> entries;
};

/// All non-formally-zero signed combinations of at most four symbol slots,
/// canonicalized up to global sign; cached per symbol count.
inline const std::vector<Relation>& short_relations(std::uint32_t symbol_count) {
    static std::map<std::uint32_t, std::vector<Relation>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(symbol_count);
    if (it != cache.end()) return it->second;

    std::set<std::vector<std::pair<std::uint32_t, int>>> seen;
    std::vector<Relation> out;
    std::vector<std::pair<std::uint32_t, int>> current;

    // Enumerate net coefficient vectors with sum |c| <= 4 in symbol order.
    auto emit = [&]() {
        if (current.empty()) return;
        auto canon = current;
        if (canon.front().second < 0)
            for (auto& e : canon) e.second = -e.second;
        if (seen.insert(canon).second) out.push_back(Relation{canon});
    };
    // Recursive generator over symbols.
    struct Gen {
        std::uint32_t nsym;
        std::vector<std::pair<std::uint32_t, int>>& current;
        decltype(emit)& emit_fn;
        void operator()(std::uint32_t sym, int budget) {
            if (sym == nsym) {
                emit_fn();
                return;
            }
            (*this)(sym + 1, budget);
            for (int mag = 1; mag <= budget; ++mag) {
                for (int sign : {1, -1}) {
                    current.emplace_back(sym, sign * mag);
                    (*this)(sym + 1, budget - mag);
                    current.pop_back();
                }
            }
        }
    } gen{symbol_count, current, emit};
    gen(0, 4);

    auto [pos, inserted] = cache.emplace(symbol_count, std::move(out));
    return pos->second;
}

}  // namespace detail

/// A relation among the parameters alone (length at most 4) holds mod N.
inline bool has_parameter_relation(const CyclicGroup& g, std::uint32_t a, std::uint32_t b,
                                   std::uint32_t c) {
    const std::array<std::uint32_t, 3> vals = {a, b, c};
    for (const auto& rel : detail::short_relations(3)) {
        std::int64_t sum = 0;
        for (auto [sym, coeff] : rel.entries) sum += static_cast<std::int64_t>(coeff) * vals[sym];
        if (g.reduce(sum) == 0) return true;
    }
    return false;
}

/**
 * True when some signed combination of at most four values drawn from
 * {v_1, .., v_d, a, b, c} vanishes mod N without being formally zero.  A
 * relation among the parameters alone makes every tuple degenerate.
 */
inline bool is_degenerate_tuple(const std::vector<std::uint32_t>& v, std::uint32_t a,
                                std::uint32_t b, std::uint32_t c, std::uint32_t level,
                                const CyclicGroup& g) {
    const std::uint32_t d = lambda_free_dimension(level);
    if (v.size() != d) throw InvalidConfig("tuple length does not match the level");
    std::vector<std::uint32_t> vals = {a, b, c};
    vals.insert(vals.end(), v.begin(), v.end());
    for (const auto& rel : detail::short_relations(d + 3)) {
        std::int64_t sum = 0;
        for (auto [sym, coeff] : rel.entries) sum += static_cast<std::int64_t>(coeff) * vals[sym];
        if (g.reduce(sum) == 0) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Nondegenerate enumeration.
// ---------------------------------------------------------------------------

namespace detail {

/**
 * Depth-first scan over the free-variable tuples of a form set.  Forms are
 * evaluated at the depth where their last variable gets bound, so a subtree is
 * pruned as soon as a form value repeats (when distinct values are required)
 * or leaves the set (when membership is required).
 */
template <typename Visitor>
void scan_form_tuples(const CyclicGroup& g, const LinearFormSet& formset, std::uint32_t a,
                      std::uint32_t b, std::uint32_t c, bool require_distinct_values,
                      const SubsetOfZn* membership, Visitor&& visit) {
    const std::uint32_t n = g.modulus();
    const std::uint32_t d = formset.dimension;

    // forms indexed by the depth at which they become evaluable
    std::vector<std::vector<std::uint32_t>> forms_at_depth(d);
    for (std::uint32_t fi = 0; fi < formset.forms.size(); ++fi) {
        const LinearForm& f = formset.forms[fi];
        std::uint32_t depth = f.second - 3;
        if (f.first >= 3) depth = std::max(depth, f.first - 3);
        forms_at_depth[depth].push_back(fi);
    }

    std::vector<std::uint32_t> symbol_values(3 + d, 0);
    symbol_values[0] = a;
    symbol_values[1] = b;
    symbol_values[2] = c;
    std::vector<std::uint32_t> form_values(formset.forms.size(), 0);
    std::vector<std::uint16_t> use_count(n, 0);
    std::vector<std::vector<std::uint32_t>> marked(d);

    auto unmark_depth = [&](std::uint32_t depth) {
        for (std::uint32_t val : marked[depth]) --use_count[val];
        marked[depth].clear();
    };

    // explicit recursion over depths
    auto recurse = [&](auto&& self, std::uint32_t depth) -> void {
        if (depth == d) {
            visit(std::vector<std::uint32_t>(symbol_values.begin() + 3, symbol_values.end()),
                  form_values);
            return;
        }
        for (std::uint32_t value = 0; value < n; ++value) {
            symbol_values[3 + depth] = value;
            bool ok = true;
            for (std::uint32_t fi : forms_at_depth[depth]) {
                const LinearForm& f = formset.forms[fi];
                std::uint32_t fv = g.add(symbol_values[f.first], symbol_values[f.second]);
                if (membership != nullptr && !membership->contains(fv)) {
                    ok = false;
                    break;
                }
                if (require_distinct_values && use_count[fv] != 0) {
                    ok = false;
                    break;
                }
                form_values[fi] = fv;
                if (require_distinct_values) {
                    ++use_count[fv];
                    marked[depth].push_back(fv);
                }
            }
            if (ok) self(self, depth + 1);
            if (require_distinct_values) unmark_depth(depth);
        }
    };
    recurse(recurse, 0);
}

}  // namespace detail

struct LambdaTildeStats {
    std::uint64_t count = 0;               // tuples with all form values in A
    std::uint64_t total_tuples = 0;        // N^d
    std::uint64_t nondegenerate_count = 0; // size of the index set H
    bool parameter_relation = false;       // the triple itself satisfies a short relation
};

/**
 * Exact nondegenerate count at level i: the sum over the index set H of the
 * product of t-values at the 2d + 1 form evaluations.  H consists of the
 * tuples whose form values are pairwise distinct, which is the restriction
 * that keeps every surviving monomial at full length 2d + 1; tuples carrying a
 * short relation between two forms are exactly the ones dropped.  Triples
 * (a, b, c) satisfying a parameter-only relation are flagged in the stats but
 * do not empty the sum.
 */
inline LambdaTildeStats lambda_tilde_stats(const SubsetOfZn& set, std::uint32_t level,
                                           std::uint32_t a, std::uint32_t b, std::uint32_t c,
                                           std::uint64_t tuple_budget = kDefaultTupleBudget,
                                           std::uint32_t level_cap = kDefaultLevelCap) {
    if (a == b || b == c || a == c) throw InvalidConfig("parameters must be distinct");
    const auto& g = set.group();
    const std::uint32_t d = lambda_free_dimension(level);
    double total = 1.0;
    for (std::uint32_t i = 0; i < d; ++i) {
        total *= g.modulus();
        if (total > static_cast<double>(tuple_budget))
            throw TooLarge("N^d exceeds the enumeration budget");
    }

    LinearFormSet forms = psi_forms(level, level_cap);
    LambdaTildeStats stats;
    stats.total_tuples = 1;
    for (std::uint32_t i = 0; i < d; ++i) stats.total_tuples *= g.modulus();
    stats.parameter_relation = has_parameter_relation(g, a, b, c);

    detail::scan_form_tuples(g, forms, a, b, c, /*require_distinct_values=*/true, nullptr,
                             [&](const std::vector<std::uint32_t>&, const std::vector<std::uint32_t>& values) {
                                 ++stats.nondegenerate_count;
                                 bool all_in = true;
                                 for (std::uint32_t fv : values)
                                     if (!set.contains(fv)) { all_in = false; break; }
                                 if (all_in) ++stats.count;
                             });
    return stats;
}

inline std::uint64_t lambda_tilde(const SubsetOfZn& set, std::uint32_t level, std::uint32_t a,
                                  std::uint32_t b, std::uint32_t c,
                                  std::uint64_t tuple_budget = kDefaultTupleBudget,
                                  std::uint32_t level_cap = kDefaultLevelCap) {
    return lambda_tilde_stats(set, level, a, b, c, tuple_budget, level_cap).count;
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_u32(std::ostream& os, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        int ch = is.get();
        if (ch == std::char_traits<char>::eof()) throw InvalidConfig("truncated table dump");
        v |= static_cast<std::uint32_t>(ch & 0xff) << (8 * i);
    }
    return v;
}

}  // namespace detail

/// Binary dump: magic "FLT1", then little-endian N, level, mode byte, and the
/// row-major entries (positivity: one byte each; exact: u32 byte length plus
/// little-endian magnitude bytes).
inline void write_lambda_table(const LambdaTable& table, std::ostream& os) {
    os.write("FLT1", 4);
    detail::write_u32(os, table.modulus);
    detail::write_u32(os, table.level);
    os.put(static_cast<char>(table.mode));
    const std::size_t entries = static_cast<std::size_t>(table.modulus) * table.modulus;
    if (table.mode == LambdaMode::positivity) {
        for (std::size_t i = 0; i < entries; ++i) os.put(static_cast<char>(table.bits[i]));
    } else {
        std::vector<std::uint8_t> bytes;
        for (std::size_t i = 0; i < entries; ++i) {
            bytes.clear();
            boost::multiprecision::export_bits(table.counts[i], std::back_inserter(bytes), 8,
                                               /*msv_first=*/false);
            if (table.counts[i] == 0) bytes.clear();
            detail::write_u32(os, static_cast<std::uint32_t>(bytes.size()));
            os.write(reinterpret_cast<const char*>(bytes.data()),
                     static_cast<std::streamsize>(bytes.size()));
        }
    }
}

inline LambdaTable read_lambda_table(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (is.gcount() != 4 || std::string_view(magic, 4) != "FLT1")
        throw InvalidConfig("bad table magic");
    LambdaTable table;
    table.modulus = detail::read_u32(is);
    table.level = detail::read_u32(is);
    int mode = is.get();
    if (mode != 0 && mode != 1) throw InvalidConfig("bad table mode");
    table.mode = static_cast<LambdaMode>(mode);
    const std::size_t entries = static_cast<std::size_t>(table.modulus) * table.modulus;
    if (table.mode == LambdaMode::positivity) {
        table.bits.resize(entries);
        for (std::size_t i = 0; i < entries; ++i) {
            int ch = is.get();
            if (ch == std::char_traits<char>::eof()) throw InvalidConfig("truncated table dump");
            table.bits[i] = static_cast<std::uint8_t>(ch);
        }
    } else {
        table.counts.resize(entries);
        for (std::size_t i = 0; i < entries; ++i) {
            std::uint32_t len = detail::read_u32(is);
            std::vector<std::uint8_t> bytes(len);
            is.read(reinterpret_cast<char*>(bytes.data()), len);
            if (static_cast<std::uint32_t>(is.gcount()) != len)
                throw InvalidConfig("truncated table dump");
            BigInt value = 0;
            if (!bytes.empty())
                boost::multiprecision::import_bits(value, bytes.begin(), bytes.end(), 8,
                                                   /*msv_first=*/false);
            table.counts[i] = std::move(value);
        }
    }
    return table;
}

/// Small-N text export, one entry per line.
inline void write_lambda_table_csv(const LambdaTable& table, std::ostream& os) {
    os << "d_ab,d_ac,value\n";
    for (std::uint32_t u = 0; u < table.modulus; ++u)
        for (std::uint32_t v = 0; v < table.modulus; ++v) {
            os << u << ',' << v << ',';
            if (table.mode == LambdaMode::positivity)
                os << static_cast<int>(table.bits[table.index(u, v)]);
            else
                os << table.counts[table.index(u, v)];
            os << '\n';
        }
}

}  // namespace freiman
