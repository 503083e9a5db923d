#pragma once

#include <cstdint>
#include <vector>

#include "freiman/errors.hpp"
#include "freiman/zn.hpp"

namespace freiman {

/**
 * Incremental Gaussian elimination over F_p.  Rows are inserted one at a time
 * and reduced against the pivots found so far, so rank grows monotonically and
 * the memory footprint is one dense row per pivot.  Pivot columns are chosen
 * as the leftmost nonzero entry of each reduced row, which makes ranks and
 * kernels deterministic for a fixed insertion order.
 */
class RowReducer {
  public:
    RowReducer(std::uint32_t prime_modulus, std::size_t cols)
        : group_(prime_modulus), cols_(cols), pivot_of_col_(cols, kNoPivot) {
        group_.require_prime();
    }

    std::size_t cols() const { return cols_; }
    std::uint32_t rank() const { return static_cast<std::uint32_t>(rows_.size()); }

    /// Reduces and inserts; returns true when the row was independent.
    bool insert(std::vector<std::uint32_t> row) {
        if (row.size() != cols_) throw InvalidConfig("row width mismatch");
        for (auto& v : row) v %= group_.modulus();
        reduce_against_pivots(row);
        std::size_t lead = leading_column(row);
        if (lead == cols_) return false;
        // normalize so the pivot entry is 1
        std::uint32_t scale = group_.inv(row[lead]);
        for (auto& v : row) v = group_.mul(v, scale);
        pivot_of_col_[lead] = rows_.size();
        pivot_cols_.push_back(lead);
        rows_.push_back(std::move(row));
        return true;
    }

    /// Full reduced echelon form: clears pivot columns above their pivot rows.
    void to_rref() {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            std::size_t pc = pivot_cols_[r];
            for (std::size_t other = 0; other < rows_.size(); ++other) {
                if (other == r) continue;
                std::uint32_t factor = rows_[other][pc];
                if (factor == 0) continue;
                for (std::size_t j = 0; j < cols_; ++j)
                    rows_[other][j] =
                        group_.sub(rows_[other][j], group_.mul(factor, rows_[r][j]));
            }
        }
    }

    /**
     * Kernel basis after to_rref(), one vector per free column in ascending
     * column order: the free column gets 1 and each pivot column the negated
     * RREF entry.  The basis is in the standard pivot-normalized form.
     */
    std::vector<std::vector<std::uint32_t>> kernel_basis() {
        to_rref();
        std::vector<std::vector<std::uint32_t>> basis;
        for (std::size_t free_col = 0; free_col < cols_; ++free_col) {
            if (pivot_of_col_[free_col] != kNoPivot) continue;
            std::vector<std::uint32_t> v(cols_, 0);
            v[free_col] = 1;
            for (std::size_t r = 0; r < rows_.size(); ++r)
                v[pivot_cols_[r]] = group_.neg(rows_[r][free_col]);
            basis.push_back(std::move(v));
        }
        return basis;
    }

    /// True when the vector lies in the row space accumulated so far.
    bool in_row_space(std::vector<std::uint32_t> row) const {
        for (auto& v : row) v %= group_.modulus();
        reduce_against_pivots(row);
        return leading_column(row) == cols_;
    }

  private:
    static constexpr std::size_t kNoPivot = static_cast<std::size_t>(-1);

    void reduce_against_pivots(std::vector<std::uint32_t>& row) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            std::uint32_t factor = row[pivot_cols_[r]];
            if (factor == 0) continue;
            const auto& pivot = rows_[r];
            for (std::size_t j = 0; j < cols_; ++j)
                row[j] = group_.sub(row[j], group_.mul(factor, pivot[j]));
        }
    }

    std::size_t leading_column(const std::vector<std::uint32_t>& row) const {
        for (std::size_t j = 0; j < cols_; ++j)
            if (row[j] != 0) return j;
        return cols_;
    }

    CyclicGroup group_;
    std::size_t cols_;
    std::vector<std::vector<std::uint32_t>> rows_;
    std::vector<std::size_t> pivot_cols_;
    std::vector<std::size_t> pivot_of_col_;
};

struct SolvedSystem {
    std::uint32_t rank = 0;
    std::vector<std::vector<std::uint32_t>> kernel;  // basis of the null space
};

inline SolvedSystem solve_mod_system(std::uint32_t prime_modulus, std::size_t cols,
                                     const std::vector<std::vector<std::uint32_t>>& rows) {
    RowReducer reducer(prime_modulus, cols);
    for (const auto& r : rows) reducer.insert(r);
    SolvedSystem out;
    out.rank = reducer.rank();
    out.kernel = reducer.kernel_basis();
    return out;
}

}  // namespace freiman
