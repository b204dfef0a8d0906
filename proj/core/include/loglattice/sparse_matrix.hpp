#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "loglattice/rational.hpp"

namespace loglattice {

/// Sparse rows × cols matrix over ℚ. Zero entries are never stored.
class SparseMatrixQ {
public:
    using Key = std::pair<std::size_t, std::size_t>;

    SparseMatrixQ() = default;
    SparseMatrixQ(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    static SparseMatrixQ identity(std::size_t n);
    static SparseMatrixQ from_dense(const std::vector<std::vector<Rational>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return entries_.size(); }
    const std::map<Key, Rational>& entries() const { return entries_; }

    Rational at(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, const Rational& v);
    /// entry(i,j) += v
    void add(std::size_t i, std::size_t j, const Rational& v);

    bool is_zero() const { return entries_.empty(); }

    SparseMatrixQ transposed() const;
    SparseMatrixQ operator*(const SparseMatrixQ& o) const;
    SparseMatrixQ operator-(const SparseMatrixQ& o) const;
    SparseMatrixQ scaled(const Rational& c) const;

    /// Keeps the listed rows/columns, in the given order.
    SparseMatrixQ select_rows(const std::vector<std::size_t>& keep) const;
    SparseMatrixQ select_cols(const std::vector<std::size_t>& keep) const;
    /// [this | o]
    SparseMatrixQ hconcat(const SparseMatrixQ& o) const;
    /// [this ; o]
    SparseMatrixQ vconcat(const SparseMatrixQ& o) const;

    std::vector<std::vector<Rational>> to_dense() const;

    bool operator==(const SparseMatrixQ& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::map<Key, Rational> entries_;
};

/// Exact rank. The matrix is split into connected blocks of its row/column
/// incidence graph and each block is eliminated fraction-free.
std::size_t rank_q(const SparseMatrixQ& m);

/// Dense Bareiss elimination; used for small blocks and as an independent check.
std::size_t bareiss_rank(std::vector<std::vector<Integer>> a);

/// Largest connected block seen by the most recent rank_q call on this thread.
std::size_t last_rank_block_size();

/// Caps the size (rows + cols) of any single block handled by rank_q.
/// 0 disables the cap. Exceeding it throws DimensionCap.
void set_block_dimension_cap(std::size_t cap);
std::size_t block_dimension_cap();

}  // namespace loglattice
