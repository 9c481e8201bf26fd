#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace membrane {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Square matrix in compressed sparse row form with sorted column indices.
class CsrMatrix {
public:
    CsrMatrix() = default;

    /// Sorts by (row, col) and sums duplicates in input order, so the result
    /// is bit-reproducible for a given triplet sequence. Explicit zeros stay
    /// in the pattern.
    static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

    /// Zero-valued matrix with the given pattern (columns sorted per row).
    static CsrMatrix from_pattern(std::vector<std::size_t> row_ptr, std::vector<std::size_t> col);

    std::size_t size() const noexcept { return n_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::size_t>& col_index() const noexcept { return col_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

    /// Entry (i, j), zero if outside the pattern.
    double at(std::size_t i, std::size_t j) const;
    /// Position of (i, j) in values(), or npos.
    std::size_t find(std::size_t i, std::size_t j) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    std::vector<double> diagonal() const;
    double max_abs() const;
    /// max |a_ij - a_ji| over the pattern.
    double asymmetry() const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_;
    std::vector<double> values_;
};

/// MatrixMarket "coordinate real general", 1-based indices.
void write_matrix_market(const CsrMatrix& matrix, const std::string& path);

}  // namespace membrane
