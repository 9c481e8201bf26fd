#include "membrane/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "membrane/error.hpp"

namespace membrane {

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(n + 1, 0);
    m.col_.reserve(triplets.size() / 2);
    m.values_.reserve(triplets.size() / 2);
    for (std::size_t k = 0; k < triplets.size();) {
        const Triplet& t = triplets[k];
        if (t.row >= n || t.col >= n) throw Error("assembly", "triplet index out of range");
        double sum = 0.0;
        std::size_t j = k;
        for (; j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col; ++j) {
            sum += triplets[j].value;
        }
        m.col_.push_back(t.col);
        m.values_.push_back(sum);
        ++m.row_ptr_[t.row + 1];
        k = j;
    }
    for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
}

CsrMatrix CsrMatrix::from_pattern(std::vector<std::size_t> row_ptr,
                                  std::vector<std::size_t> col) {
    if (row_ptr.empty() || row_ptr.back() != col.size()) {
        throw Error("assembly", "inconsistent sparsity pattern");
    }
    CsrMatrix m;
    m.n_ = row_ptr.size() - 1;
    m.row_ptr_ = std::move(row_ptr);
    m.col_ = std::move(col);
    m.values_.assign(m.col_.size(), 0.0);
    return m;
}

std::size_t CsrMatrix::find(std::size_t i, std::size_t j) const {
    const auto begin = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto end = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return npos;
    return static_cast<std::size_t>(it - col_.begin());
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    const std::size_t k = find(i, j);
    return k == npos ? 0.0 : values_[k];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        double sum = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) sum += values_[k] * x[col_[k]];
        y[i] = sum;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
    return d;
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double CsrMatrix::asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            worst = std::max(worst, std::abs(values_[k] - at(col_[k], i)));
        }
    }
    return worst;
}

void write_matrix_market(const CsrMatrix& matrix, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("assembly", "cannot open " + path + " for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << matrix.size() << ' ' << matrix.size() << ' ' << matrix.nonzeros() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t k = matrix.row_ptr()[i]; k < matrix.row_ptr()[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", matrix.values()[k]);
            out << i + 1 << ' ' << matrix.col_index()[k] + 1 << ' ' << buf << '\n';
        }
    }
    if (!out) throw Error("assembly", "write failed for " + path);
}

}  // namespace membrane
