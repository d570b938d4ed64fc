#ifndef CUTFRAC_LINALG_HPP
#define CUTFRAC_LINALG_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace cutfrac {

/// Accumulation buffer for matrix entries; duplicates are summed on compression.
class TripletBuffer {
public:
    explicit TripletBuffer(std::size_t n) : n_(n) {}

    void add(std::size_t row, std::size_t col, double value);
    std::size_t dim() const { return n_; }

    struct Entry {
        std::size_t row, col;
        double value;
    };
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::size_t n_;
    std::vector<Entry> entries_;
};

/// Square sparse matrix in compressed row storage with sorted, merged columns.
class SparseMatrix {
public:
    static SparseMatrix compress(const TripletBuffer& t);

    std::size_t dim() const { return n_; }
    std::size_t nnz() const { return values_.size(); }

    std::vector<double> matvec(std::span<const double> x) const;

    /// Entry lookup (zero if absent); O(log row-length).
    double coeff(std::size_t row, std::size_t col) const;

    std::span<const std::size_t> row_cols(std::size_t row) const;
    std::span<const double> row_values(std::size_t row) const;

    /// MatrixMarket coordinate format, 1-based indices.
    void write_matrix_market(std::ostream& os) const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

enum class SolveMethod { automatic, dense, sparse };

/// Direct LU solve with partial pivoting. Dense path for small systems,
/// left-looking sparse LU otherwise. Throws SolverError on singular pivots.
std::vector<double> solve_lu(const SparseMatrix& A, std::span<const double> b,
                             SolveMethod method = SolveMethod::automatic);

double max_abs(std::span<const double> v);

} // namespace cutfrac

#endif
