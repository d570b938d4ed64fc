#include "cutfrac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "cutfrac/errors.hpp"

namespace cutfrac {

void TripletBuffer::add(std::size_t row, std::size_t col, double value) {
    if (row >= n_ || col >= n_)
        throw ParamError("TripletBuffer::add: index out of range (" + std::to_string(row) +
                         "," + std::to_string(col) + ") for dim " + std::to_string(n_));
    entries_.push_back({row, col, value});
}

SparseMatrix SparseMatrix::compress(const TripletBuffer& t) {
    SparseMatrix m;
    m.n_ = t.dim();
    std::vector<std::size_t> count(m.n_ + 1, 0);
    for (const auto& e : t.entries()) ++count[e.row + 1];
    for (std::size_t i = 0; i < m.n_; ++i) count[i + 1] += count[i];
    std::vector<std::size_t> cols(t.entries().size());
    std::vector<double> vals(t.entries().size());
    {
        std::vector<std::size_t> next(count.begin(), count.end() - 1);
        for (const auto& e : t.entries()) {
            const std::size_t k = next[e.row]++;
            cols[k] = e.col;
            vals[k] = e.value;
        }
    }
    m.row_ptr_.assign(m.n_ + 1, 0);
    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < m.n_; ++r) {
        const std::size_t lo = count[r], hi = count[r + 1];
        order.resize(hi - lo);
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = lo + k;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return cols[a] < cols[b]; });
        const std::size_t row_begin = m.cols_.size();
        for (std::size_t k = 0; k < order.size(); ++k) {
            const std::size_t src = order[k];
            if (m.cols_.size() > row_begin && m.cols_.back() == cols[src]) {
                m.values_.back() += vals[src]; // merge duplicate
            } else {
                m.cols_.push_back(cols[src]);
                m.values_.push_back(vals[src]);
            }
        }
        m.row_ptr_[r + 1] = m.cols_.size();
    }
    return m;
}

std::vector<double> SparseMatrix::matvec(std::span<const double> x) const {
    if (x.size() != n_) throw ParamError("matvec: dimension mismatch");
    std::vector<double> y(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            s += values_[k] * x[cols_[k]];
        y[r] = s;
    }
    return y;
}

double SparseMatrix::coeff(std::size_t row, std::size_t col) const {
    const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::span<const std::size_t> SparseMatrix::row_cols(std::size_t row) const {
    return {cols_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

std::span<const double> SparseMatrix::row_values(std::size_t row) const {
    return {values_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

void SparseMatrix::write_matrix_market(std::ostream& os) const {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << n_ << " " << n_ << " " << nnz() << "\n";
    os.precision(17);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            os << (r + 1) << " " << (cols_[k] + 1) << " " << values_[k] << "\n";
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace {

std::vector<double> solve_dense(const SparseMatrix& A, std::span<const double> b) {
    const std::size_t n = A.dim();
    std::vector<double> M(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto cols = A.row_cols(r);
        const auto vals = A.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) M[r * n + cols[k]] += vals[k];
    }
    std::vector<double> x(b.begin(), b.end());
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(M[piv[k] * n + k]);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double v = std::abs(M[piv[r] * n + k]);
            if (v > best) {
                best = v;
                p = r;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best))
            throw SolverError("solve_lu: singular to working precision at pivot " +
                              std::to_string(k));
        std::swap(piv[k], piv[p]);
        const double* rowk = &M[piv[k] * n];
        const double d = rowk[k];
        for (std::size_t r = k + 1; r < n; ++r) {
            double* rowr = &M[piv[r] * n];
            const double f = rowr[k] / d;
            if (f == 0.0) continue;
            rowr[k] = f;
            for (std::size_t c = k + 1; c < n; ++c) rowr[c] -= f * rowk[c];
        }
    }
    // Forward substitution (L has unit diagonal, stored below it).
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        double s = x[piv[r]];
        const double* row = &M[piv[r] * n];
        for (std::size_t c = 0; c < r; ++c) s -= row[c] * y[c];
        y[r] = s;
    }
    // Back substitution.
    std::vector<double> out(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = y[ri];
        const double* row = &M[piv[ri] * n];
        for (std::size_t c = ri + 1; c < n; ++c) s -= row[c] * out[c];
        out[ri] = s / row[ri];
    }
    return out;
}

struct SparseCol {
    std::vector<std::size_t> rows;
    std::vector<double> vals;
};

// Left-looking sparse LU with partial pivoting (Gilbert-Peierls).
std::vector<double> solve_sparse(const SparseMatrix& A, std::span<const double> b) {
    const std::size_t n = A.dim();
    const std::size_t NONE = static_cast<std::size_t>(-1);

    // Column-major copy of A.
    std::vector<SparseCol> acols(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto cols = A.row_cols(r);
        const auto vals = A.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            acols[cols[k]].rows.push_back(r);
            acols[cols[k]].vals.push_back(vals[k]);
        }
    }

    std::vector<SparseCol> L(n), U(n);
    std::vector<std::size_t> pinv(n, NONE); // row -> pivot position
    std::vector<std::size_t> p(n, NONE);    // pivot position -> row
    std::vector<double> x(n, 0.0);
    std::vector<char> mark(n, 0);
    std::vector<std::size_t> pattern;
    struct Frame {
        std::size_t node;
        std::size_t child;
    };
    std::vector<Frame> stack;

    for (std::size_t j = 0; j < n; ++j) {
        // Symbolic: rows reachable from the pattern of A(:,j) through finished columns.
        // DFS post-order; reversing it gives a valid elimination order.
        pattern.clear();
        for (std::size_t r : acols[j].rows) {
            if (mark[r]) continue;
            mark[r] = 1;
            stack.push_back({r, 0});
            while (!stack.empty()) {
                Frame& top = stack.back();
                const std::size_t i = top.node;
                bool descended = false;
                if (pinv[i] != NONE) {
                    const auto& lc = L[pinv[i]];
                    while (top.child < lc.rows.size()) {
                        const std::size_t child = lc.rows[top.child++];
                        if (!mark[child]) {
                            mark[child] = 1;
                            stack.push_back({child, 0});
                            descended = true;
                            break;
                        }
                    }
                }
                if (!descended) {
                    stack.pop_back();
                    pattern.push_back(i);
                }
            }
        }
        // Numeric: scatter A(:,j), then eliminate in reverse pattern order
        // (parents before dependents since pattern is post-order).
        for (std::size_t k = 0; k < acols[j].rows.size(); ++k)
            x[acols[j].rows[k]] = acols[j].vals[k];
        for (std::size_t t = pattern.size(); t-- > 0;) {
            const std::size_t i = pattern[t];
            if (pinv[i] == NONE) continue;
            const double xi = x[i];
            if (xi == 0.0) continue;
            const auto& lc = L[pinv[i]];
            for (std::size_t k = 0; k < lc.rows.size(); ++k) x[lc.rows[k]] -= lc.vals[k] * xi;
        }
        // Pivot: largest magnitude among not-yet-pivoted rows in the pattern.
        std::size_t piv_row = NONE;
        double best = 0.0;
        for (std::size_t i : pattern) {
            if (pinv[i] != NONE) continue;
            const double v = std::abs(x[i]);
            if (v > best) {
                best = v;
                piv_row = i;
            }
        }
        if (piv_row == NONE || !(best > 0.0) || !std::isfinite(best))
            throw SolverError("solve_lu: singular to working precision at pivot " +
                              std::to_string(j));
        const double d = x[piv_row];
        pinv[piv_row] = j;
        p[j] = piv_row;
        for (std::size_t i : pattern) {
            if (pinv[i] != NONE && pinv[i] <= j) {
                if (i == piv_row) continue;
                if (x[i] != 0.0) {
                    U[j].rows.push_back(pinv[i]);
                    U[j].vals.push_back(x[i]);
                }
            } else if (x[i] != 0.0) {
                L[j].rows.push_back(i);
                L[j].vals.push_back(x[i] / d);
            }
            x[i] = 0.0;
            mark[i] = 0;
        }
        x[piv_row] = 0.0;
        mark[piv_row] = 0;
        U[j].rows.push_back(j);
        U[j].vals.push_back(d);
    }

    // Solve L y = P b. L is unit-diagonal; its entries carry original row
    // indices, which map to later pivot positions through pinv.
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = b[p[j]];
    for (std::size_t j = 0; j < n; ++j) {
        const double yj = y[j];
        if (yj == 0.0) continue;
        const auto& lc = L[j];
        for (std::size_t k = 0; k < lc.rows.size(); ++k)
            y[pinv[lc.rows[k]]] -= lc.vals[k] * yj;
    }

    // Solve U z = y, columns in reverse order.
    std::vector<double> z(n, 0.0);
    for (std::size_t j = n; j-- > 0;) {
        double diag = 0.0;
        for (std::size_t k = 0; k < U[j].rows.size(); ++k)
            if (U[j].rows[k] == j) diag = U[j].vals[k];
        const double zj = y[j] / diag;
        z[j] = zj;
        for (std::size_t k = 0; k < U[j].rows.size(); ++k) {
            const std::size_t i = U[j].rows[k];
            if (i != j) y[i] -= U[j].vals[k] * zj;
        }
    }
    return z;
}

} // namespace

std::vector<double> solve_lu(const SparseMatrix& A, std::span<const double> b,
                             SolveMethod method) {
    if (b.size() != A.dim()) throw ParamError("solve_lu: dimension mismatch");
    if (A.dim() == 0) return {};
    const bool dense =
        method == SolveMethod::dense || (method == SolveMethod::automatic && A.dim() <= 2000);
    return dense ? solve_dense(A, b) : solve_sparse(A, b);
}

} // namespace cutfrac
