#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace pdc {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. All entries are required to be finite;
/// construction and element writes are checked lazily via validate().
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, Vec entries);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(const Vec& d);
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    const Vec& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
Vec operator*(const DenseMatrix& a, const Vec& v);

DenseMatrix transpose(const DenseMatrix& a);

// Vector helpers shared across modules.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm_inf(const Vec& v);
Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scale(double s, const Vec& v);

/// Full eigendecomposition of a symmetric matrix via cyclic Jacobi rotations.
/// Eigenvalues ascending; vectors.column(j) pairs with values[j].
struct SymEig {
    Vec values;
    DenseMatrix vectors;
};
SymEig sym_eig(const DenseMatrix& s);

/// Largest singular value. Computed from the eigenvalues of M^T M (or M M^T,
/// whichever is smaller).
double spectral_norm(const DenseMatrix& m);

double smallest_singular_value(const DenseMatrix& m);

/// (lambda_min, lambda_max) of (S + S^T)/2. S must be square and symmetric
/// within 1e-12; rounding asymmetry below that is silently symmetrized.
std::pair<double, double> sym_eig_extremes(const DenseMatrix& s);

/// Symmetric square root of a PSD matrix. Eigenvalues in [-1e-12, 0) are
/// clamped to zero; below that the matrix is rejected.
DenseMatrix sym_sqrt(const DenseMatrix& s);

/// Matrix measure mu_2(A) = lambda_max((A + A^T)/2).
double matrix_measure_2(const DenseMatrix& a);

/// Solves A x = b by Gaussian elimination with partial pivoting.
Vec solve_linear(DenseMatrix a, Vec b);

DenseMatrix inverse(const DenseMatrix& a);

}  // namespace pdc
