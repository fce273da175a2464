#include "pdc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pdc/errors.hpp"

namespace pdc {

namespace {

void check_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) throw DimensionError("matrix entry is not finite");
    }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("matrix shapes do not match");
}

void require_square(const DenseMatrix& a, const char* what) {
    if (a.empty()) throw DimensionError(std::string(what) + ": empty matrix");
    if (a.rows() != a.cols()) throw DimensionError(std::string(what) + ": matrix not square");
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (!std::isfinite(fill)) throw DimensionError("matrix entry is not finite");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vec entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw DimensionError("entry count does not match rows*cols");
    check_finite(data_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(const Vec& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    check_finite(m.data());
    return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    DenseMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("ragged row in matrix literal");
        std::size_t j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    check_finite(m.data());
    return m;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b);
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b);
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("inner dimensions do not match");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    return c;
}

Vec operator*(const DenseMatrix& a, const Vec& v) {
    if (a.cols() != v.size()) throw DimensionError("matrix-vector dimensions do not match");
    Vec out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("vector dimensions do not match");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vec vec_add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("vector dimensions do not match");
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

Vec vec_sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("vector dimensions do not match");
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

Vec vec_scale(double s, const Vec& v) {
    Vec c(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) c[i] = s * v[i];
    return c;
}

SymEig sym_eig(const DenseMatrix& s) {
    require_square(s, "sym_eig");
    const std::size_t n = s.rows();

    // Work on the symmetrized copy; callers guarantee asymmetry is rounding only.
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));

    DenseMatrix v = DenseMatrix::identity(n);
    const double scale = std::max(max_abs(a), 1.0);

    // Cyclic Jacobi. 60 sweeps is far beyond what small dense matrices need;
    // convergence is quadratic once off-diagonal mass is small.
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += std::abs(a(i, j));
        if (off <= 1e-15 * scale * static_cast<double>(n)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    SymEig out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);

    // Sort ascending, permuting eigenvector columns alongside.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
    SymEig sorted;
    sorted.values.resize(n);
    sorted.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted.values[j] = out.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
    }
    return sorted;
}

double spectral_norm(const DenseMatrix& m) {
    if (m.empty()) throw DimensionError("spectral_norm: empty matrix");
    const DenseMatrix g = (m.rows() <= m.cols()) ? m * transpose(m) : transpose(m) * m;
    const auto eig = sym_eig(g);
    const double lmax = eig.values.back();
    return std::sqrt(std::max(lmax, 0.0));
}

double smallest_singular_value(const DenseMatrix& m) {
    if (m.empty()) throw DimensionError("smallest_singular_value: empty matrix");
    const DenseMatrix g = (m.rows() <= m.cols()) ? m * transpose(m) : transpose(m) * m;
    const auto eig = sym_eig(g);
    return std::sqrt(std::max(eig.values.front(), 0.0));
}

std::pair<double, double> sym_eig_extremes(const DenseMatrix& s) {
    require_square(s, "sym_eig_extremes");
    const double scale = std::max(max_abs(s), 1.0);
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = i + 1; j < s.cols(); ++j)
            if (std::abs(s(i, j) - s(j, i)) > 1e-12 * scale)
                throw DimensionError("sym_eig_extremes: matrix not symmetric within 1e-12");
    const auto eig = sym_eig(s);
    return {eig.values.front(), eig.values.back()};
}

DenseMatrix sym_sqrt(const DenseMatrix& s) {
    require_square(s, "sym_sqrt");
    const auto eig = sym_eig(s);
    const std::size_t n = s.rows();
    if (eig.values.front() < -1e-12)
        throw NotPositiveSemidefiniteError("sym_sqrt: matrix not positive semidefinite");
    DenseMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double sq = std::sqrt(std::max(eig.values[k], 0.0));
                sum += eig.vectors(i, k) * sq * eig.vectors(j, k);
            }
            r(i, j) = sum;
        }
    }
    // Remove rounding asymmetry from the triple product.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (r(i, j) + r(j, i));
            r(i, j) = avg;
            r(j, i) = avg;
        }
    return r;
}

double matrix_measure_2(const DenseMatrix& a) {
    require_square(a, "matrix_measure_2");
    const std::size_t n = a.rows();
    DenseMatrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));
    return sym_eig(sym).values.back();
}

Vec solve_linear(DenseMatrix a, Vec b) {
    require_square(a, "solve_linear");
    const std::size_t n = a.rows();
    if (b.size() != n) throw DimensionError("solve_linear: rhs dimension mismatch");

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300)
            throw RankError("solve_linear: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[col], b[piv]);
        }
        const double d = a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

DenseMatrix inverse(const DenseMatrix& a) {
    require_square(a, "inverse");
    const std::size_t n = a.rows();
    DenseMatrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec col = solve_linear(a, std::move(e));
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

}  // namespace pdc
