#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spl/common.hpp"
#include "spl/rng.hpp"

namespace spl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A = left * diag(singulars) * right^T with orthogonal factors and
/// singulars sorted non-increasing.
struct SvdResult {
    Matrix left;
    Vector singulars;
    Matrix right;
};

namespace detail {

// Deterministic sign convention: the first entry of each left singular
// vector whose magnitude exceeds a small threshold is made non-negative.
inline void fix_svd_signs(Matrix& u, Matrix& v) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        double pivot = 0.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            if (std::abs(u(i, j)) > 1e-12) {
                pivot = u(i, j);
                break;
            }
        }
        if (pivot < 0.0) {
            u.col(j) = -u.col(j);
            if (j < v.cols()) v.col(j) = -v.col(j);
        }
    }
}

}  // namespace detail

inline SvdResult svd(const Matrix& a) {
    if (a.rows() != a.cols())
        throw DimensionError("svd: input must be square, got " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()));
    if (!a.allFinite()) throw ArgumentError("svd: input has non-finite entries");
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (dec.info() != Eigen::Success)
        throw NumericalError("svd: decomposition did not converge");
    SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    detail::fix_svd_signs(out.left, out.right);
    return out;
}

enum class SchattenOrder { S1, S2, SInf };

/// Schatten norm: the l_p norm of the singular values. S2 is computed
/// entrywise (exact, no SVD error); S1 and SInf go through the SVD.
inline double schatten_norm(const Matrix& a, SchattenOrder p) {
    if (a.rows() != a.cols()) throw DimensionError("schatten_norm: input must be square");
    switch (p) {
        case SchattenOrder::S2:
            return a.norm();
        case SchattenOrder::S1:
        case SchattenOrder::SInf: {
            Eigen::BDCSVD<Matrix> dec(a);
            if (dec.info() != Eigen::Success)
                throw NumericalError("schatten_norm: SVD did not converge");
            const Vector& s = dec.singularValues();
            return p == SchattenOrder::S1 ? s.sum() : (s.size() > 0 ? s(0) : 0.0);
        }
    }
    throw ArgumentError("schatten_norm: unsupported order");
}

/// M x M matrix of iid N(0, sigma^2) entries, filled row-major so the draw
/// order is part of the reproducibility contract.
inline Matrix sample_gaussian(int m, double sigma, RngStream& stream) {
    if (m < 1) throw ArgumentError("sample_gaussian: m must be >= 1");
    if (sigma < 0.0) throw ArgumentError("sample_gaussian: sigma must be >= 0");
    Matrix e(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) e(i, j) = sigma * stream.normal();
    return e;
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// diagonal of R sign-corrected.
inline Matrix haar_orthogonal(int m, RngStream& stream) {
    if (m < 1) throw ArgumentError("haar_orthogonal: m must be >= 1");
    Matrix g = sample_gaussian(m, 1.0, stream);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (int j = 0; j < m; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

/// All squared singular values of a, sorted non-increasing, via the
/// symmetric eigenproblem of a*a^T.
inline Vector singular_values_squared(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("singular_values_squared: input must be square");
    Matrix gram = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("singular_values_squared: eigensolver did not converge");
    Vector ev = es.eigenvalues();  // ascending
    Vector out(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        out(i) = std::max(0.0, ev(ev.size() - 1 - i));
    return out;
}

namespace detail {

// Lanczos on a*a^T (applied implicitly) for the sum of the top-r squared
// singular values. Full reorthogonalization; residual-based stopping.
// Returns false if the run did not certify convergence.
inline bool lanczos_top_energy(const Matrix& a, int r, double& energy) {
    const int m = static_cast<int>(a.rows());
    const int maxit = std::min(m, 10 * r + 90);
    if (maxit < r) return false;

    Matrix basis(m, maxit);
    Vector alpha(maxit), beta(maxit);

    // Deterministic start vector, decorrelated from any fixed data axis.
    RngStream s0(0x51AC2E5Bu, static_cast<std::uint64_t>(m));
    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = s0.normal();
    v.normalize();
    basis.col(0) = v;

    int k = 0;
    for (; k < maxit; ++k) {
        Vector w = a * (a.transpose() * basis.col(k));
        alpha(k) = basis.col(k).dot(w);
        w -= alpha(k) * basis.col(k);
        if (k > 0) w -= beta(k - 1) * basis.col(k - 1);
        // Two passes of Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            Vector proj = basis.leftCols(k + 1).transpose() * w;
            w -= basis.leftCols(k + 1) * proj;
        }
        const double b = w.norm();

        if (k + 1 >= r && (k % 4 == 3 || b < 1e-14 || k + 1 == maxit)) {
            Matrix t = Matrix::Zero(k + 1, k + 1);
            for (int i = 0; i <= k; ++i) {
                t(i, i) = alpha(i);
                if (i < k) t(i, i + 1) = t(i + 1, i) = beta(i);
            }
            Eigen::SelfAdjointEigenSolver<Matrix> es(t);
            if (es.info() != Eigen::Success) return false;
            const Vector& theta = es.eigenvalues();
            const Matrix& s = es.eigenvectors();
            const double scale = std::max(theta(k), 1e-300);
            bool converged = true;
            double sum = 0.0;
            for (int i = 0; i < r; ++i) {
                const int idx = k - i;
                sum += std::max(0.0, theta(idx));
                const double resid = std::abs(b * s(k, idx));
                if (resid > 1e-10 * scale) converged = false;
            }
            if (converged || b < 1e-14) {
                if (b < 1e-14 && !converged) return false;  // invariant subspace hit early
                energy = sum;
                return true;
            }
        }
        if (k + 1 < maxit) {
            if (b < 1e-14) return false;
            beta(k) = b;
            basis.col(k + 1) = w / b;
        }
    }
    return false;
}

}  // namespace detail

/// Sum of the top-r squared singular values of a. Uses Lanczos when r is
/// small relative to M, falling back to the dense symmetric eigensolver.
inline double top_r_energy(const Matrix& a, int r) {
    if (a.rows() != a.cols()) throw DimensionError("top_r_energy: input must be square");
    const int m = static_cast<int>(a.rows());
    if (r < 1 || r > m) throw ArgumentError("top_r_energy: need 1 <= r <= M");
    if (m > 80 && 12 * r < m) {
        double energy = 0.0;
        if (detail::lanczos_top_energy(a, r, energy)) return energy;
    }
    Vector sv2 = singular_values_squared(a);
    return sv2.head(r).sum();
}

/// CSV matrix format: one row per line, comma-separated decimal floats,
/// no header. Readers reject ragged rows.
inline void write_matrix_csv(const Matrix& a, std::ostream& os) {
    os.precision(17);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j > 0) os << ',';
            os << a(i, j);
        }
        os << '\n';
    }
}

inline void write_matrix_csv(const Matrix& a, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_matrix_csv(a, f);
    if (!f) throw IoError("write failed: " + path);
}

inline Matrix read_matrix_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double value = std::stod(cell, &pos);
            row.push_back(value);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("ragged CSV row: expected " + std::to_string(rows.front().size()) +
                          " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Matrix(0, 0);
    Matrix a(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return a;
}

inline Matrix read_matrix_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    return read_matrix_csv(f);
}

}  // namespace spl
