#pragma once

#include <cmath>
#include <string>

#include "spl/common.hpp"
#include "spl/matrix.hpp"
#include "spl/spectrum.hpp"

namespace spl {

/// Rank-r orthogonal projector, stored as an M x r orthonormal basis B.
/// The induced projection matrix is P = B B^T; it is never materialized on
/// the hot paths (energies cost M^2 r through the basis).
struct RankRProjector {
    Matrix basis;        // M x r, orthonormal columns
    bool unique = true;  // argmax uniqueness flag, set by oracle_projector

    int m() const { return static_cast<int>(basis.rows()); }
    int r() const { return static_cast<int>(basis.cols()); }

    Matrix dense() const { return basis * basis.transpose(); }
};

enum class ProjectorMetric { S2, SInf };

inline double projector_distance(const RankRProjector& p, const RankRProjector& q,
                                 ProjectorMetric metric) {
    if (p.m() != q.m() || p.r() != q.r())
        throw DimensionError("projector_distance: mismatched shapes");
    if (metric == ProjectorMetric::S2) {
        // ||P - Q||_{S2}^2 = 2r - 2 ||P^T Q||_{S2}^2 through the bases.
        const double cross = (p.basis.transpose() * q.basis).squaredNorm();
        return std::sqrt(std::max(0.0, 2.0 * (p.r() - cross)));
    }
    Matrix diff = p.dense() - q.dense();
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("projector_distance: eigensolver did not converge");
    const Vector& ev = es.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// The oracle projector pi_r: span of C's top-r left singular vectors under
/// the deterministic SVD sign convention. The argmax is unique iff
/// lambda_r > lambda_{r+1}; under ties a fixed representative is returned
/// with unique = false.
inline RankRProjector oracle_projector(const ModelInstance& model) {
    const int m = model.spec.m;
    const int r = model.spec.r;
    RankRProjector out;
    out.basis = model.svd_of_c.left.leftCols(r);
    out.unique = r == m || model.svd_of_c.singulars(r - 1) > model.svd_of_c.singulars(r);
    return out;
}

/// The empirical projector pi_hat_r: span of X's top-r left singular
/// vectors. Almost surely unique for Gaussian observations.
inline RankRProjector empirical_projector(const Matrix& x, int r) {
    if (x.rows() != x.cols()) throw DimensionError("empirical_projector: input must be square");
    if (r < 1 || r > x.rows()) throw ArgumentError("empirical_projector: need 1 <= r <= M");
    Eigen::BDCSVD<Matrix> dec(x, Eigen::ComputeThinU);
    if (dec.info() != Eigen::Success)
        throw NumericalError("empirical_projector: SVD did not converge");
    RankRProjector out;
    out.basis = dec.matrixU().leftCols(r);
    for (int j = 0; j < r; ++j) {
        double pivot = 0.0;
        for (int i = 0; i < out.m(); ++i) {
            if (std::abs(out.basis(i, j)) > 1e-12) {
                pivot = out.basis(i, j);
                break;
            }
        }
        if (pivot < 0.0) out.basis.col(j) = -out.basis.col(j);
    }
    return out;
}

/// ||P x||_{S2}^2 computed through the basis as ||B^T x||_{S2}^2.
inline double projected_energy(const Matrix& x, const RankRProjector& p) {
    if (x.rows() != p.basis.rows() || x.rows() != x.cols())
        throw DimensionError("projected_energy: shape mismatch");
    return (p.basis.transpose() * x).squaredNorm();
}

/// Closed form E ||pi_r X||_{S2}^2 = sum_{i<=r} lambda_i^2 + sigma^2 r M.
inline double expected_projected_energy(const ModelInstance& model) {
    const int r = model.spec.r;
    double top = 0.0;
    for (int i = 0; i < r; ++i) {
        const double lam = model.svd_of_c.singulars(i);
        top += lam * lam;
    }
    return top + model.spec.sigma * model.spec.sigma * r * model.spec.m;
}

}  // namespace spl
