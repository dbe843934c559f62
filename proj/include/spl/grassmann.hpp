#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "spl/common.hpp"
#include "spl/matrix.hpp"
#include "spl/projector.hpp"
#include "spl/rng.hpp"
#include "spl/spectrum.hpp"

namespace spl {

/// Uniform draw from the Grassmannian of r-planes in R^M, via QR of an
/// M x r Gaussian frame.
inline RankRProjector sample_haar_projector(int m, int r, RngStream& stream) {
    if (m < 1 || r < 1 || r > m) throw ArgumentError("sample_haar_projector: need 1 <= r <= M");
    Matrix g(m, r);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < r; ++j) g(i, j) = stream.normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = Matrix::Identity(m, r);
    q = qr.householderQ() * q;
    const Matrix& rr = qr.matrixQR();
    for (int j = 0; j < r; ++j)
        if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
    RankRProjector out;
    out.basis = std::move(q);
    return out;
}

/// ||pi_r C||_{S2}^2 - ||p C||_{S2}^2, the deterministic compensation term
/// of the projector p. Non-negative up to roundoff since pi_r is the argmax.
inline double energy_gap(const ModelInstance& model, const RankRProjector& p) {
    if (p.basis.rows() != model.c.rows() || p.r() != model.spec.r)
        throw DimensionError("energy_gap: shape mismatch");
    double top = 0.0;
    for (int i = 0; i < model.spec.r; ++i) {
        const double lam = model.svd_of_c.singulars(i);
        top += lam * lam;
    }
    return top - (p.basis.transpose() * model.c).squaredNorm();
}

/// Radii of the S2-balls sandwiching the energy-gap set G_{M,r}(delta, C):
///   G subset { d(pi_r, .) <= min(lambda_r^{-1} sqrt(2(delta + Delta_r*)),
///                                 gamma_r* sqrt(2 delta)) }
///   { d(pi_r, .) <= lambda_1^{-1} sqrt(2 delta) } subset G
/// with Delta_r* = sum_{i=r+1}^{2r} lambda_i^2 (zero-padded past M) and
/// gamma_r* = (lambda_r^2 - lambda_{r+1}^2)^{-1/2}, inf under multiplicity.
struct InclusionRadii {
    double upper_s2 = 0.0;
    double lower_s2 = 0.0;
    double delta_r_star = 0.0;
    double gamma_r_star = 0.0;  // +inf when lambda_r = lambda_{r+1}
};

inline InclusionRadii inclusion_radii(std::span<const double> spectrum, int r, double delta) {
    const int m = static_cast<int>(spectrum.size());
    if (r < 1 || r > m) throw ArgumentError("inclusion_radii: need 1 <= r <= M");
    if (delta <= 0.0) throw ArgumentError("inclusion_radii: delta must be > 0");
    const double lambda1 = spectrum[0];
    const double lambda_r = spectrum[static_cast<std::size_t>(r - 1)];
    const double lambda_r1 = r < m ? spectrum[static_cast<std::size_t>(r)] : 0.0;
    if (lambda_r <= 0.0) throw ArgumentError("inclusion_radii: requires lambda_r > 0");

    InclusionRadii out;
    for (int i = r; i < std::min(2 * r, m); ++i) out.delta_r_star += spectrum[i] * spectrum[i];
    const double gap = lambda_r * lambda_r - lambda_r1 * lambda_r1;
    out.gamma_r_star = gap > 0.0 ? 1.0 / std::sqrt(gap) : std::numeric_limits<double>::infinity();
    out.upper_s2 = std::min(std::sqrt(2.0 * (delta + out.delta_r_star)) / lambda_r,
                            out.gamma_r_star * std::sqrt(2.0 * delta));
    out.lower_s2 = std::sqrt(2.0 * delta) / lambda1;
    return out;
}

/// Sampled check of both ball inclusions over a delta grid.
struct InclusionCheck {
    std::size_t samples = 0;
    std::size_t checks = 0;
    std::size_t upper_violations = 0;
    std::size_t lower_violations = 0;

    std::size_t violations() const { return upper_violations + lower_violations; }
};

inline InclusionCheck check_inclusions(const ModelInstance& model,
                                       const std::vector<double>& delta_grid, std::size_t samples,
                                       RngStream& stream) {
    const int m = model.spec.m;
    const int r = model.spec.r;
    std::vector<double> spectrum(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) spectrum[static_cast<std::size_t>(i)] = model.svd_of_c.singulars(i);
    if (spectrum[static_cast<std::size_t>(r - 1)] <= 0.0)
        throw ArgumentError("check_inclusions: requires lambda_r > 0");

    std::vector<InclusionRadii> radii;
    radii.reserve(delta_grid.size());
    for (double delta : delta_grid) radii.push_back(inclusion_radii(spectrum, r, delta));

    const RankRProjector pi = oracle_projector(model);
    InclusionCheck out;
    out.samples = samples;
    const double tol = 1e-8;
    for (std::size_t i = 0; i < samples; ++i) {
        RankRProjector p = sample_haar_projector(m, r, stream);
        const double gap = energy_gap(model, p);
        const double dist = projector_distance(pi, p, ProjectorMetric::S2);
        for (std::size_t k = 0; k < delta_grid.size(); ++k) {
            out.checks += 2;
            if (gap <= delta_grid[k] && dist > radii[k].upper_s2 + tol) ++out.upper_violations;
            if (dist <= radii[k].lower_s2 && gap > delta_grid[k] + tol) ++out.lower_violations;
        }
    }
    return out;
}

/// Greedy maximal-style packing of the Grassmannian: sample candidates,
/// accept when farther than `radius` from every accepted center, stop on a
/// rejection streak or budget exhaustion. The center count is a lower
/// bound for the capacity number at this radius.
struct PackingResult {
    std::vector<RankRProjector> centers;
    double radius = 0.0;
    ProjectorMetric metric = ProjectorMetric::S2;
    std::size_t rejected_streak = 0;
    bool budget_exhausted = false;
};

inline PackingResult greedy_packing(int m, int r, double radius, ProjectorMetric metric,
                                    std::size_t candidate_budget, std::size_t stop_streak,
                                    RngStream& stream) {
    if (radius <= 0.0) throw ArgumentError("greedy_packing: radius must be > 0");
    if (candidate_budget < 1) throw ArgumentError("greedy_packing: budget must be >= 1");
    PackingResult out;
    out.radius = radius;
    out.metric = metric;
    std::size_t streak = 0;
    for (std::size_t i = 0; i < candidate_budget; ++i) {
        RankRProjector candidate = sample_haar_projector(m, r, stream);
        bool accepted = true;
        for (const RankRProjector& center : out.centers) {
            if (projector_distance(center, candidate, metric) <= radius) {
                accepted = false;
                break;
            }
        }
        if (accepted) {
            out.centers.push_back(std::move(candidate));
            streak = 0;
        } else if (++streak >= stop_streak) {
            out.rejected_streak = streak;
            return out;
        }
    }
    out.rejected_streak = streak;
    out.budget_exhausted = true;
    return out;
}

inline nlohmann::json inclusion_check_to_json(const InclusionCheck& check) {
    return nlohmann::json{{"samples", check.samples},
                          {"checks", check.checks},
                          {"upper_violations", check.upper_violations},
                          {"lower_violations", check.lower_violations}};
}

inline nlohmann::json packing_result_to_json(const PackingResult& result) {
    return nlohmann::json{
        {"centers", result.centers.size()},
        {"radius", result.radius},
        {"metric", result.metric == ProjectorMetric::S2 ? "S2" : "Sinfty"},
        {"rejected_streak", result.rejected_streak},
        {"budget_exhausted", result.budget_exhausted}};
}

/// Membership predicate for the dyadic slice A_{C,k}: energy gap in
/// ( ||pi_r C||^2 / 2^{k+1}, ||pi_r C||^2 / 2^k ].
inline bool in_slice(const ModelInstance& model, const RankRProjector& p, int k) {
    if (k < 0) throw ArgumentError("in_slice: k must be >= 0");
    double top = 0.0;
    for (int i = 0; i < model.spec.r; ++i) {
        const double lam = model.svd_of_c.singulars(i);
        top += lam * lam;
    }
    const double gap = energy_gap(model, p);
    return gap > std::ldexp(top, -(k + 1)) && gap <= std::ldexp(top, -k);
}

}  // namespace spl
