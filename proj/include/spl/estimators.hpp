#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spl/common.hpp"
#include "spl/delta.hpp"
#include "spl/mc.hpp"
#include "spl/parallel.hpp"
#include "spl/projector.hpp"
#include "spl/spectrum.hpp"

namespace spl {

/// s_hat = lambda_hat_1^2 - sigma^2 M, the bias-corrected estimator of
/// lambda_1^2.
inline double top_singular_estimate(const Matrix& x, double sigma) {
    if (sigma < 0.0) throw ArgumentError("top_singular_estimate: sigma must be >= 0");
    const int m = static_cast<int>(x.rows());
    return top_r_energy(x, 1) - sigma * sigma * m;
}

/// t_hat_r = (||pi_hat_r X||^2 - sigma^2 r M) / ||C||_{S2}^2, with the
/// denominator supplied by the caller as a known constant.
inline double explained_variance_ratio(const Matrix& x, int r, double sigma, double c_energy) {
    if (c_energy <= 0.0) throw ArgumentError("explained_variance_ratio: c_energy must be > 0");
    const int m = static_cast<int>(x.rows());
    return (top_r_energy(x, r) - sigma * sigma * r * m) / c_energy;
}

enum class QuadraticMode { Naive, LowRank };

/// Quadratic-functional estimators of ||C||_{S2}^2:
///   naive   -> ||X||^2 - sigma^2 M^2
///   lowrank -> ||pi_hat_r X||^2 - sigma^2 r M
inline double quadratic_functional(const Matrix& x, double sigma, QuadraticMode mode, int r = 1) {
    const int m = static_cast<int>(x.rows());
    if (mode == QuadraticMode::Naive)
        return x.squaredNorm() - sigma * sigma * m * m;
    return top_r_energy(x, r) - sigma * sigma * r * m;
}

/// Linear-entropy wrapper, 1 - (quadratic functional); for density-matrix
/// style applications where 1 - ||C||_{S2}^2 is the target.
inline double linear_entropy_estimate(const Matrix& x, double sigma, QuadraticMode mode,
                                      int r = 1) {
    return 1.0 - quadratic_functional(x, sigma, mode, r);
}

/// Exact variance formulas:
///   naive:          2 sigma^4 M^2 + 4 sigma^2 ||C||_{S2}^2
///   lowrank-oracle: 2 sigma^4 r M + 4 sigma^2 ||C||_{S2}^2
/// The lowrank formula is stated for the oracle projector pi_r (and rank-r
/// C), not for pi_hat_r; it is reported under that label.
inline double variance_formulas(const ModelInstance& model, QuadraticMode mode) {
    const double sigma = model.spec.sigma;
    const int m = model.spec.m;
    const int r = model.spec.r;
    const double c_energy = model.svd_of_c.singulars.squaredNorm();
    if (mode == QuadraticMode::Naive)
        return 2.0 * std::pow(sigma, 4) * m * m + 4.0 * sigma * sigma * c_energy;
    return 2.0 * std::pow(sigma, 4) * r * m + 4.0 * sigma * sigma * c_energy;
}

struct EstimatorReport {
    std::string name;
    double estimate_mean = 0.0;
    std::optional<double> target;
    std::optional<MCEstimate> bias_mc;
    std::optional<double> variance_formula;
    std::optional<MCEstimate> variance_mc;
};

namespace detail {

inline MCEstimate variance_estimate(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    const double mean = compensated_sum(samples) / static_cast<double>(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = samples[i] - mean;
        sq[i] = dev * dev;
    }
    MCEstimate out = MCEstimate::from_samples(sq);
    out.mean = out.mean * static_cast<double>(n) / static_cast<double>(n - 1);
    return out;
}

inline EstimatorReport make_report(const std::string& name, const std::vector<double>& samples,
                                   double target, std::optional<double> var_formula) {
    std::vector<double> bias(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) bias[i] = samples[i] - target;
    EstimatorReport out;
    out.name = name;
    out.bias_mc = MCEstimate::from_samples(bias);
    out.estimate_mean = out.bias_mc->mean + target;
    out.target = target;
    out.variance_formula = var_formula;
    out.variance_mc = variance_estimate(samples);
    return out;
}

}  // namespace detail

/// One shared replication loop producing MC bias and variance for s_hat,
/// t_hat_r, both quadratic functionals and the oracle-projection variant.
/// The lowrank-pi_hat bias path equals the per-replication values of
/// estimate_delta (without antithetic pairing) on the same seeds.
inline std::vector<EstimatorReport> bias_study(const ModelInstance& model, std::size_t reps,
                                               const RngStream& stream, int threads = 1) {
    if (reps < 2) throw ArgumentError("bias_study: need reps >= 2");
    const int m = model.spec.m;
    const int r = model.spec.r;
    const double sigma = model.spec.sigma;
    const double lambda1 = model.svd_of_c.singulars(0);
    const double c_energy = model.svd_of_c.singulars.squaredNorm();
    const double top_energy = model.svd_of_c.singulars.head(r).squaredNorm();
    const RankRProjector pi = oracle_projector(model);

    std::vector<double> s_hat(reps), t_hat(reps), naive(reps), low_emp(reps), low_oracle(reps);
    parallel_for(reps, threads, [&](std::size_t i) {
        RngStream si = stream.substream(i);
        Matrix x = model.c + sample_gaussian(m, sigma, si);
        const double e_r = top_r_energy(x, r);
        const double e_1 = r == 1 ? e_r : top_r_energy(x, 1);
        s_hat[i] = e_1 - sigma * sigma * m;
        naive[i] = x.squaredNorm() - sigma * sigma * m * m;
        low_emp[i] = e_r - sigma * sigma * r * m;
        low_oracle[i] = projected_energy(x, pi) - sigma * sigma * r * m;
        t_hat[i] = c_energy > 0.0 ? low_emp[i] / c_energy : 0.0;
    });

    std::vector<EstimatorReport> out;
    out.push_back(detail::make_report("top_singular", s_hat, lambda1 * lambda1, std::nullopt));
    if (c_energy > 0.0)
        out.push_back(detail::make_report("explained_variance_ratio", t_hat,
                                          top_energy / c_energy, std::nullopt));
    out.push_back(detail::make_report("quadratic_naive", naive, c_energy,
                                      variance_formulas(model, QuadraticMode::Naive)));
    out.push_back(detail::make_report("quadratic_lowrank_empirical", low_emp, top_energy,
                                      std::nullopt));
    out.push_back(detail::make_report("quadratic_lowrank_oracle", low_oracle, top_energy,
                                      variance_formulas(model, QuadraticMode::LowRank)));
    return out;
}

inline const char* kEstimatorCsvHeader =
    "estimator,estimate_mean,bias_mean,bias_stderr,var_formula,var_mc,reps,seed";

inline void write_estimator_csv(const std::vector<EstimatorReport>& reports, std::size_t reps,
                                std::uint64_t seed, std::ostream& os) {
    os << kEstimatorCsvHeader << '\n';
    for (const EstimatorReport& report : reports) {
        os << report.name << ',' << detail::format_double(report.estimate_mean) << ','
           << (report.bias_mc ? detail::format_double(report.bias_mc->mean) : std::string()) << ','
           << (report.bias_mc ? detail::format_double(report.bias_mc->stderr_) : std::string())
           << ',' << detail::format_optional(report.variance_formula) << ','
           << (report.variance_mc ? detail::format_double(report.variance_mc->mean)
                                  : std::string())
           << ',' << reps << ',' << seed << '\n';
    }
}

inline nlohmann::json estimator_reports_to_json(const std::vector<EstimatorReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const EstimatorReport& report : reports) {
        nlohmann::json j{{"estimator", report.name}, {"estimate_mean", report.estimate_mean}};
        if (report.target) j["target"] = *report.target;
        if (report.bias_mc) {
            j["bias_mean"] = report.bias_mc->mean;
            j["bias_stderr"] = report.bias_mc->stderr_;
        }
        if (report.variance_formula) j["var_formula"] = *report.variance_formula;
        if (report.variance_mc) j["var_mc"] = report.variance_mc->mean;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace spl
