#pragma once

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spl/common.hpp"
#include "spl/mc.hpp"
#include "spl/spectrum.hpp"

namespace spl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Default constant d of the rank-one lower-bound construction. Any
/// d in (0,1) with 2*sqrt(d)/sqrt(2*pi) - d > 0 works; 0.25 satisfies the
/// positivity condition comfortably.
inline constexpr double kDefaultGammaStarD = 0.25;

/// sigma^2 r M + sigma r sqrt(M) lambda_1, the constant-free universal
/// upper-bound kernel.
inline double universal_kernel(std::span<const double> spectrum, double sigma, int m, int r) {
    if (sigma <= 0.0) throw ArgumentError("universal_kernel: sigma must be > 0");
    const double lambda1 = spectrum.empty() ? 0.0 : spectrum[0];
    return sigma * sigma * r * m + sigma * r * std::sqrt(static_cast<double>(m)) * lambda1;
}

struct GeneralTerms {
    double term_i = 0.0;
    double term_ii = 0.0;
    double term_iii = 0.0;  // +inf when lambda_r = lambda_{r+1}
    double kernel = 0.0;    // sigma^2 r M (I + min(II, III))
};

/// The three structure-sensitive terms of the general upper bound and the
/// assembled kernel. Requires lambda_r > 0 and r <= M - r (the r = 1 case
/// is admitted for every M >= 2).
inline GeneralTerms general_terms(std::span<const double> spectrum, double sigma, int m, int r) {
    if (sigma <= 0.0) throw ArgumentError("general_terms: sigma must be > 0");
    if (static_cast<int>(spectrum.size()) < m)
        throw ArgumentError("general_terms: spectrum shorter than m");
    if (r > m - r && !(r == 1 && m >= 2))
        throw ArgumentError("general_terms: out of scope, r > M - r");
    const double lambda1 = spectrum[0];
    const double lambda_r = spectrum[static_cast<std::size_t>(r - 1)];
    const double lambda_r1 = r < m ? spectrum[static_cast<std::size_t>(r)] : 0.0;
    if (lambda_r <= 0.0) throw ArgumentError("general_terms: requires lambda_r > 0 (rank >= r)");

    const double sqm = std::sqrt(static_cast<double>(m));
    GeneralTerms out;
    out.term_i = std::min(lambda1 * lambda1 / (lambda_r * lambda_r), 1.0 + lambda1 / (sigma * sqm));

    double tail = 0.0;  // sum_{i=r+1}^{2r} lambda_i^2, zero-padded past M
    for (int i = r; i < std::min(2 * r, m); ++i) tail += spectrum[i] * spectrum[i];
    out.term_ii = std::sqrt(tail / (static_cast<double>(r) * lambda_r * lambda_r)) * lambda1 /
                  (sigma * sqm);

    const double gap = lambda_r * lambda_r - lambda_r1 * lambda_r1;
    out.term_iii = gap > 0.0 ? lambda1 * lambda1 / gap : kInf;

    out.kernel = sigma * sigma * r * m * (out.term_i + std::min(out.term_ii, out.term_iii));
    return out;
}

/// Kernel for the step spectrum (lambda_i = alpha for i <= r, beta after):
/// sigma^2 r M (1 + min(alpha^2/(alpha^2-beta^2), beta/(sigma sqrt(M)))),
/// with c/0 := inf.
inline double step_kernel(double alpha, double beta, double sigma, int m, int r) {
    if (sigma <= 0.0) throw ArgumentError("step_kernel: sigma must be > 0");
    if (alpha <= 0.0) throw ArgumentError("step_kernel: alpha must be > 0");
    if (beta < 0.0 || beta > alpha) throw ArgumentError("step_kernel: need 0 <= beta <= alpha");
    const double gap = alpha * alpha - beta * beta;
    const double first = gap > 0.0 ? alpha * alpha / gap : kInf;
    const double second = beta / (sigma * std::sqrt(static_cast<double>(m)));
    return sigma * sigma * r * m * (1.0 + std::min(first, second));
}

/// Lower floor in the small-amplitude regime ||C||_{Sinf} <= kappa sigma
/// sqrt(M): delta0_hat - kappa^2 sigma^2 r M. May be negative (vacuous);
/// returned as-is.
inline double small_amplitude_floor(double kappa, double sigma, int m, int r,
                                    const MCEstimate& delta0_hat) {
    if (kappa <= 0.0) throw ArgumentError("small_amplitude_floor: kappa must be > 0");
    return delta0_hat.mean - kappa * kappa * sigma * sigma * r * m;
}

/// Explicit rank-one projector construction realizing the r = 1 lower
/// bound. gamma1 is the first coefficient; the others share the magnitude
/// gamma_tail_abs with data-dependent signs at runtime.
struct GammaStar {
    double delta_ss = 0.0;                 // d (M-1) sigma^2 / (2 lambda_1^2)
    double closed_form_expectation = 0.0;  // mean of the construction's objective
    double lower_kernel = 0.0;             // (2 sqrt(d)/sqrt(2 pi) - d) sigma^2 (M-1)
    double gamma1 = 0.0;
    double gamma_tail_abs = 0.0;
};

inline GammaStar gamma_star_construction(double lambda1, double sigma, int m,
                                         double d = kDefaultGammaStarD) {
    if (m < 2) throw ConstructionError("gamma_star_construction: requires M >= 2");
    if (!(d > 0.0 && d < 1.0)) throw ConstructionError("gamma_star_construction: need 0 < d < 1");
    const double sqm = std::sqrt(static_cast<double>(m));
    if (lambda1 < std::sqrt(d) * sigma * sqm)
        throw ConstructionError("gamma_star_construction: requires lambda1 >= sqrt(d) sigma sqrt(M)");
    GammaStar out;
    out.delta_ss = d * (m - 1) * sigma * sigma / (2.0 * lambda1 * lambda1);
    const double two_pi = 2.0 * 3.14159265358979323846;
    out.closed_form_expectation =
        2.0 * lambda1 * sigma * std::sqrt(out.delta_ss * (1.0 - out.delta_ss)) *
            std::sqrt(static_cast<double>(m - 1)) * std::sqrt(2.0 / 3.14159265358979323846) -
        d * sigma * sigma * (m - 1);
    out.lower_kernel = (2.0 * std::sqrt(d) / std::sqrt(two_pi) - d) * sigma * sigma * (m - 1);
    out.gamma1 = std::sqrt(1.0 - out.delta_ss);
    out.gamma_tail_abs = std::sqrt(out.delta_ss / (m - 1));
    return out;
}

/// Evaluated bound kernels for one model. Inapplicable kernels are absent
/// with a reason string.
struct BoundReport {
    std::optional<double> universal;
    std::string universal_absent_reason;
    std::optional<GeneralTerms> general;
    std::string general_absent_reason;
    std::optional<double> step;
    std::string step_absent_reason;
    std::optional<double> floor;  // needs a delta0 estimate
    std::string floor_absent_reason;
    std::optional<double> r1_lower;
    std::string r1_lower_absent_reason;
};

namespace detail {

// Step-spectrum detection: lambda_1..lambda_r all alpha, the rest all beta.
inline bool detect_step(std::span<const double> spectrum, int r, double& alpha, double& beta) {
    const int m = static_cast<int>(spectrum.size());
    alpha = spectrum[0];
    beta = r < m ? spectrum[static_cast<std::size_t>(r)] : 0.0;
    const double tol = 1e-12 * std::max(1.0, alpha);
    for (int i = 0; i < r; ++i)
        if (std::abs(spectrum[i] - alpha) > tol) return false;
    for (int i = r; i < m; ++i)
        if (std::abs(spectrum[i] - beta) > tol) return false;
    return alpha > 0.0;
}

}  // namespace detail

inline BoundReport bound_report(const ModelInstance& model,
                                const std::optional<MCEstimate>& delta0_hat = std::nullopt,
                                double kappa = 1.0) {
    const int m = model.spec.m;
    const int r = model.spec.r;
    const double sigma = model.spec.sigma;
    std::vector<double> spectrum(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) spectrum[static_cast<std::size_t>(i)] = model.svd_of_c.singulars(i);

    BoundReport out;
    if (sigma > 0.0)
        out.universal = universal_kernel(spectrum, sigma, m, r);
    else
        out.universal_absent_reason = "sigma = 0";

    const double lambda_r = spectrum[static_cast<std::size_t>(r - 1)];
    if (sigma <= 0.0) {
        out.general_absent_reason = "sigma = 0";
    } else if (lambda_r <= 0.0) {
        out.general_absent_reason = "lambda_r = 0 (rank < r)";
    } else if (r > m - r && !(r == 1 && m >= 2)) {
        out.general_absent_reason = "r > M - r";
    } else {
        out.general = general_terms(spectrum, sigma, m, r);
    }

    double alpha = 0.0, beta = 0.0;
    if (sigma <= 0.0) {
        out.step_absent_reason = "sigma = 0";
    } else if (detail::detect_step(spectrum, r, alpha, beta)) {
        out.step = step_kernel(alpha, beta, sigma, m, r);
    } else {
        out.step_absent_reason = "spectrum is not a step at index r";
    }

    if (delta0_hat)
        out.floor = small_amplitude_floor(kappa, sigma, m, r, *delta0_hat);
    else
        out.floor_absent_reason = "no delta0 estimate supplied";

    if (r != 1) {
        out.r1_lower_absent_reason = "r != 1";
    } else if (m < 2) {
        out.r1_lower_absent_reason = "M < 2";
    } else if (spectrum[0] < std::sqrt(kDefaultGammaStarD) * sigma * std::sqrt(double(m))) {
        out.r1_lower_absent_reason = "lambda_1 below sqrt(d) sigma sqrt(M)";
    } else {
        out.r1_lower = gamma_star_construction(spectrum[0], sigma, m).lower_kernel;
    }
    return out;
}

inline nlohmann::json bound_report_to_json(const BoundReport& report) {
    nlohmann::json j;
    auto put = [&j](const std::string& key, const std::optional<double>& value,
                    const std::string& reason) {
        if (value)
            j[key] = std::isinf(*value) ? nlohmann::json("inf") : nlohmann::json(*value);
        else
            j[key] = {{"absent", reason}};
    };
    put("universal_kernel", report.universal, report.universal_absent_reason);
    if (report.general) {
        const GeneralTerms& g = *report.general;
        j["general"] = {
            {"I", g.term_i},
            {"II", g.term_ii},
            {"III", std::isinf(g.term_iii) ? nlohmann::json("inf") : nlohmann::json(g.term_iii)},
            {"kernel", g.kernel}};
    } else {
        j["general"] = {{"absent", report.general_absent_reason}};
    }
    put("step_kernel", report.step, report.step_absent_reason);
    put("small_amplitude_floor", report.floor, report.floor_absent_reason);
    put("r1_lower_kernel", report.r1_lower, report.r1_lower_absent_reason);
    return j;
}

}  // namespace spl
