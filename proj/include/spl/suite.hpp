#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "spl/bounds.hpp"
#include "spl/delta.hpp"
#include "spl/estimators.hpp"
#include "spl/grassmann.hpp"
#include "spl/mc.hpp"
#include "spl/projector.hpp"
#include "spl/spectrum.hpp"

namespace spl::suite {

struct SuiteConfig {
    std::uint64_t seed = 1;
    int threads = 1;
};

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;
    std::string artifact;  // full numeric record, byte-comparable across reruns
};

namespace detail {

using spl::detail::format_double;

class Recorder {
public:
    void line(const std::string& s) {
        out_ << s << '\n';
    }
    template <class... Ts>
    void record(const Ts&... parts) {
        ((out_ << to_string_part(parts) << ' '), ...);
        out_ << '\n';
    }
    std::string str() const { return out_.str(); }

private:
    static std::string to_string_part(double v) { return format_double(v); }
    static std::string to_string_part(int v) { return std::to_string(v); }
    static std::string to_string_part(std::size_t v) { return std::to_string(v); }
    static std::string to_string_part(const std::string& v) { return v; }
    static std::string to_string_part(const char* v) { return v; }
    std::stringstream out_;
};

class Checker {
public:
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            failures_ += (failures_.empty() ? "" : "; ") + what;
        }
    }
    bool pass() const { return pass_; }
    const std::string& failures() const { return failures_; }

private:
    bool pass_ = true;
    std::string failures_;
};

template <class Body>
CriterionResult timed(const std::string& name, double limit_seconds, Body&& body) {
    CriterionResult result;
    result.name = name;
    result.limit_seconds = limit_seconds;
    Recorder rec;
    Checker chk;
    const auto t0 = std::chrono::steady_clock::now();
    body(rec, chk);
    const auto t1 = std::chrono::steady_clock::now();
    result.seconds = std::chrono::duration<double>(t1 - t0).count();
    chk.require(result.seconds < limit_seconds, "runtime " + format_double(result.seconds) +
                                                    "s exceeds limit");
    result.pass = chk.pass();
    result.detail = chk.failures();
    result.artifact = rec.str();
    return result;
}

inline SpectrumSpec zero_spec(int m, int r, double sigma) {
    SpectrumSpec spec;
    spec.m = m;
    spec.r = r;
    spec.sigma = sigma;
    spec.family.type = FamilyType::Zero;
    spec.rotation.mode = RotationMode::Identity;
    return spec;
}

inline SpectrumSpec family_spec(int m, int r, double sigma, FamilyType type, double alpha,
                                double beta = 0.0, int s = 0, std::uint64_t rot_seed = 0,
                                RotationMode mode = RotationMode::Haar) {
    SpectrumSpec spec;
    spec.m = m;
    spec.r = r;
    spec.sigma = sigma;
    spec.family.type = type;
    spec.family.alpha = alpha;
    spec.family.beta = beta;
    spec.family.s = s;
    spec.rotation.mode = mode;
    spec.rotation.seed = rot_seed;
    return spec;
}

/// Deterministic random Custom spectrum: sorted folded normals at a random
/// scale relative to sigma sqrt(M), optionally with a zeroed tail past r.
inline SpectrumSpec random_custom_spec(int m, int r, double sigma, RngStream& gen) {
    std::vector<double> values(static_cast<std::size_t>(m));
    const double scale =
        sigma * std::sqrt(static_cast<double>(m)) * std::pow(10.0, gen.uniform01() * 1.5 - 0.5);
    for (auto& v : values) v = scale * std::abs(gen.normal());
    std::sort(values.begin(), values.end(), std::greater<double>());
    if (gen.uniform01() < 0.3) {
        const int keep = r + static_cast<int>(gen.uniform01() * (m - r));
        for (int i = std::max(keep, r); i < m; ++i) values[static_cast<std::size_t>(i)] = 0.0;
    }
    SpectrumSpec spec;
    spec.m = m;
    spec.r = r;
    spec.sigma = sigma;
    spec.family.type = FamilyType::Custom;
    spec.family.values = std::move(values);
    spec.rotation.mode = RotationMode::Haar;
    spec.rotation.seed = gen.master_seed() ^ (gen.stream_index() * 0x9E3779B97F4A7C15ULL);
    return spec;
}

// Frozen high-rep baseline oracle: Zero family, r = 1, sigma = 1,
// 100000 replications, stream (1000003, 0). Regenerate with the
// baseline_oracle_run tool.
struct BaselineTarget {
    int m;
    double mean;
    double stderr_;
};

inline constexpr BaselineTarget kBaselineOracle[] = {
    {25, 64.52073367520876, 0.027983375867937879},
    {100, 284.13491913463162, 0.045932206418921234},
    {400, 1175.768956874025, 0.073780503438601278},
};

}  // namespace detail

// --------------------------------------------------------------------------
// Criterion 1: baseline delta_0 at M in {25, 100, 400}.
// --------------------------------------------------------------------------
inline CriterionResult run_baseline(const SuiteConfig& cfg) {
    return detail::timed("baseline", 300.0, [&](detail::Recorder& rec, detail::Checker& chk) {
        double prev_norm = -1.0;
        for (const auto& target : detail::kBaselineOracle) {
            const int m = target.m;
            ModelInstance model = build_model(detail::zero_spec(m, 1, 1.0));
            RngStream stream(cfg.seed, static_cast<std::uint64_t>(m));
            DeltaReport rep = estimate_delta(model, 2000, stream, false, cfg.threads);
            rec.record("baseline", m, rep.delta.mean, rep.delta.stderr_, rep.normalized);
            chk.require(rep.normalized >= 2.0 && rep.normalized <= 3.5,
                        "M=" + std::to_string(m) + ": normalized delta0 outside [2.0, 3.5]");
            chk.require(rep.normalized > prev_norm,
                        "M=" + std::to_string(m) + ": normalized delta0 not increasing");
            if (m == 400)
                chk.require(rep.normalized > 2.6, "M=400: normalized delta0 not above 2.6");
            const double tol =
                3.0 * std::sqrt(rep.delta.stderr_ * rep.delta.stderr_ +
                                target.stderr_ * target.stderr_);
            chk.require(std::abs(rep.delta.mean - target.mean) <= tol,
                        "M=" + std::to_string(m) + ": disagrees with high-rep oracle");
            prev_norm = rep.normalized;
        }
    });
}

// --------------------------------------------------------------------------
// Criterion 2: fixed-projection identity E||pi_r X||^2 = ||pi_r C||^2 +
// sigma^2 r M over 10 random specs.
// --------------------------------------------------------------------------
inline CriterionResult run_fixed_projection(const SuiteConfig& cfg) {
    return detail::timed("fixed-projection", 60.0,
                         [&](detail::Recorder& rec, detail::Checker& chk) {
        RngStream gen(0xF1DE0u, 0);
        for (int k = 0; k < 10; ++k) {
            const int m = 10 + static_cast<int>(gen.uniform01() * 30);
            const int r = 1 + static_cast<int>(gen.uniform01() * 4);
            const double sigma = 0.5 + gen.uniform01() * 1.5;
            SpectrumSpec spec = detail::random_custom_spec(m, std::min(r, m), sigma, gen);
            ModelInstance model = build_model(spec);
            const RankRProjector pi = oracle_projector(model);
            const double closed = expected_projected_energy(model);
            const std::size_t reps = 1200;
            std::vector<double> values(reps);
            RngStream stream(cfg.seed, 0x200u + static_cast<std::uint64_t>(k));
            parallel_for(reps, cfg.threads, [&](std::size_t i) {
                RngStream si = stream.substream(i);
                Matrix x = sample_observation(model, si);
                values[i] = projected_energy(x, pi);
            });
            MCEstimate est = MCEstimate::from_samples(values);
            rec.record("fixed_projection", k, est.mean, est.stderr_, closed);
            chk.require(std::abs(est.mean - closed) <= 4.0 * est.stderr_,
                        "spec " + std::to_string(k) + ": MC mean off the closed form");
        }
    });
}

// --------------------------------------------------------------------------
// Criterion 3: paired comparison delta(alpha Id) >= delta(0).
// --------------------------------------------------------------------------
inline CriterionResult run_weak_accuracy_paired(const SuiteConfig& cfg) {
    return detail::timed("weak-accuracy-paired", 180.0,
                         [&](detail::Recorder& rec, detail::Checker& chk) {
        const int m = 50;
        const double sigma = 1.0;
        const double unit = sigma * std::sqrt(static_cast<double>(m));
        std::uint64_t stream_id = 0x300;
        for (int r : {1, 3}) {
            ModelInstance zero = build_model(detail::zero_spec(m, r, sigma));
            for (double mult : {1.0, 5.0, 20.0}) {
                SpectrumSpec spec = detail::family_spec(m, r, sigma, FamilyType::ScaledIdentity,
                                                        mult * unit, 0.0, 0, 0,
                                                        RotationMode::Identity);
                ModelInstance scaled = build_model(spec);
                RngStream stream(cfg.seed, stream_id++);
                MCEstimate diff = paired_delta_difference(scaled, zero, 2000, stream, cfg.threads);
                rec.record("paired", r, mult, diff.mean, diff.stderr_);
                chk.require(diff.mean >= -3.0 * diff.stderr_,
                            "r=" + std::to_string(r) + " alpha=" +
                                spl::detail::format_double(mult) +
                                "*sigma*sqrt(M): paired difference below -3 stderr");
            }
        }
    });
}

// --------------------------------------------------------------------------
// Criterion 4: linear explosion of delta for C = alpha Id (log-log slope).
// --------------------------------------------------------------------------
inline CriterionResult run_weak_accuracy_slope(const SuiteConfig& cfg) {
    return detail::timed("weak-accuracy-slope", 180.0,
                         [&](detail::Recorder& rec, detail::Checker& chk) {
        const int m = 50;
        const double sigma = 1.0;
        const double unit = sigma * std::sqrt(static_cast<double>(m));
        std::vector<double> log_alpha, log_delta;
        std::uint64_t stream_id = 0x400;
        for (double mult : {10.0, 20.0, 40.0, 80.0}) {
            SpectrumSpec spec = detail::family_spec(m, 1, sigma, FamilyType::ScaledIdentity,
                                                    mult * unit, 0.0, 0, 0, RotationMode::Identity);
            ModelInstance model = build_model(spec);
            RngStream stream(cfg.seed, stream_id++);
            DeltaReport rep = estimate_delta(model, 2000, stream, true, cfg.threads);
            rec.record("slope_point", mult, rep.delta.mean, rep.delta.stderr_);
            chk.require(rep.delta.mean > 0.0, "delta estimate not positive at alpha grid point");
            if (rep.delta.mean > 0.0) {
                log_alpha.push_back(std::log(mult * unit));
                log_delta.push_back(std::log(rep.delta.mean));
            }
        }
        if (log_alpha.size() == 4) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < 4; ++i) {
                sx += log_alpha[i];
                sy += log_delta[i];
                sxx += log_alpha[i] * log_alpha[i];
                sxy += log_alpha[i] * log_delta[i];
            }
            const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
            rec.record("slope", slope);
            chk.require(slope >= 0.85 && slope <= 1.15, "log-log slope outside [0.85, 1.15]");
        }
    });
}

// --------------------------------------------------------------------------
// Criterion 5: plateau of normalized delta for C = alpha Id_r.
// --------------------------------------------------------------------------
inline CriterionResult run_high_accuracy_plateau(const SuiteConfig& cfg) {
    return detail::timed("high-accuracy-plateau", 180.0,
                         [&](detail::Recorder& rec, detail::Checker& chk) {
        const int m = 50;
        const int r = 2;
        const double sigma = 1.0;
        const double unit = sigma * std::sqrt(static_cast<double>(m));
        double norm_first = 0.0, norm_last = 0.0, norm_max = 0.0;
        std::uint64_t stream_id = 0x500;
        const std::vector<double> mults{10.0, 20.0, 40.0, 100.0};
        for (double mult : mults) {
            SpectrumSpec spec = detail::family_spec(m, r, sigma, FamilyType::RankSIdentity,
                                                    mult * unit, 0.0, r, 17);
            ModelInstance model = build_model(spec);
            RngStream stream(cfg.seed, stream_id++);
            DeltaReport rep = estimate_delta(model, 2000, stream, true, cfg.threads);
            rec.record("plateau_point", mult, rep.delta.mean, rep.delta.stderr_, rep.normalized);
            if (mult == mults.front()) norm_first = rep.normalized;
            if (mult == mults.back()) norm_last = rep.normalized;
            norm_max = std::max(norm_max, rep.normalized);
        }
        rec.record("empirical_c4", norm_max);
        chk.require(norm_last <= 2.0 * norm_first,
                    "normalized delta at alpha=100 exceeds twice its value at alpha=10");
    });
}

// --------------------------------------------------------------------------
// Criterion 6: general kernel coverage over random Custom spectra; the
// battery max of delta / kernel is the recorded empirical constant and must
// be stable across two independent seeds.
// --------------------------------------------------------------------------
inline CriterionResult run_general_kernel(const SuiteConfig& cfg) {
    return detail::timed("general-kernel", 600.0,
                         [&](detail::Recorder& rec, detail::Checker& chk) {
        const int m = 40;
        const double sigma = 1.0;
        const int ranks[] = {1, 2, 5};
        // Spectra are fixed independently of the run seed.
        RngStream gen(0x6E4Eu, 0);
        std::vector<SpectrumSpec> specs;
        std::vector<double> kernels;
        for (int k = 0; k < 20; ++k) {
            const int r = ranks[k % 3];
            SpectrumSpec spec = detail::random_custom_spec(m, r, sigma, gen);
            std::vector<double> spectrum = spec.spectrum();
            GeneralTerms terms = general_terms(spectrum, sigma, m, r);
            specs.push_back(std::move(spec));
            kernels.push_back(terms.kernel);
        }
        double max_ratio[2] = {0.0, 0.0};
        for (int run = 0; run < 2; ++run) {
            const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(run);
            for (std::size_t k = 0; k < specs.size(); ++k) {
                ModelInstance model = build_model(specs[k]);
                RngStream stream(seed, 0x600u + k);
                DeltaReport rep = estimate_delta(model, 2000, stream, true, cfg.threads);
                const double ratio = rep.delta.mean / kernels[k];
                rec.record("kernel_ratio", run, k, rep.delta.mean, kernels[k], ratio);
                chk.require(std::isfinite(ratio), "ratio not finite");
                max_ratio[run] = std::max(max_ratio[run], ratio);
            }
        }
        rec.record("empirical_kernel_constant", max_ratio[0], max_ratio[1]);
        chk.require(max_ratio[0] <= 10.0, "battery-max ratio above 10 (seed A)");
        chk.require(max_ratio[1] <= 10.0, "battery-max ratio above 10 (seed B)");
        const double spread = std::abs(max_ratio[0] - max_ratio[1]);
        chk.require(spread <= 0.25 * std::max(max_ratio[0], max_ratio[1]),
                    "battery-max ratio unstable across seeds (> 25%)");
    });
}

// --------------------------------------------------------------------------
// Criterion 7: variance formulas for the quadratic-functional estimators.
// --------------------------------------------------------------------------
inline CriterionResult run_variance_formulas(const SuiteConfig& cfg) {
    return detail::timed("variance-formulas", 120.0,
                         [&](detail::Recorder& rec, detail::Checker& chk) {
        // Rank-r model, so ||C||^2 = ||pi_r C||^2 and the lowrank formula
        // applies verbatim.
        SpectrumSpec spec = detail::family_spec(20, 2, 1.0, FamilyType::RankSIdentity, 3.0, 0.0,
                                                2, 23);
        ModelInstance model = build_model(spec);
        RngStream stream(cfg.seed, 0x700);
        std::vector<EstimatorReport> reports = bias_study(model, 10000, stream, cfg.threads);
        for (const EstimatorReport& report : reports) {
            if (!report.variance_formula || !report.variance_mc) continue;
            const double formula = *report.variance_formula;
            const double mc = report.variance_mc->mean;
            rec.record("variance", report.name, mc, formula);
            chk.require(std::abs(mc - formula) <= 0.10 * formula,
                        report.name + ": MC variance off formula by more than 10%");
        }
    });
}

// --------------------------------------------------------------------------
// Criterion 8: the explicit rank-one lower-bound construction.
// --------------------------------------------------------------------------
inline CriterionResult run_gamma_star(const SuiteConfig& cfg) {
    return detail::timed("gamma-star", 60.0, [&](detail::Recorder& rec, detail::Checker& chk) {
        const int m = 50;
        const double sigma = 1.0;
        const double lambda1 = 3.0 * std::sqrt(50.0);
        const double d = 0.25;
        GammaStar gs = gamma_star_construction(lambda1, sigma, m, d);
        rec.record("gamma_star_closed_form", gs.delta_ss, gs.closed_form_expectation,
                   gs.lower_kernel);
        chk.require(gs.closed_form_expectation >= gs.lower_kernel,
                    "closed form below the lower kernel");

        const std::size_t reps = 5000;
        std::vector<double> values(reps);
        RngStream stream(cfg.seed, 0x800);
        parallel_for(reps, cfg.threads, [&](std::size_t i) {
            RngStream si = stream.substream(i);
            // Only the first noise column enters the objective.
            std::vector<double> col(static_cast<std::size_t>(m));
            for (auto& v : col) v = sigma * si.normal();
            double inner = gs.gamma1 * col[0];  // gamma1^2 E_11 after the outer factor
            double tail = 0.0;
            for (int i2 = 1; i2 < m; ++i2)
                tail += (col[static_cast<std::size_t>(i2)] >= 0.0 ? 1.0 : -1.0) *
                        gs.gamma_tail_abs * col[static_cast<std::size_t>(i2)];
            values[i] = 2.0 * lambda1 * gs.gamma1 * (inner + tail) - d * sigma * sigma * (m - 1);
        });
        MCEstimate est = MCEstimate::from_samples(values);
        rec.record("gamma_star_mc", est.mean, est.stderr_);
        chk.require(std::abs(est.mean - gs.closed_form_expectation) <= 3.0 * est.stderr_,
                    "MC mean of the construction objective off the closed form");
    });
}

// --------------------------------------------------------------------------
// Criterion 9: zero violations of the energy-gap ball inclusions.
// --------------------------------------------------------------------------
inline CriterionResult run_inclusions(const SuiteConfig& cfg) {
    return detail::timed("inclusions", 300.0, [&](detail::Recorder& rec, detail::Checker& chk) {
        std::vector<SpectrumSpec> specs;
        specs.push_back(detail::family_spec(6, 2, 1.0, FamilyType::Step, 2.0, 1.0, 0, 31));
        specs.push_back(detail::family_spec(5, 1, 1.0, FamilyType::Step, 3.0, 0.5, 0, 32));
        specs.push_back(detail::family_spec(8, 3, 1.0, FamilyType::RankSIdentity, 4.0, 0.0, 3, 33));
        specs.push_back(detail::family_spec(7, 2, 1.0, FamilyType::ScaledIdentity, 2.5, 0.0, 0, 34));
        RngStream gen(0x9A11u, 0);
        for (int k = 0; k < 5; ++k)
            specs.push_back(detail::random_custom_spec(5 + k % 3, 1 + k % 2, 1.0, gen));
        {
            // Multiplicity at the cut: lambda_r = lambda_{r+1} > 0.
            SpectrumSpec spec;
            spec.m = 6;
            spec.r = 2;
            spec.sigma = 1.0;
            spec.family.type = FamilyType::Custom;
            spec.family.values = {3.0, 2.0, 2.0, 1.0, 0.5, 0.0};
            spec.rotation.mode = RotationMode::Haar;
            spec.rotation.seed = 35;
            specs.push_back(std::move(spec));
        }
        const std::vector<double> delta_grid{0.1, 1.0, 10.0};
        for (std::size_t k = 0; k < specs.size(); ++k) {
            ModelInstance model = build_model(specs[k]);
            RngStream stream(cfg.seed, 0x900u + k);
            InclusionCheck check = check_inclusions(model, delta_grid, 10000, stream);
            rec.record("inclusions", k, check.checks, check.upper_violations,
                       check.lower_violations);
            chk.require(check.violations() == 0,
                        "spec " + std::to_string(k) + ": " +
                            std::to_string(check.violations()) + " violations");
        }
    });
}

// --------------------------------------------------------------------------
// Criterion 10: packing counts strictly increase under radius halving.
// --------------------------------------------------------------------------
inline CriterionResult run_packing(const SuiteConfig& cfg) {
    return detail::timed("packing", 120.0, [&](detail::Recorder& rec, detail::Checker& chk) {
        struct Config {
            int m, r;
            double radius0;
        };
        const Config configs[] = {{4, 1, 1.2}, {6, 2, 1.6}};
        std::uint64_t stream_id = 0xA00;
        for (const Config& c : configs) {
            for (ProjectorMetric metric : {ProjectorMetric::S2, ProjectorMetric::SInf}) {
                std::size_t prev = 0;
                for (int h = 0; h < 3; ++h) {
                    const double radius = c.radius0 / std::pow(2.0, h);
                    RngStream stream(cfg.seed, stream_id++);
                    PackingResult pack =
                        greedy_packing(c.m, c.r, radius, metric, 4000, 200, stream);
                    rec.record("packing", c.m, c.r,
                               metric == ProjectorMetric::S2 ? "S2" : "Sinf", radius,
                               pack.centers.size());
                    if (h > 0)
                        chk.require(pack.centers.size() > prev,
                                    "M=" + std::to_string(c.m) + " r=" + std::to_string(c.r) +
                                        ": packing count did not increase at halved radius");
                    prev = pack.centers.size();
                }
            }
        }
    });
}

// --------------------------------------------------------------------------
// Criterion 11: empirical bias floor delta >= 0.3 delta_0 across a 10-spec
// battery at M = 50, r = 1.
// --------------------------------------------------------------------------
inline CriterionResult run_bias_floor(const SuiteConfig& cfg) {
    return detail::timed("bias-floor", 300.0, [&](detail::Recorder& rec, detail::Checker& chk) {
        const int m = 50;
        const double sigma = 1.0;
        const double unit = sigma * std::sqrt(static_cast<double>(m));
        ModelInstance zero = build_model(detail::zero_spec(m, 1, sigma));
        RngStream zstream(cfg.seed, 0xB00);
        DeltaReport delta0 = estimate_delta(zero, 2000, zstream, false, cfg.threads);
        rec.record("bias_floor_delta0", delta0.delta.mean, delta0.delta.stderr_);

        std::vector<SpectrumSpec> specs;
        specs.push_back(detail::zero_spec(m, 1, sigma));
        specs.push_back(detail::family_spec(m, 1, sigma, FamilyType::ScaledIdentity, 0.5 * unit));
        specs.push_back(detail::family_spec(m, 1, sigma, FamilyType::ScaledIdentity, 5.0 * unit));
        specs.push_back(
            detail::family_spec(m, 1, sigma, FamilyType::RankSIdentity, 3.0 * unit, 0.0, 1, 41));
        specs.push_back(
            detail::family_spec(m, 1, sigma, FamilyType::RankSIdentity, 20.0 * unit, 0.0, 1, 42));
        specs.push_back(
            detail::family_spec(m, 1, sigma, FamilyType::RankSIdentity, 10.0 * unit, 0.0, 5, 43));
        specs.push_back(
            detail::family_spec(m, 1, sigma, FamilyType::Step, 2.0 * unit, 1.0 * unit, 0, 44));
        specs.push_back(
            detail::family_spec(m, 1, sigma, FamilyType::Step, 10.0 * unit, 0.5 * unit, 0, 45));
        {
            SpectrumSpec spec;
            spec.m = m;
            spec.r = 1;
            spec.sigma = sigma;
            spec.family.type = FamilyType::Custom;
            spec.family.values.resize(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i)
                spec.family.values[static_cast<std::size_t>(i)] = 2.0 * unit / (i + 1);
            spec.rotation.mode = RotationMode::Haar;
            spec.rotation.seed = 46;
            specs.push_back(std::move(spec));
        }
        RngStream gen(0xB10F100Bu, 0);
        specs.push_back(detail::random_custom_spec(m, 1, sigma, gen));

        for (std::size_t k = 0; k < specs.size(); ++k) {
            ModelInstance model = build_model(specs[k]);
            RngStream stream(cfg.seed, 0xB10u + k);
            DeltaReport rep = estimate_delta(model, 1500, stream, true, cfg.threads);
            const double floor = 0.3 * delta0.delta.mean;
            const double slack =
                3.0 * (rep.delta.stderr_ + 0.3 * delta0.delta.stderr_);
            rec.record("bias_floor", k, rep.delta.mean, rep.delta.stderr_, floor);
            chk.require(rep.delta.mean >= floor - slack,
                        "spec " + std::to_string(k) + ": delta below 0.3 delta0");
        }
    });
}

// --------------------------------------------------------------------------
// Suite registry and the determinism rerun (criterion 12).
// --------------------------------------------------------------------------

inline std::vector<std::string> suite_names() {
    return {"baseline",       "fixed-projection", "weak-accuracy-paired",
            "weak-accuracy-slope", "high-accuracy-plateau", "general-kernel",
            "variance-formulas",   "gamma-star",       "inclusions",
            "packing",             "bias-floor"};
}

inline CriterionResult run_one(const std::string& name, const SuiteConfig& cfg) {
    if (name == "baseline") return run_baseline(cfg);
    if (name == "fixed-projection") return run_fixed_projection(cfg);
    if (name == "weak-accuracy-paired") return run_weak_accuracy_paired(cfg);
    if (name == "weak-accuracy-slope") return run_weak_accuracy_slope(cfg);
    if (name == "high-accuracy-plateau") return run_high_accuracy_plateau(cfg);
    if (name == "general-kernel") return run_general_kernel(cfg);
    if (name == "variance-formulas") return run_variance_formulas(cfg);
    if (name == "gamma-star") return run_gamma_star(cfg);
    if (name == "inclusions") return run_inclusions(cfg);
    if (name == "packing") return run_packing(cfg);
    if (name == "bias-floor") return run_bias_floor(cfg);
    if (name == "weak-accuracy") {
        CriterionResult a = run_weak_accuracy_paired(cfg);
        CriterionResult b = run_weak_accuracy_slope(cfg);
        CriterionResult out;
        out.name = "weak-accuracy";
        out.pass = a.pass && b.pass;
        out.detail = a.detail + (a.detail.empty() || b.detail.empty() ? "" : "; ") + b.detail;
        out.seconds = a.seconds + b.seconds;
        out.limit_seconds = a.limit_seconds + b.limit_seconds;
        out.artifact = a.artifact + b.artifact;
        return out;
    }
    throw ArgumentError("unknown suite name: " + name);
}

/// Rerun a suite with a different worker count and require byte-identical
/// numeric artifacts.
inline CriterionResult run_determinism(const SuiteConfig& cfg,
                                       const std::vector<CriterionResult>& reference) {
    CriterionResult out;
    out.name = "determinism";
    out.pass = true;
    out.limit_seconds = 3600.0;
    const auto t0 = std::chrono::steady_clock::now();
    SuiteConfig alt = cfg;
    alt.threads = cfg.threads == 3 ? 2 : 3;
    std::string artifact;
    for (const CriterionResult& ref : reference) {
        CriterionResult rerun = run_one(ref.name, alt);
        artifact += rerun.artifact;
        if (rerun.artifact != ref.artifact) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + ref.name +
                          ": artifact differs across thread counts";
        }
    }
    out.artifact = std::move(artifact);
    const auto t1 = std::chrono::steady_clock::now();
    out.seconds = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

inline std::vector<CriterionResult> run_all(const SuiteConfig& cfg,
                                            bool with_determinism = true) {
    std::vector<CriterionResult> results;
    for (const std::string& name : suite_names()) results.push_back(run_one(name, cfg));
    if (with_determinism) results.push_back(run_determinism(cfg, results));
    return results;
}

}  // namespace spl::suite
