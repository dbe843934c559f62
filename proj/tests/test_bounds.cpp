#include <cmath>
#include <vector>

#include "doctest.h"
#include "spl/bounds.hpp"

namespace {

std::vector<double> padded(std::vector<double> head, int m) {
    head.resize(static_cast<std::size_t>(m), 0.0);
    return head;
}

spl::ModelInstance model_for(spl::FamilyType type, int m, int r, double sigma, double alpha,
                             double beta = 0.0, int s = 0) {
    spl::SpectrumSpec spec;
    spec.m = m;
    spec.r = r;
    spec.sigma = sigma;
    spec.family.type = type;
    spec.family.alpha = alpha;
    spec.family.beta = beta;
    spec.family.s = s;
    spec.rotation.mode = spl::RotationMode::Identity;
    return spl::build_model(spec);
}

}  // namespace

TEST_CASE("universal kernel") {
    const std::vector<double> spectrum = padded({5.0}, 100);
    // sigma^2 r M + sigma r sqrt(M) lambda_1 = 100 + 50
    CHECK(spl::universal_kernel(spectrum, 1.0, 100, 1) == doctest::Approx(150.0));
    CHECK_THROWS_AS(spl::universal_kernel(spectrum, 0.0, 100, 1), spl::ArgumentError);
}

TEST_CASE("general kernel terms on the (2, 1, 0, ...) spectrum") {
    const std::vector<double> spectrum = padded({2.0, 1.0}, 100);
    const spl::GeneralTerms terms = spl::general_terms(spectrum, 1.0, 100, 1);
    CHECK(terms.term_i == doctest::Approx(1.0));
    CHECK(terms.term_ii == doctest::Approx(0.1));
    CHECK(terms.term_iii == doctest::Approx(4.0 / 3.0));
    CHECK(terms.kernel == doctest::Approx(110.0));
}

TEST_CASE("general kernel scope and degeneracies") {
    // Multiplicity at the cut: III = inf, the min falls back to II.
    const std::vector<double> tied = padded({2.0, 2.0, 2.0}, 16);
    const spl::GeneralTerms terms = spl::general_terms(tied, 1.0, 16, 2);
    CHECK(std::isinf(terms.term_iii));
    CHECK(terms.kernel == doctest::Approx(1.0 * 2 * 16 * (terms.term_i + terms.term_ii)));

    CHECK_THROWS_AS(spl::general_terms(padded({0.0}, 4), 1.0, 4, 1), spl::ArgumentError);
    // r > M - r is out of scope except r = 1.
    CHECK_THROWS_AS(spl::general_terms(padded({2.0, 2.0, 2.0}, 4), 1.0, 4, 3),
                    spl::ArgumentError);
    CHECK_NOTHROW(spl::general_terms(padded({2.0}, 2), 1.0, 2, 1));
}

TEST_CASE("general kernel is 2-homogeneous in (spectrum, sigma)") {
    const std::vector<double> spectrum = padded({3.0, 2.0, 1.5, 1.0}, 12);
    std::vector<double> doubled = spectrum;
    for (auto& v : doubled) v *= 2.0;
    const double base = spl::general_terms(spectrum, 0.7, 12, 2).kernel;
    const double scaled = spl::general_terms(doubled, 1.4, 12, 2).kernel;
    CHECK(scaled == doctest::Approx(4.0 * base).epsilon(1e-12));
}

TEST_CASE("step kernel values and edge cases") {
    // sigma^2 r M (1 + min(4/3, 1/10))
    CHECK(spl::step_kernel(2.0, 1.0, 1.0, 100, 1) == doctest::Approx(110.0));
    // beta = 0: second term vanishes.
    CHECK(spl::step_kernel(2.0, 0.0, 1.0, 100, 1) == doctest::Approx(100.0));
    // beta = alpha: the gap term is c/0 = inf, the min picks beta/(sigma sqrt(M)).
    CHECK(spl::step_kernel(2.0, 2.0, 1.0, 100, 1) == doctest::Approx(100.0 * (1.0 + 0.2)));
    CHECK_THROWS_AS(spl::step_kernel(0.0, 0.0, 1.0, 4, 1), spl::ArgumentError);
    CHECK_THROWS_AS(spl::step_kernel(1.0, 2.0, 1.0, 4, 1), spl::ArgumentError);
}

TEST_CASE("the general kernel specializes to the step kernel on step spectra") {
    for (double beta : {0.0, 0.5, 1.7, 3.0}) {
        const int m = 30, r = 3;
        const double alpha = 3.0, sigma = 0.8;
        std::vector<double> spectrum(m, beta);
        for (int i = 0; i < r; ++i) spectrum[static_cast<std::size_t>(i)] = alpha;
        const double general = spl::general_terms(spectrum, sigma, m, r).kernel;
        const double step = spl::step_kernel(alpha, beta, sigma, m, r);
        CHECK(general == doctest::Approx(step).epsilon(1e-12));
    }
}

TEST_CASE("small amplitude floor") {
    const spl::MCEstimate delta0 = spl::MCEstimate::exact(280.0, 1000);
    // delta0 - kappa^2 sigma^2 r M = 280 - 0.25 * 100
    CHECK(spl::small_amplitude_floor(0.5, 1.0, 100, 1, delta0) == doctest::Approx(255.0));
    CHECK(spl::small_amplitude_floor(2.0, 1.0, 100, 1, delta0) < 0.0);  // vacuous, returned as-is
    CHECK_THROWS_AS(spl::small_amplitude_floor(0.0, 1.0, 100, 1, delta0), spl::ArgumentError);
}

TEST_CASE("gamma star construction closed form") {
    const int m = 50;
    const double lambda1 = 3.0 * std::sqrt(50.0), sigma = 1.0, d = 0.25;
    const spl::GammaStar gs = spl::gamma_star_construction(lambda1, sigma, m, d);
    const double dss = d * (m - 1) * sigma * sigma / (2.0 * lambda1 * lambda1);
    CHECK(gs.delta_ss == doctest::Approx(dss));
    CHECK(gs.gamma1 == doctest::Approx(std::sqrt(1.0 - dss)));
    CHECK(gs.gamma_tail_abs == doctest::Approx(std::sqrt(dss / (m - 1))));
    const double expect = 2.0 * lambda1 * sigma * std::sqrt(dss * (1.0 - dss)) *
                              std::sqrt(49.0) * std::sqrt(2.0 / M_PI) -
                          d * sigma * sigma * 49.0;
    CHECK(gs.closed_form_expectation == doctest::Approx(expect));
    CHECK(gs.lower_kernel ==
          doctest::Approx((2.0 * 0.5 / std::sqrt(2.0 * M_PI) - 0.25) * 49.0));
    CHECK(gs.closed_form_expectation >= gs.lower_kernel);

    CHECK_THROWS_AS(spl::gamma_star_construction(lambda1, sigma, 1, d),
                    spl::ConstructionError);
    CHECK_THROWS_AS(spl::gamma_star_construction(lambda1, sigma, m, 1.5),
                    spl::ConstructionError);
    CHECK_THROWS_AS(spl::gamma_star_construction(0.1, sigma, m, d), spl::ConstructionError);
}

TEST_CASE("bound report picks the applicable kernels") {
    // Step spectrum at the cut: all four upper kernels present for r = 1.
    const spl::ModelInstance step = model_for(spl::FamilyType::Step, 25, 1, 1.0, 10.0, 1.0);
    const spl::MCEstimate delta0 = spl::MCEstimate::exact(60.0, 1000);
    spl::BoundReport report = spl::bound_report(step, delta0, 1.0);
    CHECK(report.universal.has_value());
    CHECK(report.general.has_value());
    CHECK(report.step.has_value());
    CHECK(report.floor.has_value());
    CHECK(report.r1_lower.has_value());
    CHECK(*report.step == doctest::Approx(report.general->kernel).epsilon(1e-12));

    // Scaled identity is a step with beta = alpha.
    const spl::ModelInstance scaled =
        model_for(spl::FamilyType::ScaledIdentity, 10, 2, 1.0, 2.0);
    report = spl::bound_report(scaled);
    CHECK(report.step.has_value());
    CHECK(report.floor_absent_reason == "no delta0 estimate supplied");
    CHECK(report.r1_lower_absent_reason == "r != 1");

    // Rank below the projection rank: the general kernel is out.
    const spl::ModelInstance thin =
        model_for(spl::FamilyType::RankSIdentity, 10, 3, 1.0, 2.0, 0.0, 1);
    report = spl::bound_report(thin);
    CHECK_FALSE(report.general.has_value());
    CHECK(report.general_absent_reason == "lambda_r = 0 (rank < r)");
    CHECK_FALSE(report.step.has_value());

    // sigma = 0 disables every noise kernel.
    const spl::ModelInstance clean = model_for(spl::FamilyType::ScaledIdentity, 6, 1, 0.0, 2.0);
    report = spl::bound_report(clean);
    CHECK_FALSE(report.universal.has_value());
    CHECK_FALSE(report.general.has_value());
    CHECK(report.universal_absent_reason == "sigma = 0");

    // Pure noise with r = 1: lambda_1 = 0 is below the construction's reach.
    const spl::ModelInstance zero = model_for(spl::FamilyType::Zero, 6, 1, 1.0, 0.0);
    report = spl::bound_report(zero);
    CHECK_FALSE(report.r1_lower.has_value());
}

TEST_CASE("bound report json spells infinities") {
    // Multiplicity at the cut puts III at inf.
    const spl::ModelInstance model =
        model_for(spl::FamilyType::RankSIdentity, 12, 1, 1.0, 2.0, 0.0, 3);
    const nlohmann::json j = spl::bound_report_to_json(spl::bound_report(model));
    CHECK(j.at("general").at("III") == "inf");
    CHECK(j.at("general").at("I").is_number());
    CHECK(j.at("small_amplitude_floor").contains("absent"));
}
