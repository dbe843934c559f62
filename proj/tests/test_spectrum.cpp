#include <nlohmann/json.hpp>

#include "doctest.h"
#include "spl/projector.hpp"
#include "spl/spectrum.hpp"

namespace {

spl::SpectrumSpec base_spec(int m, int r, double sigma) {
    spl::SpectrumSpec spec;
    spec.m = m;
    spec.r = r;
    spec.sigma = sigma;
    return spec;
}

}  // namespace

TEST_CASE("family spectra") {
    spl::SpectrumSpec spec = base_spec(4, 2, 1.0);

    spec.family.type = spl::FamilyType::Zero;
    CHECK(spec.spectrum() == std::vector<double>{0.0, 0.0, 0.0, 0.0});

    spec.family.type = spl::FamilyType::ScaledIdentity;
    spec.family.alpha = -3.0;  // amplitude magnitudes only
    CHECK(spec.spectrum() == std::vector<double>{3.0, 3.0, 3.0, 3.0});

    spec.family.type = spl::FamilyType::RankSIdentity;
    spec.family.alpha = 2.0;
    spec.family.s = 3;
    CHECK(spec.spectrum() == std::vector<double>{2.0, 2.0, 2.0, 0.0});

    spec.family.type = spl::FamilyType::Step;
    spec.family.alpha = 2.0;
    spec.family.beta = 1.0;
    CHECK(spec.spectrum() == std::vector<double>{2.0, 2.0, 1.0, 1.0});

    spec.family.type = spl::FamilyType::Custom;
    spec.family.values = {4.0, 2.0, 2.0, 0.5};
    CHECK(spec.spectrum() == spec.family.values);
}

TEST_CASE("spec validation rejects malformed fields") {
    spl::SpectrumSpec spec = base_spec(4, 2, 1.0);
    spec.m = 0;
    CHECK_THROWS_AS(spec.validate(), spl::SpecError);

    spec = base_spec(4, 5, 1.0);
    CHECK_THROWS_AS(spec.validate(), spl::SpecError);

    spec = base_spec(4, 2, -0.5);
    CHECK_THROWS_AS(spec.validate(), spl::SpecError);

    spec = base_spec(4, 2, 1.0);
    spec.family.type = spl::FamilyType::RankSIdentity;
    spec.family.s = 5;
    CHECK_THROWS_AS(spec.validate(), spl::SpecError);

    spec = base_spec(4, 2, 1.0);
    spec.family.type = spl::FamilyType::Step;
    spec.family.alpha = 1.0;
    spec.family.beta = 2.0;  // beta > alpha
    CHECK_THROWS_AS(spec.validate(), spl::SpecError);

    spec = base_spec(4, 2, 1.0);
    spec.family.type = spl::FamilyType::Custom;
    spec.family.values = {1.0, 2.0, 0.5, 0.0};  // not non-increasing
    CHECK_THROWS_AS(spec.validate(), spl::SpecError);

    spec.family.values = {2.0, 1.0};  // wrong length
    CHECK_THROWS_AS(spec.validate(), spl::SpecError);
}

TEST_CASE("build_model realizes the declared spectrum") {
    spl::SpectrumSpec spec = base_spec(6, 2, 1.0);
    spec.family.type = spl::FamilyType::Custom;
    spec.family.values = {5.0, 3.0, 2.0, 1.0, 0.5, 0.0};
    spec.rotation.mode = spl::RotationMode::Haar;
    spec.rotation.seed = 9;
    const spl::ModelInstance model = spl::build_model(spec);

    const spl::Vector sv2 = spl::singular_values_squared(model.c);
    for (int i = 0; i < 6; ++i) {
        const double lam = spec.family.values[static_cast<std::size_t>(i)];
        CHECK(sv2(i) == doctest::Approx(lam * lam).epsilon(1e-9));
    }
    // The cached SVD reconstructs C.
    const spl::Matrix back = model.svd_of_c.left * model.svd_of_c.singulars.asDiagonal() *
                             model.svd_of_c.right.transpose();
    CHECK((back - model.c).norm() < 1e-10);
    CHECK((model.svd_of_c.left.transpose() * model.svd_of_c.left -
           spl::Matrix::Identity(6, 6))
              .norm() < spl::kTolOrth);

    // Identity rotation gives the diagonal representative.
    spec.rotation.mode = spl::RotationMode::Identity;
    const spl::ModelInstance diag = spl::build_model(spec);
    CHECK(diag.c(0, 0) == 5.0);
    CHECK(diag.c(3, 3) == 1.0);
    CHECK(std::abs(diag.c(0, 1)) == 0.0);

    // Same rotation seed, same model; different seed, different rotation.
    spec.rotation.mode = spl::RotationMode::Haar;
    const spl::ModelInstance again = spl::build_model(spec);
    CHECK((again.c - model.c).norm() == 0.0);
    spec.rotation.seed = 10;
    CHECK((spl::build_model(spec).c - model.c).norm() > 1e-3);
}

TEST_CASE("expected projected energy of the step example") {
    spl::SpectrumSpec spec = base_spec(4, 2, 1.0);
    spec.family.type = spl::FamilyType::Step;
    spec.family.alpha = 2.0;
    spec.family.beta = 1.0;
    const spl::ModelInstance model = spl::build_model(spec);
    // 2 * 2^2 + sigma^2 r M = 8 + 8
    CHECK(spl::expected_projected_energy(model) == doctest::Approx(16.0));
}

TEST_CASE("sample_observation with sigma = 0 returns C exactly") {
    spl::SpectrumSpec spec = base_spec(5, 1, 0.0);
    spec.family.type = spl::FamilyType::ScaledIdentity;
    spec.family.alpha = 2.0;
    const spl::ModelInstance model = spl::build_model(spec);
    spl::RngStream stream(1, 0);
    CHECK((spl::sample_observation(model, stream) - model.c).norm() == 0.0);
}

TEST_CASE("spec json round-trip") {
    spl::SpectrumSpec spec = base_spec(8, 3, 0.5);
    spec.family.type = spl::FamilyType::RankSIdentity;
    spec.family.alpha = 2.5;
    spec.family.s = 4;
    spec.rotation.mode = spl::RotationMode::Haar;
    spec.rotation.seed = 77;

    const spl::SpectrumSpec back = spl::spec_from_json(spl::spec_to_json(spec));
    CHECK(back.m == spec.m);
    CHECK(back.r == spec.r);
    CHECK(back.sigma == spec.sigma);
    CHECK(back.family.type == spec.family.type);
    CHECK(back.family.alpha == spec.family.alpha);
    CHECK(back.family.s == spec.family.s);
    CHECK(back.rotation.mode == spec.rotation.mode);
    CHECK(back.rotation.seed == spec.rotation.seed);
}

TEST_CASE("spec json rejects unknown keys and bad enums") {
    using nlohmann::json;
    const json good = {{"m", 4},
                       {"r", 1},
                       {"sigma", 1.0},
                       {"family", {{"type", "zero"}}},
                       {"rotation", {{"mode", "identity"}}}};
    CHECK_NOTHROW(spl::spec_from_json(good));

    json j = good;
    j["extra"] = 1;
    CHECK_THROWS_AS(spl::spec_from_json(j), spl::SpecError);

    j = good;
    j["family"]["frobnicate"] = true;
    CHECK_THROWS_AS(spl::spec_from_json(j), spl::SpecError);

    j = good;
    j["rotation"]["salt"] = 3;
    CHECK_THROWS_AS(spl::spec_from_json(j), spl::SpecError);

    j = good;
    j["family"]["type"] = "diagonal";
    CHECK_THROWS_AS(spl::spec_from_json(j), spl::SpecError);

    j = good;
    j["rotation"]["mode"] = "fixed";
    CHECK_THROWS_AS(spl::spec_from_json(j), spl::SpecError);

    // Missing required family parameter.
    j = good;
    j["family"] = {{"type", "scaled_identity"}};
    CHECK_THROWS(spl::spec_from_json(j));
}
