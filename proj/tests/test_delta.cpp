#include <sstream>

#include "doctest.h"
#include "spl/delta.hpp"
#include "spl/grassmann.hpp"

namespace {

spl::SpectrumSpec scaled_spec(int m, int r, double sigma, double alpha) {
    spl::SpectrumSpec spec;
    spec.m = m;
    spec.r = r;
    spec.sigma = sigma;
    spec.family.type = spl::FamilyType::ScaledIdentity;
    spec.family.alpha = alpha;
    spec.rotation.mode = spl::RotationMode::Identity;
    return spec;
}

}  // namespace

TEST_CASE("estimate_delta is exact at sigma = 0") {
    const spl::ModelInstance model = spl::build_model(scaled_spec(6, 2, 0.0, 3.0));
    spl::RngStream stream(1, 0);
    const spl::DeltaReport rep = spl::estimate_delta(model, 100, stream);
    CHECK(rep.delta.mean == 0.0);
    CHECK(rep.delta.stderr_ == 0.0);
    CHECK(rep.normalized == 0.0);
}

TEST_CASE("the empirical projector never loses to the oracle pathwise") {
    const spl::ModelInstance model = spl::build_model(scaled_spec(12, 2, 1.0, 2.0));
    const spl::RankRProjector pi = spl::oracle_projector(model);
    spl::RngStream stream(3, 0);
    for (int i = 0; i < 50; ++i) {
        spl::RngStream si = stream.substream(static_cast<std::uint64_t>(i));
        const spl::Matrix x = spl::sample_observation(model, si);
        const spl::RankRProjector hat = spl::empirical_projector(x, 2);
        CHECK(spl::projected_energy(x, hat) + 1e-9 >= spl::projected_energy(x, pi));
    }
}

TEST_CASE("estimate_delta is deterministic in (seed, config), not in threads") {
    const spl::ModelInstance model = spl::build_model(scaled_spec(10, 1, 1.0, 1.5));
    spl::RngStream s1(42, 0), s2(42, 0), s3(43, 0);
    const spl::DeltaReport a = spl::estimate_delta(model, 200, s1, true, 1);
    const spl::DeltaReport b = spl::estimate_delta(model, 200, s2, true, 3);
    const spl::DeltaReport c = spl::estimate_delta(model, 200, s3, true, 1);
    CHECK(a.delta.mean == b.delta.mean);
    CHECK(a.delta.stderr_ == b.delta.stderr_);
    CHECK(a.delta.mean != c.delta.mean);
    CHECK(a.seed == 42);
    CHECK_THROWS_AS(spl::estimate_delta(model, 1, s1), spl::ArgumentError);
}

TEST_CASE("antithetic pairing reduces variance at large amplitude") {
    // For a dominant spike the fluctuation of the projected energy is
    // mostly the odd linear term 2 lambda_1 u^T E v, which the pairing
    // cancels.
    spl::SpectrumSpec spike;
    spike.m = 20;
    spike.r = 1;
    spike.sigma = 1.0;
    spike.family.type = spl::FamilyType::RankSIdentity;
    spike.family.alpha = 30.0;
    spike.family.s = 1;
    spike.rotation.mode = spl::RotationMode::Identity;
    const spl::ModelInstance model = spl::build_model(spike);
    spl::RngStream s1(5, 0), s2(5, 0);
    const spl::DeltaReport plain = spl::estimate_delta(model, 400, s1, false);
    const spl::DeltaReport anti = spl::estimate_delta(model, 400, s2, true);
    CHECK(anti.delta.stderr_ < 0.5 * plain.delta.stderr_);
}

TEST_CASE("paired_delta_difference requires a shared (M, r, sigma)") {
    const spl::ModelInstance a = spl::build_model(scaled_spec(8, 1, 1.0, 2.0));
    const spl::ModelInstance b = spl::build_model(scaled_spec(8, 2, 1.0, 2.0));
    spl::RngStream stream(1, 0);
    CHECK_THROWS_AS(spl::paired_delta_difference(a, b, 10, stream), spl::ArgumentError);

    const spl::ModelInstance same = spl::build_model(scaled_spec(8, 1, 1.0, 2.0));
    const spl::MCEstimate diff = spl::paired_delta_difference(a, same, 50, stream);
    CHECK(diff.mean == 0.0);  // identical models under common noise
    CHECK(diff.stderr_ == 0.0);
}

TEST_CASE("sweep records invalid grid points and keeps going") {
    spl::SpectrumSpec base = scaled_spec(6, 1, 1.0, 1.0);
    const std::vector<spl::SweepRow> rows =
        spl::sweep(base, spl::SweepParam::M, {4.0, 2.5, 8.0}, 50, 11);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ok);
    CHECK_FALSE(rows[1].ok);
    CHECK(rows[1].error.find("positive integer") != std::string::npos);
    CHECK(rows[2].ok);
    CHECK(rows[2].spec.m == 8);

    // Bad sigma grid point for the sigma sweep.
    const std::vector<spl::SweepRow> srows =
        spl::sweep(base, spl::SweepParam::Sigma, {-1.0, 1.0}, 50, 11);
    CHECK_FALSE(srows[0].ok);
    CHECK(srows[1].ok);
}

TEST_CASE("sweep csv: pinned schema, round-trip, skipped error rows") {
    spl::SpectrumSpec base = scaled_spec(6, 1, 1.0, 1.0);
    const std::vector<spl::SweepRow> rows =
        spl::sweep(base, spl::SweepParam::Alpha, {0.5, -1.0, 2.0}, 50, 7);
    std::stringstream ss;
    spl::write_sweep_csv(rows, ss);
    const spl::CsvTable table = spl::read_csv_table(ss);

    std::stringstream header(spl::kSweepCsvHeader);
    std::string col;
    std::vector<std::string> expected;
    while (std::getline(header, col, ',')) expected.push_back(col);
    CHECK(table.header == expected);
    // alpha = -1 is a valid amplitude (magnitude), so all rows appear.
    CHECK(table.rows.size() == 3);
    for (const auto& row : table.rows) {
        CHECK(row.size() == expected.size());
        CHECK(row[0] == "alpha");
        CHECK(std::stod(row[6]) == std::stod(row[6]));  // parses as a double
    }

    // Identical sweep, identical bytes.
    std::stringstream ss2;
    spl::write_sweep_csv(spl::sweep(base, spl::SweepParam::Alpha, {0.5, -1.0, 2.0}, 50, 7), ss2);
    CHECK(ss.str() == ss2.str());

    // Baselines are shared across rows with equal (m, r, sigma).
    CHECK(rows[0].baseline_delta0_mean == rows[2].baseline_delta0_mean);
}

TEST_CASE("17-digit float formatting round-trips and spells infinities") {
    CHECK(spl::detail::format_double(spl::kInf) == "inf");
    CHECK(spl::detail::format_double(-spl::kInf) == "-inf");
    spl::RngStream stream(2, 0);
    for (int i = 0; i < 100; ++i) {
        const double v = stream.normal() * std::pow(10.0, 20.0 * stream.uniform01() - 10.0);
        CHECK(std::stod(spl::detail::format_double(v)) == v);
    }
}
