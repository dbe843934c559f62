#pragma once

#include <cmath>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "spl/common.hpp"
#include "spl/matrix.hpp"
#include "spl/rng.hpp"

namespace spl {

enum class FamilyType { Zero, ScaledIdentity, RankSIdentity, Step, Custom };

/// Singular-spectrum family of the deterministic matrix C.
/// Negative amplitudes are accepted and stored as magnitudes: singular
/// values are non-negative and only |alpha| matters.
struct Family {
    FamilyType type = FamilyType::Zero;
    double alpha = 0.0;
    double beta = 0.0;
    int s = 0;                   // rank of RankSIdentity
    std::vector<double> values;  // Custom spectrum, non-increasing
};

enum class RotationMode { Identity, Haar };

struct Rotation {
    RotationMode mode = RotationMode::Haar;
    std::uint64_t seed = 0;
};

/// Declarative description of C: dimension, projection rank, noise level,
/// spectrum family and rotation of the singular bases.
struct SpectrumSpec {
    int m = 0;
    int r = 1;
    double sigma = 1.0;
    Family family;
    Rotation rotation;

    void validate() const {
        if (m < 1) throw SpecError("SpectrumSpec.m: must be >= 1");
        if (r < 1 || r > m) throw SpecError("SpectrumSpec.r: need 1 <= r <= m");
        if (sigma < 0.0) throw SpecError("SpectrumSpec.sigma: must be >= 0");
        switch (family.type) {
            case FamilyType::Zero:
            case FamilyType::ScaledIdentity:
                break;
            case FamilyType::RankSIdentity:
                if (family.s < 1 || family.s > m)
                    throw SpecError("SpectrumSpec.family.s: need 1 <= s <= m");
                break;
            case FamilyType::Step:
                if (family.beta < 0.0 || family.beta > std::abs(family.alpha))
                    throw SpecError("SpectrumSpec.family.beta: need 0 <= beta <= alpha");
                break;
            case FamilyType::Custom: {
                if (static_cast<int>(family.values.size()) != m)
                    throw SpecError("SpectrumSpec.family.values: length must equal m");
                for (std::size_t i = 0; i < family.values.size(); ++i) {
                    if (family.values[i] < 0.0)
                        throw SpecError("SpectrumSpec.family.values: entries must be >= 0");
                    if (i > 0 && family.values[i] > family.values[i - 1] + 1e-15)
                        throw SpecError("SpectrumSpec.family.values: must be non-increasing");
                }
                break;
            }
        }
    }

    /// The declared spectrum lambda_1 >= ... >= lambda_M.
    std::vector<double> spectrum() const {
        validate();
        std::vector<double> out(static_cast<std::size_t>(m), 0.0);
        switch (family.type) {
            case FamilyType::Zero:
                break;
            case FamilyType::ScaledIdentity:
                for (auto& v : out) v = std::abs(family.alpha);
                break;
            case FamilyType::RankSIdentity:
                for (int i = 0; i < family.s; ++i) out[i] = std::abs(family.alpha);
                break;
            case FamilyType::Step:
                for (int i = 0; i < m; ++i) out[i] = i < r ? std::abs(family.alpha) : family.beta;
                break;
            case FamilyType::Custom:
                out = family.values;
                break;
        }
        return out;
    }
};

/// C together with a cached SVD matching the declared spectrum.
struct ModelInstance {
    Matrix c;
    SvdResult svd_of_c;
    SpectrumSpec spec;
};

inline ModelInstance build_model(const SpectrumSpec& spec) {
    spec.validate();
    const std::vector<double> lambda = spec.spectrum();
    Vector lam(spec.m);
    for (int i = 0; i < spec.m; ++i) lam(i) = lambda[static_cast<std::size_t>(i)];

    Matrix u, v;
    if (spec.rotation.mode == RotationMode::Identity) {
        u = Matrix::Identity(spec.m, spec.m);
        v = Matrix::Identity(spec.m, spec.m);
    } else {
        RngStream su(spec.rotation.seed, 0);
        RngStream sv(spec.rotation.seed, 1);
        u = haar_orthogonal(spec.m, su);
        v = haar_orthogonal(spec.m, sv);
        detail::fix_svd_signs(u, v);
    }
    ModelInstance out;
    out.c = u * lam.asDiagonal() * v.transpose();
    out.svd_of_c = SvdResult{std::move(u), std::move(lam), std::move(v)};
    out.spec = spec;
    return out;
}

/// One observation X = C + E with E ~ iid N(0, sigma^2).
inline Matrix sample_observation(const ModelInstance& model, RngStream& stream) {
    if (model.spec.sigma == 0.0) return model.c;
    return model.c + sample_gaussian(model.spec.m, model.spec.sigma, stream);
}

// ---------------------------------------------------------------------------
// JSON schema:
//   {"m": int, "r": int, "sigma": float,
//    "family": {"type": "zero"|"scaled_identity"|"rank_s_identity"|"step"|"custom",
//               "alpha": float?, "beta": float?, "s": int?, "values": [float]?},
//    "rotation": {"mode": "identity"|"haar", "seed": int?}}
// Unknown keys are rejected.
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw SpecError(where + ": unknown key \"" + it.key() + "\"");
    }
}

}  // namespace detail

inline SpectrumSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("SpectrumSpec: expected a JSON object");
    detail::reject_unknown_keys(j, {"m", "r", "sigma", "family", "rotation"}, "SpectrumSpec");
    SpectrumSpec spec;
    spec.m = j.at("m").get<int>();
    spec.r = j.at("r").get<int>();
    spec.sigma = j.at("sigma").get<double>();

    const nlohmann::json& fam = j.at("family");
    detail::reject_unknown_keys(fam, {"type", "alpha", "beta", "s", "values"},
                                "SpectrumSpec.family");
    const std::string type = fam.at("type").get<std::string>();
    if (type == "zero") {
        spec.family.type = FamilyType::Zero;
    } else if (type == "scaled_identity") {
        spec.family.type = FamilyType::ScaledIdentity;
        spec.family.alpha = fam.at("alpha").get<double>();
    } else if (type == "rank_s_identity") {
        spec.family.type = FamilyType::RankSIdentity;
        spec.family.alpha = fam.at("alpha").get<double>();
        spec.family.s = fam.at("s").get<int>();
    } else if (type == "step") {
        spec.family.type = FamilyType::Step;
        spec.family.alpha = fam.at("alpha").get<double>();
        spec.family.beta = fam.at("beta").get<double>();
    } else if (type == "custom") {
        spec.family.type = FamilyType::Custom;
        spec.family.values = fam.at("values").get<std::vector<double>>();
    } else {
        throw SpecError("SpectrumSpec.family.type: unknown type \"" + type + "\"");
    }

    if (j.contains("rotation")) {
        const nlohmann::json& rot = j.at("rotation");
        detail::reject_unknown_keys(rot, {"mode", "seed"}, "SpectrumSpec.rotation");
        const std::string mode = rot.at("mode").get<std::string>();
        if (mode == "identity")
            spec.rotation.mode = RotationMode::Identity;
        else if (mode == "haar")
            spec.rotation.mode = RotationMode::Haar;
        else
            throw SpecError("SpectrumSpec.rotation.mode: unknown mode \"" + mode + "\"");
        if (rot.contains("seed")) spec.rotation.seed = rot.at("seed").get<std::uint64_t>();
    }
    spec.validate();
    return spec;
}

inline nlohmann::json spec_to_json(const SpectrumSpec& spec) {
    nlohmann::json fam;
    switch (spec.family.type) {
        case FamilyType::Zero:
            fam = {{"type", "zero"}};
            break;
        case FamilyType::ScaledIdentity:
            fam = {{"type", "scaled_identity"}, {"alpha", spec.family.alpha}};
            break;
        case FamilyType::RankSIdentity:
            fam = {{"type", "rank_s_identity"}, {"alpha", spec.family.alpha}, {"s", spec.family.s}};
            break;
        case FamilyType::Step:
            fam = {{"type", "step"}, {"alpha", spec.family.alpha}, {"beta", spec.family.beta}};
            break;
        case FamilyType::Custom:
            fam = {{"type", "custom"}, {"values", spec.family.values}};
            break;
    }
    return nlohmann::json{
        {"m", spec.m},
        {"r", spec.r},
        {"sigma", spec.sigma},
        {"family", fam},
        {"rotation",
         {{"mode", spec.rotation.mode == RotationMode::Identity ? "identity" : "haar"},
          {"seed", spec.rotation.seed}}}};
}

/// Short human-readable tag for CSV/report rows.
inline std::string family_name(const SpectrumSpec& spec) {
    switch (spec.family.type) {
        case FamilyType::Zero: return "zero";
        case FamilyType::ScaledIdentity: return "scaled_identity";
        case FamilyType::RankSIdentity: return "rank_s_identity";
        case FamilyType::Step: return "step";
        case FamilyType::Custom: return "custom";
    }
    return "?";
}

}  // namespace spl
