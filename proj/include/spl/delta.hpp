#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "spl/bounds.hpp"
#include "spl/common.hpp"
#include "spl/mc.hpp"
#include "spl/parallel.hpp"
#include "spl/projector.hpp"
#include "spl/spectrum.hpp"

namespace spl {

/// Monte Carlo estimate of the accuracy gap
///   delta = E ||pi_hat_r X||_{S2}^2 - E ||pi_r X||_{S2}^2
/// for one model, plus the sigma^2 r M normalization.
struct DeltaReport {
    SpectrumSpec spec;
    MCEstimate delta;
    double normalized = 0.0;  // delta.mean / (sigma^2 r M), 0 when sigma = 0
    std::uint64_t seed = 0;
};

/// Per replication: g_n = ||pi_hat_r X_n||^2 - E ||pi_r X||^2, with the
/// oracle side taken in closed form (removes oracle-side MC noise). With
/// antithetic pairing the same draw is evaluated at C + E and C - E and the
/// pair averaged; the odd linear term cancels by Gaussian symmetry.
inline DeltaReport estimate_delta(const ModelInstance& model, std::size_t reps,
                                  const RngStream& stream, bool antithetic = true,
                                  int threads = 1) {
    if (reps < 2) throw ArgumentError("estimate_delta: need reps >= 2");
    const int m = model.spec.m;
    const int r = model.spec.r;
    const double sigma = model.spec.sigma;

    DeltaReport out;
    out.spec = model.spec;
    out.seed = stream.master_seed();

    if (sigma == 0.0) {
        // X = C exactly; empirical and oracle energies tie (also under
        // spectrum multiplicities), so delta is exactly 0.
        out.delta = MCEstimate::exact(0.0, reps);
        out.normalized = 0.0;
        return out;
    }

    const double closed = expected_projected_energy(model);
    std::vector<double> g(reps);
    parallel_for(reps, threads, [&](std::size_t i) {
        RngStream si = stream.substream(i);
        Matrix e = sample_gaussian(m, sigma, si);
        double value = top_r_energy(model.c + e, r) - closed;
        if (antithetic) value = 0.5 * (value + top_r_energy(model.c - e, r) - closed);
        g[i] = value;
    });
    out.delta = MCEstimate::from_samples(g);
    out.normalized = out.delta.mean / (sigma * sigma * r * m);
    return out;
}

/// Paired estimate of delta_a - delta_b under common random numbers: the
/// same noise draw feeds both models in every replication.
inline MCEstimate paired_delta_difference(const ModelInstance& model_a,
                                          const ModelInstance& model_b, std::size_t reps,
                                          const RngStream& stream, int threads = 1) {
    if (reps < 2) throw ArgumentError("paired_delta_difference: need reps >= 2");
    if (model_a.spec.m != model_b.spec.m || model_a.spec.r != model_b.spec.r ||
        model_a.spec.sigma != model_b.spec.sigma)
        throw ArgumentError("paired_delta_difference: models must share (M, r, sigma)");
    const int m = model_a.spec.m;
    const int r = model_a.spec.r;
    const double sigma = model_a.spec.sigma;
    if (sigma == 0.0) return MCEstimate::exact(0.0, reps);

    const double closed_a = expected_projected_energy(model_a);
    const double closed_b = expected_projected_energy(model_b);
    std::vector<double> g(reps);
    parallel_for(reps, threads, [&](std::size_t i) {
        RngStream si = stream.substream(i);
        Matrix e = sample_gaussian(m, sigma, si);
        const double ga = top_r_energy(model_a.c + e, r) - closed_a;
        const double gb = top_r_energy(model_b.c + e, r) - closed_b;
        g[i] = ga - gb;
    });
    return MCEstimate::from_samples(g);
}

enum class SweepParam { Alpha, Beta, M, Sigma };

inline std::string sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::Alpha: return "alpha";
        case SweepParam::Beta: return "beta";
        case SweepParam::M: return "m";
        case SweepParam::Sigma: return "sigma";
    }
    return "?";
}

inline SweepParam sweep_param_from_name(const std::string& name) {
    if (name == "alpha") return SweepParam::Alpha;
    if (name == "beta") return SweepParam::Beta;
    if (name == "m") return SweepParam::M;
    if (name == "sigma") return SweepParam::Sigma;
    throw ArgumentError("sweep: unknown parameter \"" + name + "\"");
}

struct SweepRow {
    std::string param_name;
    double param_value = 0.0;
    bool ok = false;
    std::string error;  // set when the grid point was invalid
    SpectrumSpec spec;
    DeltaReport delta;
    BoundReport bounds;
    double baseline_delta0_mean = 0.0;
    std::uint64_t seed = 0;
};

/// One row per grid point, each with its own derived stream; rows carry
/// both the delta estimate and all bound kernels. Invalid grid points are
/// recorded as row-level errors and the sweep continues.
inline std::vector<SweepRow> sweep(const SpectrumSpec& base, SweepParam param,
                                   const std::vector<double>& grid, std::size_t reps,
                                   std::uint64_t master_seed, bool antithetic = true,
                                   int threads = 1) {
    if (grid.empty()) throw ArgumentError("sweep: grid must be non-empty");

    // delta0 baselines, one per distinct (m, r, sigma).
    std::map<std::tuple<int, int, double>, MCEstimate> baselines;
    auto baseline_for = [&](int m, int r, double sigma) -> MCEstimate {
        const auto key = std::make_tuple(m, r, sigma);
        auto it = baselines.find(key);
        if (it != baselines.end()) return it->second;
        SpectrumSpec zero;
        zero.m = m;
        zero.r = r;
        zero.sigma = sigma;
        zero.family.type = FamilyType::Zero;
        zero.rotation.mode = RotationMode::Identity;
        ModelInstance zm = build_model(zero);
        RngStream bs(master_seed, 0xB0000000ULL + baselines.size());
        MCEstimate est = estimate_delta(zm, reps, bs, antithetic, threads).delta;
        baselines.emplace(key, est);
        return est;
    };

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SweepRow row;
        row.param_name = sweep_param_name(param);
        row.param_value = grid[i];
        row.seed = master_seed;
        SpectrumSpec spec = base;
        try {
            switch (param) {
                case SweepParam::Alpha: spec.family.alpha = grid[i]; break;
                case SweepParam::Beta: spec.family.beta = grid[i]; break;
                case SweepParam::M: {
                    const double v = grid[i];
                    if (v < 1.0 || v != std::floor(v))
                        throw SpecError("SpectrumSpec.m: grid value is not a positive integer");
                    spec.m = static_cast<int>(v);
                    break;
                }
                case SweepParam::Sigma: spec.sigma = grid[i]; break;
            }
            spec.validate();
            row.spec = spec;
            ModelInstance model = build_model(spec);
            RngStream rs(master_seed, i + 1);
            row.delta = estimate_delta(model, reps, rs, antithetic, threads);
            MCEstimate delta0 = baseline_for(spec.m, spec.r, spec.sigma);
            row.baseline_delta0_mean = delta0.mean;
            row.bounds = bound_report(model, delta0);
            row.ok = true;
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV output. Floats carry 17 significant digits so reruns are byte-exact;
// absent kernels are empty fields and infinities print as "inf".
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace detail

inline const char* kSweepCsvHeader =
    "param_name,param_value,m,r,sigma,reps,delta_mean,delta_stderr,delta_norm,"
    "bound_universal,bound_general,term_I,term_II,term_III,bound_step,"
    "baseline_delta0_mean,seed";

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << kSweepCsvHeader << '\n';
    for (const SweepRow& row : rows) {
        if (!row.ok) continue;
        const BoundReport& b = row.bounds;
        os << row.param_name << ',' << detail::format_double(row.param_value) << ','
           << row.spec.m << ',' << row.spec.r << ',' << detail::format_double(row.spec.sigma)
           << ',' << row.delta.delta.n << ',' << detail::format_double(row.delta.delta.mean)
           << ',' << detail::format_double(row.delta.delta.stderr_) << ','
           << detail::format_double(row.delta.normalized) << ','
           << detail::format_optional(b.universal) << ','
           << (b.general ? detail::format_double(b.general->kernel) : std::string()) << ','
           << (b.general ? detail::format_double(b.general->term_i) : std::string()) << ','
           << (b.general ? detail::format_double(b.general->term_ii) : std::string()) << ','
           << (b.general ? detail::format_double(b.general->term_iii) : std::string()) << ','
           << detail::format_optional(b.step) << ','
           << detail::format_double(row.baseline_delta0_mean) << ',' << row.seed << '\n';
    }
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_sweep_csv(rows, f);
    if (!f) throw IoError("write failed: " + path);
}

/// Generic CSV table (header + string cells), used for schema
/// self-consistency checks of the writers above.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv_table(std::istream& is) {
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size())
                throw IoError("ragged CSV row: expected " + std::to_string(table.header.size()) +
                              " cells, got " + std::to_string(cells.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

inline CsvTable read_csv_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    return read_csv_table(f);
}

}  // namespace spl
