// Command-line front end: parse specs, dispatch experiments, write CSV/JSON
// artifacts, and run the acceptance suites.
//
// Exit codes: 0 success, 1 suite failure, 2 usage error, 3 malformed spec
// JSON, 4 I/O error.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spl/bounds.hpp"
#include "spl/delta.hpp"
#include "spl/estimators.hpp"
#include "spl/grassmann.hpp"
#include "spl/parallel.hpp"
#include "spl/spectrum.hpp"
#include "spl/suite.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitBadSpec = 3;
constexpr int kExitIo = 4;

struct BadSpec {
    std::string message;
};

using spl::detail::format_double;

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Accepts either inline JSON (starts with '{') or a file path.
spl::SpectrumSpec load_spec(const std::string& spec_arg) {
    std::string text;
    std::string origin;
    std::size_t first = spec_arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && spec_arg[first] == '{') {
        text = spec_arg;
        origin = "<inline>";
    } else {
        std::ifstream f(spec_arg, std::ios::binary);
        if (!f) throw spl::IoError("cannot read spec file: " + spec_arg);
        std::stringstream buf;
        buf << f.rdbuf();
        text = buf.str();
        origin = spec_arg;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte);
        throw BadSpec{origin + ": malformed JSON at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what()};
    }
    try {
        return spl::spec_from_json(j);
    } catch (const spl::SpecError& e) {
        throw BadSpec{origin + ": " + e.what()};
    }
}

void write_text(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        if (!std::cout) throw spl::IoError("write to stdout failed");
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw spl::IoError("cannot open for writing: " + out_path);
    f << content;
    if (!f) throw spl::IoError("write failed: " + out_path);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return *flag_seed;
    if (const char* env = std::getenv("SPL_SEED")) {
        try {
            std::size_t pos = 0;
            const std::string s(env);
            const std::uint64_t v = std::stoull(s, &pos);
            if (pos == s.size()) return v;
        } catch (...) {
        }
        throw CLI::ValidationError("SPL_SEED", "SPL_SEED is not a 64-bit unsigned integer");
    }
    return 0;
}

int parse_threads(const std::string& threads_arg) {
    if (threads_arg == "auto") return spl::resolve_threads(0);
    try {
        std::size_t pos = 0;
        const int v = std::stoi(threads_arg, &pos);
        if (pos == threads_arg.size() && v >= 1) return v;
    } catch (...) {
    }
    throw CLI::ValidationError("--threads", "expected a positive integer or 'auto'");
}

std::vector<double> parse_grid(const std::string& grid_arg) {
    std::vector<double> grid;
    std::stringstream ss(grid_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            grid.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (...) {
            throw CLI::ValidationError("--grid", "bad grid value: " + tok);
        }
    }
    if (grid.empty()) throw CLI::ValidationError("--grid", "empty grid");
    return grid;
}

std::string delta_csv(const spl::DeltaReport& rep, std::size_t reps, bool antithetic) {
    std::ostringstream os;
    os << "m,r,sigma,family,reps,antithetic,delta_mean,delta_stderr,delta_norm,seed\n";
    os << rep.spec.m << ',' << rep.spec.r << ',' << format_double(rep.spec.sigma) << ','
       << spl::family_name(rep.spec) << ',' << reps << ',' << (antithetic ? 1 : 0)
       << ',' << format_double(rep.delta.mean) << ',' << format_double(rep.delta.stderr_) << ','
       << format_double(rep.normalized) << ',' << rep.seed << '\n';
    return os.str();
}

nlohmann::json delta_json(const spl::DeltaReport& rep, std::size_t reps, bool antithetic) {
    nlohmann::json j;
    j["spec"] = spl::spec_to_json(rep.spec);
    j["reps"] = reps;
    j["antithetic"] = antithetic;
    j["delta_mean"] = rep.delta.mean;
    j["delta_stderr"] = rep.delta.stderr_;
    j["delta_norm"] = rep.normalized;
    j["seed"] = rep.seed;
    return j;
}

std::string bound_csv(const spl::BoundReport& report) {
    auto cell = [](const std::optional<double>& v) {
        return v ? spl::detail::format_double(*v) : std::string();
    };
    std::ostringstream os;
    os << "bound_universal,bound_general,term_I,term_II,term_III,bound_step,bound_floor,"
          "bound_r1_lower\n";
    os << cell(report.universal) << ',';
    if (report.general)
        os << format_double(report.general->kernel) << ',' << format_double(report.general->term_i)
           << ',' << format_double(report.general->term_ii) << ','
           << format_double(report.general->term_iii);
    else
        os << ",,,";
    os << ',' << cell(report.step) << ',' << cell(report.floor) << ',' << cell(report.r1_lower)
       << '\n';
    return os.str();
}

int run_suite_command(const std::string& name, std::uint64_t seed, int threads,
                      const std::string& out_path) {
    spl::suite::SuiteConfig cfg;
    cfg.seed = seed;
    cfg.threads = threads;
    std::vector<spl::suite::CriterionResult> results;
    if (name == "all") {
        results = spl::suite::run_all(cfg);
    } else if (name == "determinism") {
        std::vector<spl::suite::CriterionResult> reference;
        for (const std::string& n : spl::suite::suite_names())
            reference.push_back(spl::suite::run_one(n, cfg));
        results.push_back(spl::suite::run_determinism(cfg, reference));
    } else {
        results.push_back(spl::suite::run_one(name, cfg));
    }
    bool all_pass = true;
    std::string artifact;
    for (const auto& res : results) {
        all_pass = all_pass && res.pass;
        std::printf("%-24s %-4s %8.1fs%s%s\n", res.name.c_str(), res.pass ? "PASS" : "FAIL",
                    res.seconds, res.detail.empty() ? "" : "  ", res.detail.c_str());
        artifact += "# " + res.name + "\n" + res.artifact;
    }
    if (!out_path.empty()) write_text(out_path, artifact);
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for reduced-rank projection accuracy gaps"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string spec_arg, out_path, format = "csv", threads_arg = "1";
    std::optional<std::uint64_t> seed_flag;
    std::size_t reps = 2000;
    bool no_antithetic = false;

    auto add_common = [&](CLI::App* cmd, bool with_spec = true) {
        if (with_spec)
            cmd->add_option("--spec", spec_arg, "model spec: JSON file path or inline JSON")
                ->required();
        cmd->add_option("--seed", seed_flag, "master seed (falls back to SPL_SEED, then 0)");
        cmd->add_option("--out", out_path, "output path ('-' or empty: stdout)");
        cmd->add_option("--threads", threads_arg, "worker count or 'auto'");
    };

    // delta
    auto* cmd_delta = app.add_subcommand("delta", "Monte Carlo estimate of the accuracy gap");
    add_common(cmd_delta);
    cmd_delta->add_option("--reps", reps, "replications");
    cmd_delta->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_delta->add_flag("--no-antithetic", no_antithetic, "disable antithetic pairing");

    // sweep
    std::string param_name = "alpha", grid_arg;
    auto* cmd_sweep = app.add_subcommand("sweep", "accuracy gap and bounds along a parameter grid");
    add_common(cmd_sweep);
    cmd_sweep->add_option("--reps", reps, "replications per grid point");
    cmd_sweep->add_option("--param", param_name, "swept parameter: alpha, beta, m, sigma")
        ->check(CLI::IsMember({"alpha", "beta", "m", "sigma"}));
    cmd_sweep->add_option("--grid", grid_arg, "comma-separated grid values")->required();
    cmd_sweep->add_flag("--no-antithetic", no_antithetic, "disable antithetic pairing");

    // bounds
    double kappa = 1.0;
    std::optional<double> delta0_mean, delta0_stderr;
    auto* cmd_bounds = app.add_subcommand("bounds", "closed-form bound report for a spec");
    add_common(cmd_bounds);
    cmd_bounds->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_bounds->add_option("--kappa", kappa, "small-amplitude factor for the floor bound");
    cmd_bounds->add_option("--delta0-mean", delta0_mean,
                           "baseline delta0 estimate enabling the floor bound");
    cmd_bounds->add_option("--delta0-stderr", delta0_stderr, "stderr of --delta0-mean");

    // verify-inclusions
    std::size_t samples = 10000;
    std::string delta_grid_arg = "0.1,1,10";
    auto* cmd_incl =
        app.add_subcommand("verify-inclusions", "sample Haar projectors against the ball sandwich");
    add_common(cmd_incl);
    cmd_incl->add_option("--samples", samples, "Haar samples per delta");
    cmd_incl->add_option("--delta-grid", delta_grid_arg, "comma-separated energy-gap levels");

    // pack
    int pack_m = 4, pack_r = 1;
    double pack_radius = 1.0;
    std::string metric_name = "s2";
    std::size_t budget = 4000, streak = 200;
    auto* cmd_pack = app.add_subcommand("pack", "greedy projector packing at a given radius");
    add_common(cmd_pack, false);
    cmd_pack->add_option("--m", pack_m, "ambient dimension")->required();
    cmd_pack->add_option("--r", pack_r, "projector rank")->required();
    cmd_pack->add_option("--radius", pack_radius, "pairwise separation")->required();
    cmd_pack->add_option("--metric", metric_name, "s2 or sinf")
        ->check(CLI::IsMember({"s2", "sinf"}));
    cmd_pack->add_option("--budget", budget, "candidate budget");
    cmd_pack->add_option("--streak", streak, "stop after this many consecutive rejections");

    // estimate
    auto* cmd_est = app.add_subcommand("estimate", "bias and variance study of the estimators");
    add_common(cmd_est);
    cmd_est->add_option("--reps", reps, "replications");
    cmd_est->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // baseline
    int base_m = 50, base_r = 1;
    double base_sigma = 1.0;
    auto* cmd_base = app.add_subcommand("baseline", "accuracy gap of the pure-noise model");
    add_common(cmd_base, false);
    cmd_base->add_option("--m", base_m, "ambient dimension")->required();
    cmd_base->add_option("--r", base_r, "projection rank");
    cmd_base->add_option("--sigma", base_sigma, "noise level");
    cmd_base->add_option("--reps", reps, "replications");
    cmd_base->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // suite
    std::string suite_name = "all";
    auto* cmd_suite = app.add_subcommand("suite", "run an acceptance suite");
    add_common(cmd_suite, false);
    cmd_suite->add_option("--name", suite_name, "suite name or 'all'")
        ->check(CLI::IsMember({"all", "baseline", "fixed-projection", "weak-accuracy",
                               "weak-accuracy-paired", "weak-accuracy-slope",
                               "high-accuracy-plateau", "general-kernel", "variance-formulas",
                               "gamma-star", "inclusions", "packing", "bias-floor",
                               "determinism"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const std::uint64_t seed = resolve_seed(seed_flag);
        const int threads = parse_threads(threads_arg);

        if (cmd_delta->parsed()) {
            spl::SpectrumSpec spec = load_spec(spec_arg);
            spl::ModelInstance model = spl::build_model(spec);
            spl::RngStream stream(seed, 0);
            spl::DeltaReport rep =
                spl::estimate_delta(model, reps, stream, !no_antithetic, threads);
            if (format == "json")
                write_text(out_path, delta_json(rep, reps, !no_antithetic).dump(2) + "\n");
            else
                write_text(out_path, delta_csv(rep, reps, !no_antithetic));
        } else if (cmd_sweep->parsed()) {
            spl::SpectrumSpec spec = load_spec(spec_arg);
            std::vector<spl::SweepRow> rows =
                spl::sweep(spec, spl::sweep_param_from_name(param_name), parse_grid(grid_arg),
                           reps, seed, !no_antithetic, threads);
            std::ostringstream os;
            spl::write_sweep_csv(rows, os);
            write_text(out_path, os.str());
            for (const spl::SweepRow& row : rows)
                if (!row.ok)
                    std::cerr << "warning: skipped " << row.param_name << "="
                              << format_double(row.param_value) << ": " << row.error << "\n";
        } else if (cmd_bounds->parsed()) {
            spl::SpectrumSpec spec = load_spec(spec_arg);
            spl::ModelInstance model = spl::build_model(spec);
            std::optional<spl::MCEstimate> delta0;
            if (delta0_mean) {
                spl::MCEstimate est;
                est.mean = *delta0_mean;
                est.stderr_ = delta0_stderr.value_or(0.0);
                est.n = 1;
                delta0 = est;
            }
            spl::BoundReport report = spl::bound_report(model, delta0, kappa);
            if (format == "json")
                write_text(out_path, spl::bound_report_to_json(report).dump(2) + "\n");
            else
                write_text(out_path, bound_csv(report));
        } else if (cmd_incl->parsed()) {
            spl::SpectrumSpec spec = load_spec(spec_arg);
            spl::ModelInstance model = spl::build_model(spec);
            spl::RngStream stream(seed, 0);
            spl::InclusionCheck check =
                spl::check_inclusions(model, parse_grid(delta_grid_arg), samples, stream);
            nlohmann::json j = spl::inclusion_check_to_json(check);
            j["seed"] = seed;
            write_text(out_path, j.dump(2) + "\n");
            if (check.violations() != 0) return 1;
        } else if (cmd_pack->parsed()) {
            spl::RngStream stream(seed, 0);
            const spl::ProjectorMetric metric =
                metric_name == "sinf" ? spl::ProjectorMetric::SInf : spl::ProjectorMetric::S2;
            spl::PackingResult pack =
                spl::greedy_packing(pack_m, pack_r, pack_radius, metric, budget, streak, stream);
            nlohmann::json j = spl::packing_result_to_json(pack);
            j["seed"] = seed;
            write_text(out_path, j.dump(2) + "\n");
        } else if (cmd_est->parsed()) {
            spl::SpectrumSpec spec = load_spec(spec_arg);
            spl::ModelInstance model = spl::build_model(spec);
            spl::RngStream stream(seed, 0);
            std::vector<spl::EstimatorReport> reports =
                spl::bias_study(model, reps, stream, threads);
            if (format == "json") {
                nlohmann::json j = spl::estimator_reports_to_json(reports);
                j["reps"] = reps;
                j["seed"] = seed;
                write_text(out_path, j.dump(2) + "\n");
            } else {
                std::ostringstream os;
                spl::write_estimator_csv(reports, reps, seed, os);
                write_text(out_path, os.str());
            }
        } else if (cmd_base->parsed()) {
            spl::SpectrumSpec spec;
            spec.m = base_m;
            spec.r = base_r;
            spec.sigma = base_sigma;
            spec.family.type = spl::FamilyType::Zero;
            spec.rotation.mode = spl::RotationMode::Identity;
            spec.validate();
            spl::ModelInstance model = spl::build_model(spec);
            spl::RngStream stream(seed, 0);
            spl::DeltaReport rep = spl::estimate_delta(model, reps, stream, false, threads);
            if (format == "json")
                write_text(out_path, delta_json(rep, reps, false).dump(2) + "\n");
            else
                write_text(out_path, delta_csv(rep, reps, false));
        } else if (cmd_suite->parsed()) {
            return run_suite_command(suite_name, seed, threads, out_path);
        }
    } catch (const BadSpec& e) {
        std::cerr << "error: " << e.message << "\n";
        return kExitBadSpec;
    } catch (const spl::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadSpec;
    } catch (const spl::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const spl::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
