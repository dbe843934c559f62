// Acceptance battery: one pass/fail line per criterion, exit 1 on any
// failure. Tolerances and frozen targets are pinned inside the suite
// implementations.
#include <cstdio>
#include <cstdlib>

#include "spl/suite.hpp"

int main() {
    spl::suite::SuiteConfig cfg;
    cfg.seed = 1;
    cfg.threads = 2;
    if (const char* env = std::getenv("SPL_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);

    const std::vector<spl::suite::CriterionResult> results = spl::suite::run_all(cfg);
    bool all_pass = true;
    for (const auto& res : results) {
        all_pass = all_pass && res.pass;
        std::printf("[%s] %-24s %7.1fs%s%s\n", res.pass ? "PASS" : "FAIL", res.name.c_str(),
                    res.seconds, res.detail.empty() ? "" : "  ", res.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%s\n", all_pass ? "acceptance: all criteria passed"
                                 : "acceptance: at least one criterion FAILED");
    return all_pass ? 0 : 1;
}
