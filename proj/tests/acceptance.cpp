// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "qrt/verify.hpp"

using namespace qrt;

namespace {

struct Timed {
    SuiteReport report;
    double seconds;
};

Timed timed(const std::function<SuiteReport()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    return {std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
}

/// All checks whose name starts with one of the prefixes, and at least one.
bool checks_pass(const SuiteReport& r, std::initializer_list<std::string> prefixes, std::string& failed) {
    auto j = r.to_json();
    bool any = false, ok = true;
    for (const auto& c : j["checks"]) {
        auto name = c["name"].get<std::string>();
        for (const auto& p : prefixes)
            if (name.rfind(p, 0) == 0) {
                any = true;
                if (!c["pass"].get<bool>()) {
                    ok = false;
                    failed += (failed.empty() ? "" : "; ") + name;
                }
                break;
            }
    }
    if (!any) failed += "no matching checks";
    return any && ok;
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int main() {
    VerifyConfig cfg;
    cfg.samples = 1'000'000;
    cfg.seed = 7;
    cfg.partition = Partition::parse("2,1");

    {
        auto t = timed([&] { return verify_schur(cfg); });
        std::string failed;
        bool ok = checks_pass(t.report, {"block scalar constant", "block scalar box", "block scalar gaussian_radii",
                                         "diagonal matches eigenvalue"}, failed);
        ok = ok && t.seconds <= 300.0;
        report(1, ok, "Schur diagonalization, n=(2,1), degree <= 4, 1e6 samples",
               failed.empty() ? fmt(t.seconds) + " s" : failed);
        std::string f2;
        bool ok2 = checks_pass(t.report, {"quadrature agrees with Gamma sampling"}, f2);
        report(2, ok2, "Gauss-Laguerre against Gamma sampling, 50 triples", f2);
    }

    VerifyConfig plain;
    plain.samples = cfg.samples;
    plain.seed = cfg.seed;
    {
        auto t = timed([&] { return verify_lipschitz(plain); });
        std::string f3, f4, f5;
        report(3, checks_pass(t.report, {"shift identity", "product factorization"}, f3),
               "shift identity and product factorization, 100 cases each", f3);
        report(4, checks_pass(t.report, {"box symbol equals P(m+1, 1)", "capped square equals m+1"}, f4),
               "closed forms P(m+1,1) and m+1 for m <= 300", f4);
        report(5, checks_pass(t.report, {"lipschitz ", "adjacent kernel distance"}, f5),
               "Lipschitz bound on [0,200]^k and adjacent kernel distances", f5);
    }
    {
        auto t = timed([&] { return verify_extension(plain); });
        std::string f;
        bool ok = checks_pass(t.report, {""}, f) && t.seconds <= 600.0;
        report(6, ok, "lattice extension suite", f.empty() ? fmt(t.seconds) + " s" : f);
    }
    {
        auto t = timed([&] { return verify_shifts(plain); });
        std::string f;
        report(7, checks_pass(t.report, {"left shift contraction", "right shift bound"}, f),
               "shift lemmas for 20 lattice functions", f);
    }
    {
        auto t = timed([&] { return verify_density(plain); });
        std::string f;
        bool ok = checks_pass(t.report, {"kernel gap decreases", "synthesis of sin(sqrt m)", "synthesis of constants",
                                         "shift reduction"}, f) &&
                  t.seconds <= 900.0;
        report(8, ok, "density pipeline", f.empty() ? fmt(t.seconds) + " s" : f);
    }
    {
        auto t = timed([&] { return verify_obstruction(plain); });
        std::string f;
        bool ok = checks_pass(t.report, {"rho_2 Lipschitz witness", "row sup at least 1/2", "row separation at least 1/2"}, f) &&
                  t.seconds <= 120.0;
        report(9, ok, "obstruction suite", f.empty() ? fmt(t.seconds) + " s" : f);
    }
    {
        const std::string cli = QRT_CLI;
        auto dir = std::filesystem::temp_directory_path();
        std::string first;
        bool ok = true;
        std::string detail;
        for (int workers : {1, 4, 16}) {
            auto path = (dir / ("qrt_acceptance_w" + std::to_string(workers) + ".json")).string();
            std::string cmd = "WORKERS=" + std::to_string(workers) + " " + cli + " verify all --seed 7 --samples 1000000 --out " +
                              path + " > /dev/null 2>&1";
            int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                ok = false;
                detail += "workers=" + std::to_string(workers) + " exit " + std::to_string(WEXITSTATUS(status)) + "; ";
                continue;
            }
            auto bytes = slurp(path);
            if (first.empty())
                first = bytes;
            else if (bytes != first) {
                ok = false;
                detail += "workers=" + std::to_string(workers) + " differs; ";
            }
        }
        report(10, ok && !first.empty(), "verify all byte-identical across 1, 4 and 16 workers", detail);
    }
    return failures == 0 ? 0 : 1;
}
