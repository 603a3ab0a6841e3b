// qrtoeplitz: eigenvalue tables, property suites and symbol synthesis.
//
// Exit codes: 0 ok, 1 assertion failure, 2 config error, 3 resource error,
// 4 synthesis target missed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qrt/density.hpp"
#include "qrt/spectrum.hpp"
#include "qrt/symbol.hpp"
#include "qrt/verify.hpp"

namespace {

enum Exit { ok = 0, assertion = 1, config = 2, resource = 3, missed = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

qrt::MultiIndex parse_window(const std::string& text) {
    qrt::MultiIndex w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad window entry '" + item + "'");
        }
        if (used != item.size() || v < 0) throw ConfigError("bad window entry '" + item + "'");
        w.push_back(v);
    }
    if (w.empty()) throw ConfigError("empty window");
    return w;
}

struct Options {
    std::string symbol, lattice, partition, window, out, report, mode = "auto", suite;
    int order = qrt::default_order;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 7;
    double epsilon = 0.1;
    double t0 = 0.5;
};

int cmd_spectrum(const Options& o) {
    if (o.symbol.empty()) throw ConfigError("spectrum needs --symbol");
    auto a = qrt::parse_symbol(read_file(o.symbol));
    auto n = o.partition.empty() ? qrt::Partition::ones(a.arity()) : qrt::Partition::parse(o.partition);
    if (!a.conforms(n.k())) throw ConfigError("symbol arity does not match the partition");
    if (o.window.empty()) throw ConfigError("spectrum needs --window");
    auto t = qrt::eigen_table(a, n, parse_window(o.window), o.order, qrt::parse_mode(o.mode));
    write_output(o.out, qrt::to_csv(t));
    return ok;
}

int cmd_verify(const Options& o) {
    qrt::VerifyConfig cfg;
    if (!o.symbol.empty()) cfg.symbol = qrt::parse_symbol(read_file(o.symbol));
    if (!o.lattice.empty()) cfg.lattice = qrt::parse_lattice(read_file(o.lattice));
    if (!o.partition.empty()) cfg.partition = qrt::Partition::parse(o.partition);
    if (cfg.symbol && cfg.partition && !cfg.symbol->conforms(cfg.partition->k()))
        throw ConfigError("symbol arity does not match the partition");
    cfg.order = o.order;
    cfg.samples = o.samples;
    cfg.seed = o.seed;
    cfg.mode = qrt::parse_mode(o.mode);
    const auto& names = qrt::suite_names();
    if (o.suite != "all" && std::find(names.begin(), names.end(), o.suite) == names.end())
        throw ConfigError("unknown suite '" + o.suite + "'");
    auto [report, pass] = qrt::run_verify(o.suite, cfg);
    write_output(o.out, report.dump(2) + "\n");
    return pass ? ok : assertion;
}

int cmd_synthesize(const Options& o) {
    if (o.lattice.empty()) throw ConfigError("synthesize needs --target");
    auto sigma = qrt::parse_lattice(read_file(o.lattice));
    if (sigma.arity() > 2) throw ConfigError("synthesis supports arity 1 and 2");
    auto n = o.partition.empty() ? qrt::Partition::ones(sigma.arity()) : qrt::Partition::parse(o.partition);
    if (n.k() != sigma.arity()) throw ConfigError("target arity does not match the partition");
    qrt::MultiIndex window = o.window.empty() ? qrt::MultiIndex(sigma.arity(), 400) : parse_window(o.window);
    qrt::SynthesisParams p;
    p.t0 = o.t0;
    p.order = o.order;
    auto r = qrt::synthesize_symbol(sigma, n, o.epsilon, window, p);
    if (o.out.empty()) {
        qrt::json doc = {{"symbol", r.symbol.to_json()}, {"report", r.report.to_json()}};
        write_output("", doc.dump(2) + "\n");
    } else {
        write_output(o.out, r.symbol.to_json().dump(2) + "\n");
        write_output(o.report.empty() ? o.out + ".report.json" : o.report, r.report.to_json().dump(2) + "\n");
    }
    return r.report.target_missed() ? missed : ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toeplitz operators with quasi-radial symbols on the Fock space"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--partition", o.partition, "block sizes n_1,...,n_k");
        c->add_option("--window", o.window, "window bounds M_1,...,M_k");
        c->add_option("--order", o.order, "Gauss-Laguerre order")->check(CLI::Range(1, 400));
        c->add_option("--mode", o.mode, "quadrature mode")->check(CLI::IsMember({"auto", "smooth", "adaptive"}));
        c->add_option("--out", o.out, "output path (default stdout)");
    };

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalue table as CSV");
    spectrum->add_option("--symbol", o.symbol, "symbol JSON file");
    common(spectrum);

    auto* verify = app.add_subcommand("verify", "run a property suite");
    verify->add_option("suite", o.suite, "schur, lipschitz, shifts, extension, density, obstruction or all")->required();
    verify->add_option("--symbol", o.symbol, "symbol JSON file");
    verify->add_option("--lattice", o.lattice, "lattice function JSON file");
    verify->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    verify->add_option("--seed", o.seed, "random seed");
    common(verify);

    auto* synth = app.add_subcommand("synthesize", "build a symbol whose eigenvalues approximate a target");
    synth->add_option("--target,--lattice", o.lattice, "target lattice function JSON file");
    synth->add_option("--epsilon", o.epsilon, "residual tolerance")->check(CLI::PositiveNumber);
    synth->add_option("--t0", o.t0, "bump width")->check(CLI::PositiveNumber);
    synth->add_option("--report", o.report, "report path (default <out>.report.json)");
    common(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? ok : config;
    }

    try {
        if (*spectrum) return cmd_spectrum(o);
        if (*verify) return cmd_verify(o);
        return cmd_synthesize(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config;
    } catch (const qrt::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return resource;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource error: out of memory\n";
        return resource;
    } catch (const qrt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config;
    }
}
