// autoint: run the case studies, compare against oracles, dump oracle curves.

#include "autoint/cases.hpp"
#include "autoint/errors.hpp"
#include "autoint/oracles.hpp"
#include "autoint/selftest.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

namespace fs = std::filesystem;
using namespace autoint;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTraining = 3;

struct RunArgs {
    std::string case_id, config, model, output;
    std::optional<long> seed, epochs;
    std::vector<std::string> sets, sweeps;
    int jobs = 1;
    bool quiet = false;
};

std::pair<std::string, std::string> split_assign(const std::string& s, const char* flag) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(std::string(flag) + " expects key=value, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

int cmd_run(const RunArgs& a) {
    std::vector<std::pair<std::string, std::string>> ov;
    for (const auto& s : a.sets) ov.push_back(split_assign(s, "--set"));
    for (const auto& s : a.sweeps) {
        auto [k, v] = split_assign(s, "--sweep");
        if (k != "omega") throw ConfigError("--sweep: only omega can be swept");
        ov.emplace_back("constants.omega_sweep", v);
    }
    if (a.seed) ov.emplace_back("run.seed", std::to_string(*a.seed));
    if (a.epochs) ov.emplace_back("optimizer.epochs", std::to_string(*a.epochs));
    if (!a.model.empty()) ov.emplace_back("run.model", a.model);

    const RunConfig cfg = load_run_config(a.case_id, a.config, ov, &std::cerr);
    const std::string id = cfg.get("run", "case");
    const std::string dir = a.output.empty() ? (fs::path(output_root()) / id).string() : a.output;

    CaseOptions opt;
    opt.jobs = a.jobs;
    if (!a.quiet) opt.log = &std::cerr;
    const CaseArtifacts art = run_case(cfg, opt);
    write_artifacts(art, cfg, dir);

    std::cout << "case " << id << " seed " << cfg.get("run", "seed") << " config " << cfg.hash() << "\n";
    for (const auto& r : art.comparison) {
        std::cout << "  " << r.query << "  learned " << format_number(r.learned) << "  oracle "
                  << format_number(r.oracle) << "\n";
    }
    std::cout << "artifacts in " << dir << "\n";
    return 0;
}

struct CheckArgs {
    std::string case_id, output;
    double tolerance = 0.0;
    std::vector<std::string> queries;
    bool relative = false;
};

int cmd_check(const CheckArgs& a) {
    const std::string dir = a.output.empty() ? (fs::path(output_root()) / a.case_id).string() : a.output;
    const auto rows = read_comparison(dir);
    int checked = 0, failed = 0;
    for (const auto& r : rows) {
        if (!a.queries.empty() &&
            std::find(a.queries.begin(), a.queries.end(), r.query) == a.queries.end())
            continue;
        double err = std::abs(r.learned - r.oracle);
        if (a.relative) err = r.oracle != 0.0 ? err / std::abs(r.oracle) : (err == 0.0 ? 0.0 : INFINITY);
        const bool ok = err <= a.tolerance || a.tolerance == INFINITY;
        ++checked;
        if (!ok) ++failed;
        std::cout << (ok ? "PASS " : "FAIL ") << r.query << "  learned " << format_number(r.learned)
                  << "  oracle " << format_number(r.oracle) << "  " << (a.relative ? "rel " : "abs ")
                  << format_number(err) << "\n";
    }
    if (checked == 0) {
        std::cerr << "check: no matching rows in " << dir << "\n";
        return kExitConfig;
    }
    std::cout << checked - failed << "/" << checked << " within " << format_number(a.tolerance) << "\n";
    return failed ? kExitFail : 0;
}

void dump_curve(const fs::path& path, const std::string& header,
                const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path.string());
    os << header << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << "\n";
    }
}

int cmd_oracle(const std::string& output, const std::string& golden) {
    const fs::path dir = output.empty() ? fs::path(output_root()) / "oracle" : fs::path(output);
    fs::create_directories(dir);
    oracle::QuadratureRule simpson;
    simpson.scheme = oracle::Scheme::AdaptiveSimpson;
    simpson.tolerance = 1e-10;

    const oracle::OuProcess ou{};
    std::vector<std::vector<double>> rows;
    for (double t : linspace(0.1, 0.5, 41))
        rows.push_back({t, oracle::ou_mean(t, ou), std::sqrt(oracle::ou_variance(t, ou))});
    dump_curve(dir / "ou_moments.csv", "t,mean,std", rows);

    rows.clear();
    const oracle::OuProcess a{1.0, 5.0, 2.0, 0.0}, b{2.0, 3.0, 1.0, 0.0};
    for (double t : linspace(0.3, 1.0, 36)) rows.push_back({t, oracle::basket_mean(t, a, b)});
    dump_curve(dir / "basket_mean.csv", "t,E", rows);

    rows.clear();
    const oracle::Vessel v{};
    for (double w : linspace(0.0, 8.0, 33))
        rows.push_back({w, oracle::moi_exact(w, v), oracle::moi_quadrature(w, v, simpson)});
    dump_curve(dir / "moi.csv", "omega,I_exact,I_quadrature", rows);

    rows.clear();
    const oracle::Advection adv{};
    for (double t : linspace(0.1, 1.0, 46)) rows.push_back({t, oracle::potential(t, adv, simpson)});
    dump_curve(dir / "potential.csv", "t,V", rows);

    rows.clear();
    for (double t : linspace(0.0, 1.0, 101)) rows.push_back({t, oracle::population_exact(t)});
    dump_curve(dir / "population.csv", "t,b", rows);

    const std::string gpath = golden.empty() ? (dir / "golden.csv").string() : golden;
    oracle::write_golden(gpath, oracle::reference_values());
    std::cout << "oracle curves in " << dir.string() << ", golden values in " << gpath << "\n";
    return 0;
}

int cmd_selftest() {
    int failed = 0;
    for (const auto& c : run_selftest()) {
        std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << "  " << format_number(c.value)
                  << " < " << format_number(c.threshold) << "\n";
        if (!c.pass()) ++failed;
    }
    return failed ? kExitFail : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"autoint: integral transforms through trained antiderivative surrogates"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run = app.add_subcommand("run", "train a case study and write its artifacts");
    run->add_option("--case", ra.case_id, "european | asian | basket | moi | potential | population");
    run->add_option("--config", ra.config, "INI config file")->check(CLI::ExistingFile);
    run->add_option("--seed", ra.seed, "run seed");
    run->add_option("--model", ra.model, "mlp | dqc");
    run->add_option("--epochs", ra.epochs, "optimizer epochs");
    run->add_option("--sweep", ra.sweeps, "omega=lo:hi:n");
    run->add_option("--set", ra.sets, "section.key=value override");
    run->add_option("--jobs", ra.jobs, "independent trainings run concurrently")->check(CLI::PositiveNumber);
    run->add_option("--output", ra.output, "artifact directory");
    run->add_flag("--quiet", ra.quiet, "no progress on stderr");

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "compare learned and oracle columns of a previous run");
    check->add_option("--case", ca.case_id, "case id")->required();
    check->add_option("--tolerance", ca.tolerance, "allowed error (inf passes everything)")->required();
    check->add_option("--query", ca.queries, "only these comparison rows");
    check->add_flag("--relative", ca.relative, "relative instead of absolute error");
    check->add_option("--output", ca.output, "artifact directory");

    std::string oracle_out, golden;
    auto* orc = app.add_subcommand("oracle", "dump oracle curves and the golden reference file");
    orc->add_option("--output", oracle_out, "directory for the curves");
    orc->add_option("--golden", golden, "golden CSV path");

    auto* self = app.add_subcommand("selftest", "autodiff and quadrature property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(ra);
        if (*check) return cmd_check(ca);
        if (*orc) return cmd_oracle(oracle_out, golden);
        if (*self) return cmd_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TrainingError& e) {
        std::cerr << "error: training diverged at epoch " << e.epoch() << ": " << e.what() << "\n";
        return kExitTraining;
    } catch (const SingularKernelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return 0;
}
