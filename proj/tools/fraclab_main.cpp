// Batch experiment driver: scaling sweeps, recovery-sequence energies,
// optimal-profile extrapolation, and the lower-bound audit.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraclab/experiments.hpp"
#include "fraclab/gagliardo.hpp"
#include "fraclab/gridfn.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace fraclab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;
constexpr int kExitNumerical = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 20240901;
    int threads = 1;
    std::string format = "csv";
};

json load_config(const CommonOpts& c, const std::vector<std::string>& allowed) {
    json cfg = json::object();
    if (!c.config_path.empty()) {
        std::ifstream in(c.config_path);
        if (!in) throw std::runtime_error("cannot open config " + c.config_path);
        cfg = json::parse(in);
    }
    if (!cfg.is_object()) throw std::runtime_error("config must be a JSON object");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::runtime_error("unknown config key '" + it.key() + "'");
    }
    return cfg;
}

std::ofstream open_out(const CommonOpts& c, const std::string& name, const json& cfg) {
    fs::create_directories(c.out_dir);
    std::ofstream out(fs::path(c.out_dir) / name);
    if (!out) throw std::runtime_error("cannot write output file " + name);
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char ts[64];
    std::strftime(ts, sizeof(ts), "%FT%TZ", std::gmtime(&tt));
    out << "# generated " << ts << "\n";
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg.dump())));
    out << "# fraclab " << kToolVersion << " seed=" << c.seed << " config-hash=" << hash << "\n";
    out.precision(12);
    return out;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::SubLogarithmic: return "SubLogarithmic";
        case Regime::Order1: return "Order1";
        default: return "SuperLogarithmic";
    }
}

template <class T>
std::vector<T> get_or(const json& cfg, const char* key, std::vector<T> dflt) {
    if (!cfg.contains(key)) return dflt;
    return cfg.at(key).get<std::vector<T>>();
}

int cmd_scaling(const CommonOpts& c) {
    json cfg = load_config(c, {"s_values", "eps_values", "threshold_lo", "threshold_hi"});
    ScalingSweepConfig sc;
    sc.s_values = get_or<double>(cfg, "s_values", {0.4, 0.45, 0.49, 0.5, 0.51, 0.55, 0.6});
    sc.eps_values = get_or<double>(cfg, "eps_values", {1e-2, 1e-3, 1e-4, 1e-6});
    sc.threshold_lo = cfg.value("threshold_lo", 0.1);
    sc.threshold_hi = cfg.value("threshold_hi", 10.0);
    auto rows = run_scaling_sweep(sc, c.threads);
    if (c.format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"s", r.s}, {"eps", r.eps}, {"lambda", r.lambda},
                           {"lambda_log", r.lambda_log}, {"regime_value", r.regime_value},
                           {"regime_class", regime_name(r.regime_class)}});
        auto out = open_out(c, "scaling.json", cfg);
        out << arr.dump(2) << "\n";
    } else {
        auto out = open_out(c, "scaling.csv", cfg);
        out << "s,eps,lambda,lambda_log,regime_value,regime_class\n";
        for (const auto& r : rows)
            out << r.s << "," << r.eps << "," << r.lambda << "," << r.lambda_log << ","
                << r.regime_value << "," << regime_name(r.regime_class) << "\n";
    }
    return 0;
}

int cmd_recovery(const CommonOpts& c) {
    json cfg = load_config(c, {"jumps", "left_value", "eps_values", "s_rules"});
    RecoveryConfig rc;
    rc.jumps = get_or<double>(cfg, "jumps", {0.5});
    rc.left_value = cfg.value("left_value", -1);
    rc.eps_values = get_or<double>(cfg, "eps_values", {1e-2, 1e-3, 1e-4, 1e-5});
    rc.s_rules = get_or<std::string>(cfg, "s_rules", {"half"});
    auto res = run_recovery_experiment(rc, c.threads);
    int failed = 0;
    if (c.format == "json") {
        json arr = json::array(), fits = json::array();
        for (const auto& r : res.rows) {
            failed += r.ok ? 0 : 1;
            arr.push_back({{"rule", r.rule}, {"eps", r.eps}, {"s_eps", r.s_eps},
                           {"total", r.total}, {"total_log", r.total_log}, {"ok", r.ok},
                           {"error", r.error}});
        }
        for (const auto& [rule, a] : res.intercepts)
            fits.push_back({{"rule", rule}, {"intercept", a}});
        auto out = open_out(c, "recovery.json", cfg);
        out << json{{"rows", arr}, {"fits", fits}}.dump(2) << "\n";
    } else {
        auto out = open_out(c, "recovery.csv", cfg);
        out << "rule,eps,s_eps,total,total_log,ok\n";
        for (const auto& r : res.rows) {
            failed += r.ok ? 0 : 1;
            out << r.rule << "," << r.eps << "," << r.s_eps << "," << r.total << ","
                << r.total_log << "," << (r.ok ? 1 : 0) << "\n";
        }
        for (const auto& [rule, a] : res.intercepts)
            out << "# fit rule=" << rule << " intercept=" << a << "\n";
    }
    for (const auto& [rule, a] : res.intercepts)
        std::cout << "rule " << rule << ": intercept " << a << "\n";
    if (failed) {
        std::cerr << failed << " recovery row(s) failed\n";
        return kExitNumerical;
    }
    return 0;
}

int cmd_profile(const CommonOpts& c) {
    json cfg = load_config(c, {"s_values", "T_values", "wells", "etas", "fit", "max_iter",
                               "grad_tol"});
    ProfileSweepConfig pc;
    pc.s_values = get_or<double>(cfg, "s_values", {0.55, 0.575, 0.6, 0.65});
    pc.T_values = get_or<double>(cfg, "T_values", {30, 100, 300, 1000});
    auto wells = get_or<double>(cfg, "wells", {-1.0, 1.0});
    if (wells.size() != 2) throw std::runtime_error("config: wells must have two entries");
    pc.wells = {wells[0], wells[1]};
    pc.etas = get_or<double>(cfg, "etas", {0.05, 0.1, 0.2});
    const std::string fit = cfg.value("fit", "three_term");
    if (fit == "two_term") pc.fit = FitModel::TwoTerm;
    else if (fit == "three_term") pc.fit = FitModel::ThreeTerm;
    else throw std::runtime_error("config: fit must be two_term or three_term");
    pc.opts.max_iter = cfg.value("max_iter", 5000);
    pc.opts.grad_tol = cfg.value("grad_tol", 1e-8);
    auto rows = run_profile_sweep(pc, c.threads);
    int failed = 0;
    auto out = open_out(c, c.format == "json" ? "profile.json" : "profile.csv", cfg);
    if (c.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            failed += r.optimization_ok ? 0 : 1;
            json j{{"s", r.s}, {"m", r.m_extrapolated}, {"limit_constant", r.limit_constant},
                   {"bracket_ok", r.bracket_ok}, {"optimization_ok", r.optimization_ok},
                   {"values_per_T", r.values_per_T}};
            if (r.lower_bound) j["lower_bound"] = *r.lower_bound;
            if (r.upper_bound) j["upper_bound"] = *r.upper_bound;
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << "\n";
    } else {
        out << "s,m,limit_constant,lower_bound,upper_bound,bracket_ok,optimization_ok\n";
        for (const auto& r : rows) {
            failed += r.optimization_ok ? 0 : 1;
            out << r.s << "," << r.m_extrapolated << "," << r.limit_constant << ",";
            if (r.lower_bound) out << *r.lower_bound;
            out << ",";
            if (r.upper_bound) out << *r.upper_bound;
            out << "," << (r.bracket_ok ? 1 : 0) << "," << (r.optimization_ok ? 1 : 0) << "\n";
        }
    }
    for (const auto& r : rows)
        std::cout << "s=" << r.s << " m=" << r.m_extrapolated
                  << " limit_constant=" << r.limit_constant
                  << (r.bracket_ok ? "" : " BRACKET-FAIL") << "\n";
    return failed ? kExitNumerical : 0;
}

int cmd_keylemma(const CommonOpts& c) {
    json cfg = load_config(c, {"cases", "s_values", "eps_values", "etas", "thetas", "N"});
    KeyLemmaAuditConfig kc;
    kc.cases = cfg.value("cases", 200);
    kc.s_values = get_or<double>(cfg, "s_values", {0.45, 0.55});
    kc.eps_values = get_or<double>(cfg, "eps_values", {1e-2, 1e-3});
    kc.etas = get_or<double>(cfg, "etas", {0.1, 0.2});
    kc.thetas = get_or<double>(cfg, "thetas", {0.1, 0.25});
    kc.N = cfg.value("N", 256);
    kc.seed = c.seed;
    auto rows = run_keylemma_audit(kc, c.threads);
    int violations = 0, skipped = 0;
    auto out = open_out(c, c.format == "json" ? "keylemma.json" : "keylemma.csv", cfg);
    if (c.format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"id", r.id}, {"s", r.s}, {"eps", r.eps}, {"eta", r.eta},
                           {"theta", r.theta}, {"lhs", r.lhs}, {"rhs", r.rhs},
                           {"margin", r.margin}, {"holds", r.holds},
                           {"generated", r.generated}});
        out << arr.dump(2) << "\n";
    } else {
        out << "id,s,eps,eta,theta,lhs,rhs,margin,holds\n";
        for (const auto& r : rows)
            out << r.id << "," << r.s << "," << r.eps << "," << r.eta << "," << r.theta << ","
                << r.lhs << "," << r.rhs << "," << r.margin << "," << (r.holds ? 1 : 0) << "\n";
    }
    for (const auto& r : rows) {
        if (!r.generated) ++skipped;
        else if (!r.holds) ++violations;
    }
    std::cout << rows.size() << " cases, " << violations << " violation(s), " << skipped
              << " skipped\n";
    return violations ? kExitViolation : 0;
}

int cmd_energy(const CommonOpts& c) {
    json cfg = load_config(c, {"s", "eps", "grid_csv", "jumps", "left_value"});
    const double s = cfg.value("s", 0.5);
    const double eps = cfg.value("eps", 1e-3);
    FracParams p{s, eps};
    DoubleWell well = DoubleWell::quartic();
    EnergyBreakdown e;
    int N = 0;
    if (cfg.contains("grid_csv")) {
        GridFunction u = load_grid_function(cfg.at("grid_csv").get<std::string>());
        N = u.n_cells();
        e = functional(u, p, well);
    } else {
        StepFunction u0;
        u0.jumps = get_or<double>(cfg, "jumps", {0.5});
        u0.left_value = cfg.value("left_value", -1);
        e = recovery_energy(u0, eps, p, well);
    }
    json j{{"potentialTerm", e.potentialTerm}, {"seminormTerm", e.seminormTerm},
           {"potentialCoeff", e.potentialCoeff}, {"seminormCoeff", e.seminormCoeff},
           {"total", e.total}};
    std::cout << j.dump(2) << "\n";
    // CSV ledger, appended
    fs::create_directories(c.out_dir);
    const fs::path ledger = fs::path(c.out_dir) / "energy_ledger.csv";
    const bool fresh = !fs::exists(ledger);
    std::ofstream out(ledger, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to energy ledger");
    out.precision(12);
    if (fresh) out << "s,eps,N,potentialTerm,seminormTerm,total\n";
    out << s << "," << eps << "," << N << "," << e.potentialTerm << "," << e.seminormTerm << ","
        << e.total << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for critically scaled nonlocal double-well energies"};
    app.require_subcommand(1);
    app.fallthrough(); // accept the global flags after the subcommand too
    CommonOpts c;
    app.add_option("--config", c.config_path, "JSON config file");
    app.add_option("--out", c.out_dir, "output directory");
    app.add_option("--seed", c.seed, "random seed recorded in outputs");
    app.add_option("--threads", c.threads, "worker threads for sweep rows");
    app.add_option("--format", c.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    auto* sc = app.add_subcommand("scaling", "scaling factors and regimes");
    auto* re = app.add_subcommand("recovery", "recovery-sequence energies and fits");
    auto* pr = app.add_subcommand("profile", "optimal-profile sweep");
    auto* kl = app.add_subcommand("keylemma", "lower-bound audit");
    auto* en = app.add_subcommand("energy", "single energy breakdown");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfig : 0;
    }
    try {
        if (sc->parsed()) return cmd_scaling(c);
        if (re->parsed()) return cmd_recovery(c);
        if (pr->parsed()) return cmd_profile(c);
        if (kl->parsed()) return cmd_keylemma(c);
        if (en->parsed()) return cmd_energy(c);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.rfind("cannot open config", 0) == 0 || what.find("config") != std::string::npos ||
            what.find("unknown") != std::string::npos) {
            std::cerr << "config error: " << what << "\n";
            return kExitConfig;
        }
        std::cerr << "numerical failure: " << what << "\n";
        return kExitNumerical;
    }
    return 0;
}
