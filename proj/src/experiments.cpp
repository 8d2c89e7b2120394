#include "fraclab/experiments.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

namespace fraclab {

std::uint64_t config_hash(const std::string& canonical_json) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_json) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    std::exception_ptr err;
    std::mutex err_mtx;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::vector<ScalingRow> run_scaling_sweep(const ScalingSweepConfig& cfg, int threads) {
    if (cfg.s_values.empty() || cfg.eps_values.empty())
        throw std::domain_error("scaling sweep: empty parameter grid");
    const int n = static_cast<int>(cfg.s_values.size() * cfg.eps_values.size());
    std::vector<ScalingRow> rows(n);
    parallel_for(n, threads, [&](int i) {
        const double s = cfg.s_values[i / cfg.eps_values.size()];
        const double eps = cfg.eps_values[i % cfg.eps_values.size()];
        FracParams p{s, eps};
        ScalingRow& r = rows[i];
        r.s = s;
        r.eps = eps;
        r.lambda = lambda_continuous(p);
        r.lambda_log = r.lambda * (-std::log(eps));
        auto rep = regime(p, cfg.threshold_lo, cfg.threshold_hi);
        r.regime_value = rep.value;
        r.regime_class = rep.cls;
    });
    return rows;
}

namespace {

double s_for_rule(const std::string& rule, double eps) {
    const double L = -std::log(eps);
    if (rule == "half") return 0.5;
    if (rule == "half_plus") return 0.5 + 1.0 / (L * L);
    if (rule == "half_minus") return 0.5 - 1.0 / (L * L);
    throw std::domain_error("recovery: unknown s rule '" + rule + "'");
}

} // namespace

RecoveryResult run_recovery_experiment(const RecoveryConfig& cfg, int threads) {
    if (cfg.eps_values.empty() || cfg.s_rules.empty())
        throw std::domain_error("recovery: empty parameter grid");
    StepFunction u0;
    u0.jumps = cfg.jumps;
    u0.left_value = cfg.left_value;
    u0.check();
    const DoubleWell well = DoubleWell::quartic();
    const int n = static_cast<int>(cfg.s_rules.size() * cfg.eps_values.size());
    RecoveryResult res;
    res.rows.resize(n);
    parallel_for(n, threads, [&](int i) {
        const std::string& rule = cfg.s_rules[i / cfg.eps_values.size()];
        const double eps = cfg.eps_values[i % cfg.eps_values.size()];
        RecoveryRow& r = res.rows[i];
        r.rule = rule;
        r.eps = eps;
        r.ok = false;
        try {
            r.s_eps = s_for_rule(rule, eps);
            EnergyBreakdown e = recovery_energy(u0, eps, FracParams{r.s_eps, eps}, well);
            r.total = e.total;
            r.total_log = e.total * (-std::log(eps));
            r.ok = true;
        } catch (const std::exception& ex) {
            r.error = ex.what();
        }
    });
    for (const auto& rule : cfg.s_rules) {
        std::vector<double> xs, ys;
        for (const auto& r : res.rows)
            if (r.ok && r.rule == rule) {
                xs.push_back(1.0 / (-std::log(r.eps)));
                ys.push_back(r.total);
            }
        if (xs.size() < 2) continue;
        Eigen::MatrixXd X(xs.size(), 2);
        Eigen::VectorXd y(xs.size());
        for (size_t k = 0; k < xs.size(); ++k) {
            X(k, 0) = 1.0;
            X(k, 1) = xs[k];
            y(k) = ys[k];
        }
        Eigen::Vector2d c = X.colPivHouseholderQr().solve(y);
        res.intercepts.emplace_back(rule, c(0));
    }
    return res;
}

std::vector<ProfileSweepRow> run_profile_sweep(const ProfileSweepConfig& cfg, int threads) {
    if (cfg.s_values.empty() || cfg.T_values.size() < 3)
        throw std::domain_error("profile sweep: need s values and >= 3 T values");
    (void)threads; // rows share large dense forms; executed serially
    const DoubleWell well = DoubleWell::quartic(cfg.wells.first, cfg.wells.second);
    std::vector<ProfileSweepRow> rows;
    for (double s : cfg.s_values) {
        ProfileSweepRow row;
        row.s = s;
        row.optimization_ok = true;
        row.bracket_ok = true;
        try {
            const bool critical = std::abs(2.0 * s - 1.0) < kHalfBranchTol;
            if (critical) {
                row.m_extrapolated = m_half_extrapolate(cfg.T_values, cfg.fit, cfg.opts, well,
                                                        &row.values_per_T);
                row.limit_constant = row.m_extrapolated;
            } else {
                row.m_extrapolated =
                    m_s_extrapolate(s, cfg.T_values, cfg.fit, cfg.opts, well, &row.values_per_T);
                row.limit_constant = (2.0 * s - 1.0) * row.m_extrapolated;
                double lb = -1.0;
                for (double eta : cfg.etas) lb = std::max(lb, analytic_lower_bound(s, eta, well));
                row.lower_bound = lb;
                row.upper_bound = analytic_upper_bound(s);
                row.bracket_ok = row.m_extrapolated >= 0.98 * lb &&
                                 row.m_extrapolated <= 1.02 * *row.upper_bound;
            }
        } catch (const std::exception& ex) {
            row.optimization_ok = false;
            row.bracket_ok = false;
            row.error = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<GridFunction> random_admissible(std::uint64_t seed, int N, double eta,
                                              double theta) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int attempt = 0; attempt < 20; ++attempt) {
        // plateau fractions comfortably above theta
        const double fL = theta + 0.03 + 0.2 * (0.45 - theta) * U(rng);
        const double fR = theta + 0.03 + 0.2 * (0.45 - theta) * U(rng);
        const double lowL = -(1.0 - eta) - 0.02 - 0.3 * U(rng);
        const double highR = (1.0 - eta) + 0.02 + 0.3 * U(rng);
        GridFunction u;
        u.a = 0.0;
        u.b = 1.0;
        u.values.assign(N + 1, 0.0);
        // random smooth filler between the plateaus
        const int modes = 3;
        double amp[modes], ph[modes];
        for (int m = 0; m < modes; ++m) {
            amp[m] = 0.25 * U(rng);
            ph[m] = 2.0 * M_PI * U(rng);
        }
        for (int i = 0; i <= N; ++i) {
            const double x = static_cast<double>(i) / N;
            if (x <= fL) {
                u.values[i] = lowL + 0.01 * std::sin(20.0 * x + ph[0]);
            } else if (x >= 1.0 - fR) {
                u.values[i] = highR + 0.01 * std::sin(20.0 * x + ph[1]);
            } else {
                const double t = (x - fL) / (1.0 - fR - fL);
                double v = lowL + (highR - lowL) * t;
                for (int m = 0; m < modes; ++m)
                    v += amp[m] * std::sin((m + 1) * M_PI * t + ph[m]);
                u.values[i] = std::clamp(v, -1.45, 1.45);
            }
        }
        // keep the plateaus admissible after the wiggle
        for (int i = 0; i <= N; ++i) {
            const double x = static_cast<double>(i) / N;
            if (x <= fL) u.values[i] = std::min(u.values[i], eta - 1.0 - 1e-3);
            if (x >= 1.0 - fR) u.values[i] = std::max(u.values[i], 1.0 - eta + 1e-3);
        }
        if (measure_condition(u, 0.0, 1.0, eta, theta)) return u;
        rng.discard(7);
    }
    return std::nullopt;
}

std::vector<KeyLemmaRow> run_keylemma_audit(const KeyLemmaAuditConfig& cfg, int threads) {
    if (cfg.cases < 1 || cfg.s_values.empty() || cfg.eps_values.empty() || cfg.etas.empty() ||
        cfg.thetas.empty())
        throw std::domain_error("keylemma audit: empty parameter grid");
    const DoubleWell well = DoubleWell::quartic();
    std::vector<KeyLemmaRow> rows(cfg.cases);
    // warm the (small) form cache serially to avoid duplicate assemblies
    for (double s : cfg.s_values) cached_form(0.0, 1.0, cfg.N, s);
    parallel_for(cfg.cases, threads, [&](int i) {
        KeyLemmaRow& r = rows[i];
        r.id = i;
        r.s = cfg.s_values[i % cfg.s_values.size()];
        r.eps = cfg.eps_values[(i / cfg.s_values.size()) % cfg.eps_values.size()];
        r.eta = cfg.etas[(i / 4) % cfg.etas.size()];
        r.theta = cfg.thetas[(i / 8) % cfg.thetas.size()];
        auto u = random_admissible(cfg.seed + 1000003ull * i, cfg.N, r.eta, r.theta);
        r.generated = u.has_value();
        if (!r.generated) {
            r.holds = true; // skipped, logged by the caller
            return;
        }
        auto chk = verify_key_lemma(*u, {0.0, 1.0}, FracParams{r.s, r.eps}, r.eta, r.theta, well);
        r.lhs = chk.lhs;
        r.rhs = chk.rhs;
        r.margin = chk.lhs - chk.rhs;
        r.holds = chk.holds;
    });
    return rows;
}

} // namespace fraclab
