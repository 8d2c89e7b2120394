#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/energy.hpp"
#include "fraclab/profile.hpp"
#include "fraclab/scaling.hpp"

namespace fraclab {

inline constexpr const char* kToolVersion = "1.0.0";

// FNV-1a over the canonical (sorted-key) JSON dump of a config.
std::uint64_t config_hash(const std::string& canonical_json);

// Run `fn(i)` for i in [0,n) on `threads` workers (serial when threads <= 1).
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// ---- scaling sweep -------------------------------------------------------
struct ScalingSweepConfig {
    std::vector<double> s_values;
    std::vector<double> eps_values;
    double threshold_lo = 0.1;
    double threshold_hi = 10.0;
};

struct ScalingRow {
    double s, eps, lambda, lambda_log, regime_value;
    Regime regime_class;
};

std::vector<ScalingRow> run_scaling_sweep(const ScalingSweepConfig& cfg, int threads = 1);

// ---- recovery experiment -------------------------------------------------
// s_rule: s_eps as a function of eps.  "half" gives 1/2; "half_plus" and
// "half_minus" give 1/2 +- |log eps|^{-2}.
struct RecoveryConfig {
    std::vector<double> jumps{0.5};
    int left_value = -1;
    std::vector<double> eps_values{1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<std::string> s_rules{"half"};
};

struct RecoveryRow {
    std::string rule;
    double eps, s_eps, total, total_log; // total_log = total * |log eps|
    bool ok;
    std::string error;
};

struct RecoveryResult {
    std::vector<RecoveryRow> rows;
    // per rule: least-squares intercept of total = a + b/|log eps|
    std::vector<std::pair<std::string, double>> intercepts;
};

RecoveryResult run_recovery_experiment(const RecoveryConfig& cfg, int threads = 1);

// ---- profile sweep -------------------------------------------------------
struct ProfileSweepConfig {
    std::vector<double> s_values{0.55, 0.575, 0.6, 0.65}; // 0.5 allowed
    std::vector<double> T_values{30, 100, 300, 1000};
    std::pair<double, double> wells{-1.0, 1.0};
    std::vector<double> etas{0.05, 0.1, 0.2};
    FitModel fit = FitModel::ThreeTerm;
    MinimizeOpts opts{};
};

struct ProfileSweepRow {
    double s;
    double m_extrapolated;   // m_s, or the log-scaled constant at s = 1/2
    double limit_constant;   // (2s-1)*m_s for s > 1/2; m itself at s = 1/2
    std::optional<double> lower_bound, upper_bound; // s > 1/2 only
    bool bracket_ok;
    bool optimization_ok;
    std::string error;
    std::vector<double> values_per_T;
};

std::vector<ProfileSweepRow> run_profile_sweep(const ProfileSweepConfig& cfg, int threads = 1);

// ---- key-lemma audit -----------------------------------------------------
struct KeyLemmaAuditConfig {
    int cases = 200;
    std::vector<double> s_values{0.45, 0.55};
    std::vector<double> eps_values{1e-2, 1e-3};
    std::vector<double> etas{0.1, 0.2};
    std::vector<double> thetas{0.1, 0.25};
    int N = 256;
    std::uint64_t seed = 20240901;
};

struct KeyLemmaRow {
    int id;
    double s, eps, eta, theta, lhs, rhs, margin;
    bool holds;
    bool generated; // admissible sample produced
};

std::vector<KeyLemmaRow> run_keylemma_audit(const KeyLemmaAuditConfig& cfg, int threads = 1);

// Seeded admissible sample: two plateaus beyond +-(1-eta) of length
// >= theta each, smooth filler in between; nullopt if generation fails.
std::optional<GridFunction> random_admissible(std::uint64_t seed, int N, double eta,
                                              double theta);

} // namespace fraclab
