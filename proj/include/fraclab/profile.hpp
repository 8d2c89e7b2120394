#pragma once
#include <optional>
#include <vector>

#include "fraclab/gridfn.hpp"
#include "fraclab/potentials.hpp"

namespace fraclab {

// Transition problem on (-T,T): minimize int W(v) + [v]_s^2 over (-T,T)^2
// with v pinned to the wells at the boundary nodes.  For s = 1/2 the
// reported value carries the extra 1/log(2T) normalization.
struct ProfileProblem {
    double s = 0.5;
    double T = 10.0;
    int N = 1000;
    DoubleWell well = DoubleWell::quartic();
};

struct MinimizeOpts {
    int max_iter = 5000;
    double grad_tol = 1e-8; // stop at ||g|| <= grad_tol*(1+|E|)
    int lbfgs_memory = 10;
};

struct ProfileResult {
    double value = 0.0;   // objective (1/log(2T)-scaled when s = 1/2)
    double raw_energy = 0.0;
    GridFunction minimizer;
    int iterations = 0;
    double gradient_norm = 0.0;
    bool converged = false;
    std::optional<double> extrapolated;
};

// Grid resolution rule: cell width 0.02 up to the dense-form cap.
int n_for_T(double T);

// Clamped-linear ramp between the wells (the canonical test profile).
GridFunction ramp_init(const ProfileProblem& prob);

// Energy and gradient of the discrete objective at nodal vector v.
double profile_objective(const ProfileProblem& prob, const std::vector<double>& v,
                         std::vector<double>* grad);

ProfileResult minimize_profile(const ProfileProblem& prob, const GridFunction& init,
                               const MinimizeOpts& opts = {});

ProfileResult m_half_truncated(double T, int N, const MinimizeOpts& opts = {},
                               const DoubleWell& well = DoubleWell::quartic());

enum class FitModel { TwoTerm, ThreeTerm };

// Least-squares intercept of y = m + c*phi(T) (+ d*phi(T)^2 for ThreeTerm),
// phi = T^{1-2s} for s > 1/2 and 1/log(2T) at s = 1/2.
double extrapolate_in_T(double s, const std::vector<double>& Ts,
                        const std::vector<double>& values, FitModel model);

// Runs the truncated problems over Ts and extrapolates; s > 1/2.
double m_s_extrapolate(double s, const std::vector<double>& Ts,
                       FitModel model = FitModel::ThreeTerm,
                       const MinimizeOpts& opts = {},
                       const DoubleWell& well = DoubleWell::quartic(),
                       std::vector<double>* values_out = nullptr);

// Same for the log-scaled s = 1/2 problem.
double m_half_extrapolate(const std::vector<double>& Ts,
                          FitModel model = FitModel::ThreeTerm,
                          const MinimizeOpts& opts = {},
                          const DoubleWell& well = DoubleWell::quartic(),
                          std::vector<double>* values_out = nullptr);

// Exact full-line energy of the clamped-linear ramp (s > 1/2), term by term.
double analytic_upper_bound(double s);

// C_eta*delta + amp*delta^{1-2s}/(2s(2s-1)) minimized over delta, with
// amp = 8(1-eta)^2; a valid lower bound for the full-line infimum (s > 1/2).
double analytic_lower_bound(double s, double eta,
                            const DoubleWell& w = DoubleWell::quartic());

} // namespace fraclab
