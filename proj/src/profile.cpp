#include "fraclab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <Eigen/Dense>

#include "fraclab/energy.hpp"
#include "fraclab/gagliardo.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/scaling.hpp"

namespace fraclab {

int n_for_T(double T) {
    return std::min(kMaxFormCells, static_cast<int>(std::ceil(100.0 * T)));
}

GridFunction ramp_init(const ProfileProblem& prob) {
    GridFunction u;
    u.a = -prob.T;
    u.b = prob.T;
    u.values.resize(prob.N + 1);
    const double mid = 0.5 * (prob.well.alpha() + prob.well.beta());
    const double half = 0.5 * (prob.well.beta() - prob.well.alpha());
    for (int i = 0; i <= prob.N; ++i) {
        const double t = std::clamp(u.node(i), -1.0, 1.0);
        u.values[i] = mid + half * t;
    }
    return u;
}

namespace {

// E(v) = int W + v^T Q v with gradient, sharing one matvec.
struct Objective {
    const ProfileProblem& prob;
    std::shared_ptr<const SeminormForm> form;
    double h;

    double operator()(const Eigen::VectorXd& v, Eigen::VectorXd& g) const {
        const GaussRule& gr = gauss_rule(kPotentialQuadOrder);
        const int N = prob.N;
        double pot = 0.0;
        g.setZero();
        for (int i = 0; i < N; ++i) {
            for (size_t p = 0; p < gr.x.size(); ++p) {
                const double t = gr.x[p], w = gr.w[p] * h;
                const double u = v[i] * (1.0 - t) + v[i + 1] * t;
                pot += w * prob.well.eval(u);
                const double dw = w * prob.well.deriv(u);
                g[i] += dw * (1.0 - t);
                g[i + 1] += dw * t;
            }
        }
        Eigen::VectorXd Qv = form->matrix() * v;
        g.noalias() += 2.0 * Qv;
        return pot + v.dot(Qv);
    }
};

} // namespace

double profile_objective(const ProfileProblem& prob, const std::vector<double>& v,
                         std::vector<double>* grad) {
    if (static_cast<int>(v.size()) != prob.N + 1)
        throw std::domain_error("profile_objective: nodal vector size mismatch");
    Objective obj{prob, cached_form(-prob.T, prob.T, prob.N, prob.s), 2.0 * prob.T / prob.N};
    Eigen::Map<const Eigen::VectorXd> mv(v.data(), v.size());
    Eigen::VectorXd g(v.size());
    const double e = obj(mv, g);
    if (grad) grad->assign(g.data(), g.data() + g.size());
    return e;
}

ProfileResult minimize_profile(const ProfileProblem& prob, const GridFunction& init,
                               const MinimizeOpts& opts) {
    if (!(prob.s > 0.0 && prob.s < 1.0)) throw std::domain_error("minimize_profile: bad s");
    if (prob.N < 4) throw std::domain_error("minimize_profile: N too small");
    init.check();
    if (static_cast<int>(init.values.size()) != prob.N + 1 ||
        std::abs(init.a + prob.T) > 1e-12 || std::abs(init.b - prob.T) > 1e-12)
        throw std::domain_error("minimize_profile: init grid mismatch");
    const double alpha = prob.well.alpha(), beta = prob.well.beta();
    if (std::abs(init.values.front() - alpha) > 1e-12 ||
        std::abs(init.values.back() - beta) > 1e-12)
        throw std::domain_error("minimize_profile: init violates boundary pins");

    Objective obj{prob, cached_form(-prob.T, prob.T, prob.N, prob.s), 2.0 * prob.T / prob.N};
    const int N = prob.N, M = N - 1; // free interior dofs 1..N-1
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(init.values.data(), N + 1);
    Eigen::VectorXd g(N + 1), gtrial(N + 1);

    double E = obj(v, g);
    // L-BFGS two-loop recursion on the interior block
    std::deque<Eigen::VectorXd> S, Y;
    std::deque<double> rho;
    auto interior = [M](Eigen::VectorXd& full) {
        return Eigen::Map<Eigen::VectorXd>(full.data() + 1, M);
    };

    ProfileResult res;
    int it = 0;
    bool line_search_failed = false;
    for (; it < opts.max_iter; ++it) {
        const double gnorm = interior(g).norm();
        res.gradient_norm = gnorm;
        if (gnorm <= opts.grad_tol * (1.0 + std::abs(E))) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd q = interior(g);
        std::vector<double> a(S.size());
        for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
            a[k] = rho[k] * S[k].dot(q);
            q -= a[k] * Y[k];
        }
        if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
        for (size_t k = 0; k < S.size(); ++k) {
            const double b = rho[k] * Y[k].dot(q);
            q += (a[k] - b) * S[k];
        }
        Eigen::VectorXd dir = -q;
        double slope = dir.dot(interior(g));
        if (slope >= 0.0) { // fall back to steepest descent
            dir = -interior(g);
            slope = -dir.squaredNorm();
        }
        double step = 1.0;
        Eigen::VectorXd vtrial = v;
        double Etrial = E;
        bool ok = false;
        // the noise term keeps Armijo meaningful once |step*slope| drops to
        // the rounding floor of the energy evaluation
        const double noise = 1e-13 * (1.0 + std::abs(E));
        for (int ls = 0; ls < 50; ++ls) {
            vtrial = v;
            Eigen::Map<Eigen::VectorXd>(vtrial.data() + 1, M) += step * dir;
            Etrial = obj(vtrial, gtrial);
            if (Etrial <= E + 1e-4 * step * slope + noise) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) {
            if (!S.empty()) { // drop the quasi-Newton memory, retry steepest
                S.clear();
                Y.clear();
                rho.clear();
                continue;
            }
            line_search_failed = true;
            break;
        }
        Eigen::VectorXd snew = step * dir;
        Eigen::VectorXd ynew = gtrial.segment(1, M) - g.segment(1, M);
        const double sy = snew.dot(ynew);
        if (sy > 1e-14 * snew.norm() * ynew.norm()) {
            S.push_back(std::move(snew));
            Y.push_back(std::move(ynew));
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opts.lbfgs_memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        v = std::move(vtrial);
        g = gtrial;
        E = Etrial;
    }
    res.iterations = it;
    res.raw_energy = E;
    const bool critical = std::abs(2.0 * prob.s - 1.0) < kHalfBranchTol;
    res.value = critical ? E / std::log(2.0 * prob.T) : E;
    res.minimizer.a = -prob.T;
    res.minimizer.b = prob.T;
    res.minimizer.values.assign(v.data(), v.data() + v.size());
    if (line_search_failed && !res.converged &&
        res.gradient_norm > 1e3 * opts.grad_tol * (1.0 + std::abs(E)))
        throw std::runtime_error("minimize_profile: line search exhausted before descent");
    return res;
}

ProfileResult m_half_truncated(double T, int N, const MinimizeOpts& opts,
                               const DoubleWell& well) {
    if (!(T >= 2.0)) throw std::domain_error("m_half_truncated: requires T >= 2");
    ProfileProblem prob{0.5, T, N, well};
    return minimize_profile(prob, ramp_init(prob), opts);
}

double extrapolate_in_T(double s, const std::vector<double>& Ts,
                        const std::vector<double>& values, FitModel model) {
    if (Ts.size() != values.size() || Ts.size() < 3)
        throw std::domain_error("extrapolate_in_T: need >= 3 samples");
    const bool critical = std::abs(2.0 * s - 1.0) < kHalfBranchTol;
    const int cols = (model == FitModel::TwoTerm) ? 2 : 3;
    Eigen::MatrixXd X(Ts.size(), cols);
    Eigen::VectorXd y(Ts.size());
    for (size_t i = 0; i < Ts.size(); ++i) {
        const double phi = critical ? 1.0 / std::log(2.0 * Ts[i]) : std::pow(Ts[i], 1.0 - 2.0 * s);
        X(i, 0) = 1.0;
        X(i, 1) = phi;
        if (cols == 3) X(i, 2) = phi * phi;
        y(i) = values[i];
    }
    Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
    return c(0);
}

double m_s_extrapolate(double s, const std::vector<double>& Ts, FitModel model,
                       const MinimizeOpts& opts, const DoubleWell& well,
                       std::vector<double>* values_out) {
    if (!(s > 0.5)) throw std::domain_error("m_s_extrapolate: requires s > 1/2");
    std::vector<double> vals;
    for (double T : Ts) {
        ProfileProblem prob{s, T, n_for_T(T), well};
        vals.push_back(minimize_profile(prob, ramp_init(prob), opts).value);
    }
    if (values_out) *values_out = vals;
    return extrapolate_in_T(s, Ts, vals, model);
}

double m_half_extrapolate(const std::vector<double>& Ts, FitModel model,
                          const MinimizeOpts& opts, const DoubleWell& well,
                          std::vector<double>* values_out) {
    std::vector<double> vals;
    for (double T : Ts) vals.push_back(m_half_truncated(T, n_for_T(T), opts, well).value);
    if (values_out) *values_out = vals;
    return extrapolate_in_T(0.5, Ts, vals, model);
}

double analytic_upper_bound(double s) {
    if (!(s > 0.5 && s < 1.0)) throw std::domain_error("analytic_upper_bound: requires s in (1/2,1)");
    const double p = std::pow(2.0, 1.0 - 2.0 * s);
    const double q = std::pow(2.0, 3.0 - 2.0 * s);
    return 16.0 / 15.0                                        // int_{-1}^{1} (1-x^2)^2
           + 8.0 * p / (2.0 * s * (2.0 * s - 1.0))            // both flat tails against each other
           + 2.0 * q / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))    // ramp against itself
           + 4.0 * q / (2.0 * s * (3.0 - 2.0 * s));           // ramp against both tails
}

double analytic_lower_bound(double s, double eta, const DoubleWell& w) {
    if (!(s > 0.5 && s < 1.0)) throw std::domain_error("analytic_lower_bound: requires s in (1/2,1)");
    const double ceta = w.c_eta(eta);
    const double amp = 8.0 * (1.0 - eta) * (1.0 - eta);
    const double delta = std::pow(amp / (2.0 * s * ceta), 1.0 / (2.0 * s));
    return ceta * delta + amp * std::pow(delta, 1.0 - 2.0 * s) / (2.0 * s * (2.0 * s - 1.0));
}

} // namespace fraclab
