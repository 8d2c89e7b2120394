#include "fraclab/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclab/quadrature.hpp"

namespace fraclab {

namespace {

double segment_potential(double v0, double v1, double len, const DoubleWell& w, int order) {
    const GaussRule& gr = gauss_rule(order);
    double acc = 0.0;
    for (size_t p = 0; p < gr.x.size(); ++p)
        acc += gr.w[p] * w.eval(v0 + (v1 - v0) * gr.x[p]);
    return len * acc;
}

EnergyBreakdown combine(double pot, double sem, const FracParams& p) {
    EnergyBreakdown e;
    e.potentialTerm = pot;
    e.seminormTerm = sem;
    auto [cp, cs] = scaled_coefficients(p);
    e.potentialCoeff = cp;
    e.seminormCoeff = cs;
    e.total = cp * pot + cs * sem;
    return e;
}

} // namespace

double potential_integral(const GridFunction& u, const DoubleWell& w, int order) {
    u.check();
    const double h = u.h();
    double acc = 0.0;
    for (int i = 0; i < u.n_cells(); ++i)
        acc += segment_potential(u.values[i], u.values[i + 1], h, w, order);
    return acc;
}

double potential_integral_local(const GridFunction& u, const std::vector<Interval>& E,
                                const DoubleWell& w, int order) {
    u.check();
    const double h = u.h();
    double acc = 0.0;
    for (const auto& I : E) {
        const double flo = (I.lo - u.a) / h, fhi = (I.hi - u.a) / h;
        const long ilo = std::lround(flo), ihi = std::lround(fhi);
        if (std::abs(flo - ilo) > 1e-9 || std::abs(fhi - ihi) > 1e-9 || ilo < 0 ||
            ihi > u.n_cells())
            throw std::domain_error("potential_integral_local: interval not cell-aligned");
        for (long i = ilo; i < ihi; ++i)
            acc += segment_potential(u.values[i], u.values[i + 1], h, w, order);
    }
    return acc;
}

EnergyBreakdown functional(const GridFunction& u, const FracParams& p, const DoubleWell& w) {
    return combine(potential_integral(u, w), seminorm_sq(u, p.s), p);
}

EnergyBreakdown functional_local(const GridFunction& u, const std::vector<Interval>& E,
                                 const FracParams& p, const DoubleWell& w) {
    return combine(potential_integral_local(u, E, w), seminorm_sq_local(u, E, p.s), p);
}

EnergyBreakdown recovery_energy(const StepFunction& u0, double eps, const FracParams& p,
                                const DoubleWell& w) {
    std::vector<double> bx, bv;
    recovery_breakpoints(u0, eps, bx, bv);
    double pot = 0.0;
    for (size_t k = 0; k + 1 < bx.size(); ++k)
        pot += segment_potential(bv[k], bv[k + 1], bx[k + 1] - bx[k], w, kPotentialQuadOrder);
    return combine(pot, seminorm_sq_breakpoints(bx, bv, p.s), p);
}

KeyLemmaBound key_lemma_bound(Interval I, const FracParams& p, double eta, double theta,
                              const DoubleWell& w) {
    validate(p);
    if (std::abs(2.0 * p.s - 1.0) < kHalfBranchTol)
        throw std::domain_error("key_lemma_bound: s = 1/2 is excluded");
    if (!(eta > 0.0 && eta < 0.25)) throw std::domain_error("key_lemma_bound: eta out of range");
    if (!(theta > 0.0 && theta < 0.5)) throw std::domain_error("key_lemma_bound: theta out of range");
    if (!(I.hi > I.lo)) throw std::domain_error("key_lemma_bound: degenerate interval");
    const double s = p.s, eps = p.eps, len = I.hi - I.lo;
    const double ceta = w.c_eta(eta);
    const double amp = 8.0 * (1.0 - eta) * (1.0 - eta);
    KeyLemmaBound kb;
    kb.eta = eta;
    kb.theta = theta;
    kb.Z = std::pow(amp * std::pow(len, -2.0 * s) / (2.0 * s * ceta), 1.0 / (2.0 * s));
    const double thetaCorr = 2.0 * (1.0 - theta) / theta;
    if (s > 0.5) {
        kb.branch = KLBranch::SuperHalf;
        // ((Z eps)^{1-2s} - 1)/(2s-1) via expm1 for stability near s = 1/2
        const double tail =
            std::expm1((1.0 - 2.0 * s) * std::log(kb.Z * eps)) / (2.0 * s - 1.0);
        const double inner = ceta * len * kb.Z +
                             amp * std::pow(eps * len, 2.0 * s - 1.0) / (2.0 * s) *
                                 (tail - thetaCorr);
        kb.bound = lambda_plus(p) * inner;
    } else {
        kb.branch = KLBranch::SubHalf;
        const double zc = kb.Z * std::pow(eps, 1.0 / (2.0 * s)); // Z eps^{1/(2s)}
        const double tail = std::expm1((1.0 - 2.0 * s) * std::log(zc)) / (2.0 * s - 1.0);
        const double inner = ceta * len * std::pow(eps, 1.0 / (2.0 * s) - 1.0) * kb.Z +
                             amp * std::pow(len, 2.0 * s - 1.0) / (2.0 * s) *
                                 (tail - thetaCorr);
        kb.bound = lambda_minus(p) * inner;
    }
    return kb;
}

KeyLemmaCheck verify_key_lemma(const GridFunction& u, Interval I, const FracParams& p,
                               double eta, double theta, const DoubleWell& w) {
    KeyLemmaCheck r;
    r.precondition_ok = measure_condition(u, I.lo, I.hi, eta, theta);
    if (!r.precondition_ok) return r;
    r.lhs = functional_local(u, {I}, p, w).total;
    r.rhs = key_lemma_bound(I, p, eta, theta, w).bound;
    r.holds = r.lhs >= r.rhs - 1e-8 * (1.0 + std::abs(r.rhs));
    return r;
}

} // namespace fraclab
