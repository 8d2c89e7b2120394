#include "fraclab/scaling.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

void validate(const FracParams& p) {
    if (!(p.s > 0.0 && p.s < 1.0)) throw std::domain_error("FracParams: s must lie in (0,1)");
    if (!(p.eps > 0.0 && p.eps < 1.0)) throw std::domain_error("FracParams: eps must lie in (0,1)");
}

double phi_kernel(double x) {
    // x/(1-e^{-x}); -expm1(-x) avoids cancellation for small |x|
    if (std::abs(x) < 1e-14) return 1.0 + 0.5 * x;
    return x / (-std::expm1(-x));
}

double lambda_plus(const FracParams& p) {
    validate(p);
    if (!(p.s > 0.5)) throw std::domain_error("lambda_plus: requires s > 1/2");
    const double L = -std::log(p.eps);
    const double x = (2.0 * p.s - 1.0) * L;
    // (1-2s)/(eps^{2s-1}-1) = phi(x)/L
    return phi_kernel(x) / L;
}

double lambda_minus(const FracParams& p) {
    validate(p);
    if (!(p.s < 0.5)) throw std::domain_error("lambda_minus: requires s < 1/2");
    const double L = -std::log(p.eps);
    const double y = (1.0 - 2.0 * p.s) / (2.0 * p.s) * L;
    // (2s-1)/(eps^{(1-2s)/(2s)}-1) = 2s*phi(y)/L
    return 2.0 * p.s * phi_kernel(y) / L;
}

double lambda_continuous(const FracParams& p) {
    validate(p);
    const double L = -std::log(p.eps);
    if (std::abs(2.0 * p.s - 1.0) < kHalfBranchTol) return 1.0 / L;
    return (p.s > 0.5) ? lambda_plus(p) : lambda_minus(p);
}

std::pair<double, double> scaled_coefficients(const FracParams& p) {
    const double lam = lambda_continuous(p);
    const double expo = std::max(2.0 * p.s - 1.0, 0.0);
    return {lam / p.eps, lam * std::pow(p.eps, expo)};
}

RegimeReport regime(const FracParams& p, double lo, double hi) {
    validate(p);
    RegimeReport r;
    r.value = (2.0 * p.s - 1.0) * (-std::log(p.eps));
    const double a = std::abs(r.value);
    if (a < lo)
        r.cls = Regime::SubLogarithmic;
    else if (a > hi)
        r.cls = Regime::SuperLogarithmic;
    else
        r.cls = Regime::Order1;
    return r;
}

} // namespace fraclab
