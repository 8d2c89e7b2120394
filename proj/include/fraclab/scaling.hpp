#pragma once
#include <utility>

namespace fraclab {

// Parameter pair (s, eps), 0 < s < 1, 0 < eps < 1.
struct FracParams {
    double s;
    double eps;
};

void validate(const FracParams& p); // throws std::domain_error on violation

enum class Regime { SubLogarithmic, Order1, SuperLogarithmic };

struct RegimeReport {
    double value; // (2s-1)*|log eps|
    Regime cls;
};

// Threshold |2s-1| below which the critical branch 1/|log eps| is used.
inline constexpr double kHalfBranchTol = 1e-12;

// Stable kernel x/(1-exp(-x)); equals 1 at x=0.
double phi_kernel(double x);

double lambda_plus(const FracParams& p);  // requires s > 1/2
double lambda_minus(const FracParams& p); // requires s < 1/2
double lambda_continuous(const FracParams& p);

// (lambda/eps, lambda*eps^{(2s-1)^+}): coefficients of the potential and
// seminorm terms of the scaled energy.
std::pair<double, double> scaled_coefficients(const FracParams& p);

RegimeReport regime(const FracParams& p, double lo = 0.1, double hi = 10.0);

} // namespace fraclab
