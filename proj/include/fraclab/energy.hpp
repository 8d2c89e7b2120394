#pragma once
#include <vector>

#include "fraclab/gagliardo.hpp"
#include "fraclab/gridfn.hpp"
#include "fraclab/potentials.hpp"
#include "fraclab/scaling.hpp"

namespace fraclab {

struct EnergyBreakdown {
    double potentialTerm = 0.0;  // unscaled int W(u)
    double seminormTerm = 0.0;   // unscaled [u]_s^2
    double potentialCoeff = 0.0; // lambda/eps
    double seminormCoeff = 0.0;  // lambda*eps^{(2s-1)^+}
    double total = 0.0;
};

inline constexpr int kPotentialQuadOrder = 8;

// Per-cell Gauss quadrature of int W(u) over the interpolant's grid.
double potential_integral(const GridFunction& u, const DoubleWell& w,
                          int order = kPotentialQuadOrder);
// Restricted to a union of cell-aligned intervals.
double potential_integral_local(const GridFunction& u, const std::vector<Interval>& E,
                                const DoubleWell& w, int order = kPotentialQuadOrder);

EnergyBreakdown functional(const GridFunction& u, const FracParams& p, const DoubleWell& w);
EnergyBreakdown functional_local(const GridFunction& u, const std::vector<Interval>& E,
                                 const FracParams& p, const DoubleWell& w);

// Scaled energy of the piecewise-affine recovery profile of u0, evaluated
// exactly on its breakpoint representation (usable at eps far below any
// affordable uniform-grid resolution).
EnergyBreakdown recovery_energy(const StepFunction& u0, double eps, const FracParams& p,
                                const DoubleWell& w);

enum class KLBranch { SuperHalf, SubHalf };

struct KeyLemmaBound {
    double eta = 0.0, theta = 0.0;
    double Z = 0.0;
    KLBranch branch = KLBranch::SuperHalf;
    double bound = 0.0;
};

// Lower bound for the scaled energy on I of any v whose phases each occupy
// at least a theta-fraction of I (levels +-(1-eta)); s != 1/2.
KeyLemmaBound key_lemma_bound(Interval I, const FracParams& p, double eta, double theta,
                              const DoubleWell& w);

struct KeyLemmaCheck {
    bool precondition_ok = false;
    double lhs = 0.0, rhs = 0.0;
    bool holds = false;
};

KeyLemmaCheck verify_key_lemma(const GridFunction& u, Interval I, const FracParams& p,
                               double eta, double theta, const DoubleWell& w);

} // namespace fraclab
