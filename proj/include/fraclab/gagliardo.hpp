#pragma once
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/gridfn.hpp"

namespace fraclab {

struct Interval {
    double lo, hi;
};

// Integral of |x-y|^{-1-2s} over I1 x I2 for intervals disjoint up to a
// common endpoint, by the stable closed form (logarithmic branch at s=1/2).
// Touching intervals give +inf for s >= 1/2 (the integral diverges there).
double kernel_mass(Interval I1, Interval I2, double s);

// Dense symmetric quadrature form Q on a uniform grid: v^T Q v approximates
// the squared Gagliardo seminorm of the piecewise-linear interpolant over
// (a,b)^2.  Same-cell and adjacent-cell pairs are integrated after removing
// the singularity through the bounded difference quotient (closed form /
// Duffy split with Gauss rules); distant pairs use exact kernel moments so
// that affine functions are handled exactly.
class SeminormForm {
public:
    SeminormForm(double a, double b, int N, double s, int order,
                 Eigen::MatrixXd Q)
        : a_(a), b_(b), N_(N), s_(s), order_(order), Q_(std::move(Q)) {}

    double a() const { return a_; }
    double b() const { return b_; }
    int n_cells() const { return N_; }
    double s() const { return s_; }
    int order() const { return order_; }
    const Eigen::MatrixXd& matrix() const { return Q_; }

    double evaluate(const std::vector<double>& v) const;
    double evaluate(const Eigen::VectorXd& v) const;
    // g += coeff * 2 Q v  (gradient of v^T Q v)
    void add_gradient(const Eigen::VectorXd& v, double coeff, Eigen::VectorXd& g) const;

    void save(const std::string& path) const; // bit-exact binary cache
    static SeminormForm load(const std::string& path);

private:
    double a_, b_;
    int N_;
    double s_;
    int order_;
    Eigen::MatrixXd Q_;
};

inline constexpr int kDefaultNearDiagonalOrder = 8;
inline constexpr int kMaxFormCells = 4096;

SeminormForm assemble_form(double a, double b, int N, double s,
                           int order = kDefaultNearDiagonalOrder);

// Shared cache keyed by (a,b,N,s,order).
std::shared_ptr<const SeminormForm> cached_form(double a, double b, int N, double s,
                                                int order = kDefaultNearDiagonalOrder);
void clear_form_cache();

double seminorm_sq(const GridFunction& u, double s,
                   int order = kDefaultNearDiagonalOrder);

// Both integration variables restricted to the union E of cell-aligned
// intervals of u's grid.
double seminorm_sq_local(const GridFunction& u, const std::vector<Interval>& E, double s,
                         int order = kDefaultNearDiagonalOrder);

// Exact squared seminorm over (x.front(), x.back())^2 of the piecewise-linear
// function through the (not necessarily uniform) breakpoints (x_k, v_k).
// Used for profiles whose natural breakpoints are too fine for the uniform
// dense form (recovery layers at small eps).
double seminorm_sq_breakpoints(const std::vector<double>& x, const std::vector<double>& v,
                               double s);

} // namespace fraclab
