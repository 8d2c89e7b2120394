#pragma once
#include <string>
#include <vector>

namespace fraclab {

// Continuous piecewise-linear interpolant of nodal values on a uniform grid.
struct GridFunction {
    double a = 0.0, b = 1.0;
    std::vector<double> values; // N+1 nodal values

    int n_cells() const { return static_cast<int>(values.size()) - 1; }
    double h() const { return (b - a) / n_cells(); }
    double node(int i) const { return a + i * h(); }
    double eval(double x) const;
    void check() const; // throws on malformed data
};

// Element of BV((a,b),{-1,1}) given by its interior jump set.
struct StepFunction {
    std::vector<double> jumps; // strictly increasing, strictly interior to (0,1)
    int left_value = -1;       // +1 or -1

    double eval(double x) const;
    void check() const;
};

int jump_count(const StepFunction& u0);

// Clamp nodal values to [-k, k].
GridFunction truncate(const GridFunction& u, double k);

// Piecewise-affine approximation of u0 with linear ramps of half-width eps
// at every jump.  The grid of N cells on (0,1) must place every t_i +- eps
// on a node; at least 8 cells per transition layer are required.
GridFunction recovery_sequence(const StepFunction& u0, double eps, int N);

// Breakpoint form of the same profile: sorted (x, value) pairs on [0,1].
// Used for exact energy evaluation at eps too small for a uniform grid.
void recovery_breakpoints(const StepFunction& u0, double eps,
                          std::vector<double>& x, std::vector<double>& v);

// Exact Lebesgue measure of {x in [lo,hi] : u(x) >= level} on the linear
// interpolant (per-cell root finding, no sampling).
double superlevel_measure(const GridFunction& u, double lo, double hi, double level);

// |I cap {u >= 1-eta}| >= theta|I| and |I cap {u <= eta-1}| >= theta|I|.
bool measure_condition(const GridFunction& u, double lo, double hi, double eta, double theta);

// CSV (x,u) with a one-line header, plus a JSON sidecar <path>.json for (a,b,N).
void save_grid_function(const GridFunction& u, const std::string& path);
GridFunction load_grid_function(const std::string& path);

} // namespace fraclab
