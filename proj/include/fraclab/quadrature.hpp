#pragma once
#include <vector>

namespace fraclab {

// Gauss-Legendre rule mapped to [0,1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Nodes/weights computed by Newton iteration on P_n; cached per order.
const GaussRule& gauss_rule(int order);

} // namespace fraclab
