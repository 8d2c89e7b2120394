#include "fraclab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fraclab {

static GaussRule make_rule(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_rule: order out of range");
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    // roots of P_n on [-1,1] via Newton with Chebyshev-like initial guess
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double wgt = 2.0 / ((1.0 - z * z) * pp * pp);
        // map to [0,1]
        r.x[i] = 0.5 * (1.0 - z);
        r.x[n - 1 - i] = 0.5 * (1.0 + z);
        r.w[i] = 0.5 * wgt;
        r.w[n - 1 - i] = 0.5 * wgt;
    }
    return r;
}

const GaussRule& gauss_rule(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lk(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
    return it->second;
}

} // namespace fraclab
