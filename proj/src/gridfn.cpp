#include "fraclab/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fraclab {

void GridFunction::check() const {
    if (!(b > a)) throw std::domain_error("GridFunction: requires b > a");
    if (n_cells() < 2) throw std::domain_error("GridFunction: requires N >= 2");
    for (double v : values)
        if (!std::isfinite(v)) throw std::domain_error("GridFunction: non-finite nodal value");
}

double GridFunction::eval(double x) const {
    const int N = n_cells();
    if (x <= a) return values.front();
    if (x >= b) return values.back();
    const double t = (x - a) / h();
    int i = std::min(static_cast<int>(t), N - 1);
    const double r = t - i;
    return values[i] * (1.0 - r) + values[i + 1] * r;
}

void StepFunction::check() const {
    if (left_value != 1 && left_value != -1)
        throw std::domain_error("StepFunction: leftValue must be +-1");
    for (size_t i = 0; i < jumps.size(); ++i) {
        if (!(jumps[i] > 0.0 && jumps[i] < 1.0))
            throw std::domain_error("StepFunction: jumps must be interior to (0,1)");
        if (i > 0 && !(jumps[i] > jumps[i - 1]))
            throw std::domain_error("StepFunction: jumps must be strictly increasing");
    }
}

double StepFunction::eval(double x) const {
    int v = left_value;
    for (double t : jumps) {
        if (x < t) break;
        v = -v;
    }
    return v;
}

int jump_count(const StepFunction& u0) { return static_cast<int>(u0.jumps.size()); }

GridFunction truncate(const GridFunction& u, double k) {
    if (!(k > 0.0)) throw std::domain_error("truncate: k must be positive");
    GridFunction r = u;
    for (double& v : r.values) v = std::clamp(v, -k, k);
    return r;
}

void recovery_breakpoints(const StepFunction& u0, double eps,
                          std::vector<double>& x, std::vector<double>& v) {
    u0.check();
    if (!(eps > 0.0)) throw std::domain_error("recovery: eps must be positive");
    // layers must not overlap each other or the endpoints
    double prev = 0.0;
    for (double t : u0.jumps) {
        if (t - eps <= prev) throw std::domain_error("recovery: transition layers overlap");
        prev = t + eps;
    }
    if (prev >= 1.0) throw std::domain_error("recovery: transition layers overlap");
    x.clear();
    v.clear();
    int sgn = u0.left_value;
    x.push_back(0.0);
    v.push_back(sgn);
    for (double t : u0.jumps) {
        x.push_back(t - eps);
        v.push_back(sgn);
        sgn = -sgn;
        x.push_back(t + eps);
        v.push_back(sgn);
    }
    x.push_back(1.0);
    v.push_back(sgn);
}

GridFunction recovery_sequence(const StepFunction& u0, double eps, int N) {
    std::vector<double> bx, bv;
    recovery_breakpoints(u0, eps, bx, bv);
    if (N < 2) throw std::domain_error("recovery: N must be >= 2");
    const double h = 1.0 / N;
    // commensurability: every breakpoint must land on a node
    for (double t : bx) {
        const double m = t / h;
        if (std::abs(m - std::round(m)) > 1e-9)
            throw std::domain_error("recovery: grid not commensurate with layer endpoints");
    }
    if (2.0 * eps * N < 8.0 - 1e-9)
        throw std::domain_error("recovery: fewer than 8 cells per transition layer");
    GridFunction u;
    u.a = 0.0;
    u.b = 1.0;
    u.values.resize(N + 1);
    size_t seg = 0;
    for (int i = 0; i <= N; ++i) {
        const double xi = i * h;
        while (seg + 2 < bx.size() && xi > bx[seg + 1] + 1e-12) ++seg;
        const double x0 = bx[seg], x1 = bx[seg + 1];
        const double r = (xi - x0) / (x1 - x0);
        u.values[i] = bv[seg] * (1.0 - r) + bv[seg + 1] * std::clamp(r, 0.0, 1.0);
    }
    return u;
}

double superlevel_measure(const GridFunction& u, double lo, double hi, double level) {
    u.check();
    if (!(lo < hi) || lo < u.a - 1e-12 || hi > u.b + 1e-12)
        throw std::domain_error("superlevel_measure: malformed interval");
    const double h = u.h();
    double meas = 0.0;
    for (int i = 0; i < u.n_cells(); ++i) {
        const double cl = std::max(u.node(i), lo), cr = std::min(u.node(i + 1), hi);
        if (cr <= cl) continue;
        // restrict the linear piece to [cl, cr]
        const double t0 = (cl - u.node(i)) / h, t1 = (cr - u.node(i)) / h;
        const double v0 = u.values[i] * (1 - t0) + u.values[i + 1] * t0;
        const double v1 = u.values[i] * (1 - t1) + u.values[i + 1] * t1;
        if (v0 >= level && v1 >= level) {
            meas += cr - cl;
        } else if (v0 > level || v1 > level) {
            const double r = (level - v0) / (v1 - v0); // crossing in (0,1)
            meas += (v0 > level ? r : 1.0 - r) * (cr - cl);
        }
    }
    return meas;
}

bool measure_condition(const GridFunction& u, double lo, double hi, double eta, double theta) {
    if (!(eta > 0.0 && eta < 0.25)) throw std::domain_error("measure_condition: eta out of range");
    if (!(theta > 0.0 && theta < 0.5)) throw std::domain_error("measure_condition: theta out of range");
    const double len = hi - lo;
    if (superlevel_measure(u, lo, hi, 1.0 - eta) < theta * len) return false;
    // lower set via reflection
    GridFunction m = u;
    for (double& v : m.values) v = -v;
    return superlevel_measure(m, lo, hi, 1.0 - eta) >= theta * len;
}

void save_grid_function(const GridFunction& u, const std::string& path) {
    u.check();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "x,u\n";
    for (int i = 0; i <= u.n_cells(); ++i) out << u.node(i) << "," << u.values[i] << "\n";
    nlohmann::json meta{{"a", u.a}, {"b", u.b}, {"N", u.n_cells()}};
    std::ofstream side(path + ".json");
    if (!side) throw std::runtime_error("cannot write " + path + ".json");
    side << meta.dump(2) << "\n";
}

GridFunction load_grid_function(const std::string& path) {
    std::ifstream side(path + ".json");
    if (!side) throw std::runtime_error("cannot open " + path + ".json");
    nlohmann::json meta = nlohmann::json::parse(side);
    GridFunction u;
    u.a = meta.at("a").get<double>();
    u.b = meta.at("b").get<double>();
    const int N = meta.at("N").get<int>();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    u.values.reserve(N + 1);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad row in " + path);
        u.values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (static_cast<int>(u.values.size()) != N + 1)
        throw std::runtime_error("row count mismatch in " + path);
    u.check();
    return u;
}

} // namespace fraclab
