#include "fraclab/gagliardo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <list>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "fraclab/quadrature.hpp"

namespace fraclab {

namespace {

// (r^{1-2s} - 1)/(1-2s), the stable antiderivative kernel; -> log r at s=1/2.
double pow_kernel(double r, double s) {
    const double p = 1.0 - 2.0 * s;
    const double lr = std::log(r);
    if (std::abs(p) < 1e-9) return lr * (1.0 + 0.5 * p * lr);
    return std::expm1(p * lr) / p;
}

// Moments m_ab = int_0^{h1} int_0^{h2} xi^a zeta^b (g0+xi+zeta)^{-1-2s},
// (a,b) in {00,10,01,20,11,02}; graded composite tensor Gauss toward the
// near corner (breakpoints doubling away from it).
struct Moments {
    double m00, m10, m01, m20, m11, m02;
};

std::vector<double> graded_pieces(double g0, double h) {
    std::vector<double> bps{0.0};
    while (bps.back() < h) {
        double nxt = std::min(h, 2.0 * bps.back() + g0);
        if (nxt <= bps.back()) nxt = h;
        bps.push_back(nxt);
    }
    return bps;
}

Moments kernel_moments(double g0, double h1, double h2, double s) {
    const GaussRule& gr = gauss_rule(12);
    const auto P1 = graded_pieces(g0, h1);
    const auto P2 = graded_pieces(g0, h2);
    Moments m{0, 0, 0, 0, 0, 0};
    for (size_t i = 0; i + 1 < P1.size(); ++i) {
        const double a0 = P1[i], da = P1[i + 1] - P1[i];
        for (size_t j = 0; j + 1 < P2.size(); ++j) {
            const double b0 = P2[j], db = P2[j + 1] - P2[j];
            for (size_t p = 0; p < gr.x.size(); ++p) {
                const double xi = a0 + da * gr.x[p];
                const double wx = da * gr.w[p];
                for (size_t q = 0; q < gr.x.size(); ++q) {
                    const double ze = b0 + db * gr.x[q];
                    const double k = wx * db * gr.w[q] * std::pow(g0 + xi + ze, -1.0 - 2.0 * s);
                    m.m00 += k;
                    m.m10 += xi * k;
                    m.m01 += ze * k;
                    m.m20 += xi * xi * k;
                    m.m11 += xi * ze * k;
                    m.m02 += ze * ze * k;
                }
            }
        }
    }
    return m;
}

// D(rho;A,B) = int_0^1 (A + B*rho*w)^2 (1 + rho*w)^{-1-2s} dw.
// Composite Gauss with geometric refinement toward w=0 when rho is large.
double duffy_integral(double rho, double A, double B, double s, int order) {
    const GaussRule& gr = gauss_rule(std::max(order, 12));
    std::vector<double> bps{0.0};
    if (rho > 2.0) {
        double t = 1.0 / rho;
        while (t < 1.0) {
            bps.push_back(t);
            t *= 2.0;
        }
    }
    bps.push_back(1.0);
    double val = 0.0;
    for (size_t i = 0; i + 1 < bps.size(); ++i) {
        const double d = bps[i + 1] - bps[i];
        for (size_t p = 0; p < gr.x.size(); ++p) {
            const double w = bps[i] + d * gr.x[p];
            const double f = A + B * rho * w;
            val += d * gr.w[p] * f * f * std::pow(1.0 + rho * w, -1.0 - 2.0 * s);
        }
    }
    return val;
}

// Both orderings of one touching segment pair: lengths h1, h2, slopes a, b.
double adjacent_pair(double h1, double h2, double a, double b, double s, int order) {
    const double rho = h2 / h1, rhop = h1 / h2;
    const double r1 = rho * std::pow(h1, 3.0 - 2.0 * s) / (3.0 - 2.0 * s) *
                      duffy_integral(rho, a, b, s, order);
    const double r2 = rhop * std::pow(h2, 3.0 - 2.0 * s) / (3.0 - 2.0 * s) *
                      duffy_integral(rhop, b, a, s, order);
    return 2.0 * (r1 + r2);
}

// Both orderings of one disjoint segment pair.  B = u(right end of seg1) -
// u(left end of seg2); a, b the two slopes; g0 the gap.
double disjoint_pair(const Moments& m, double B, double a, double b) {
    return 2.0 * (B * B * m.m00 - 2.0 * a * B * m.m10 - 2.0 * b * B * m.m01 +
                  a * a * m.m20 + 2.0 * a * b * m.m11 + b * b * m.m02);
}

// Full-square same-segment integral: slope^2 * 2 l^{3-2s}/((2-2s)(3-2s)).
double same_segment(double len, double slope, double s) {
    return slope * slope * 2.0 * std::pow(len, 3.0 - 2.0 * s) /
           ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
}

void check_s(double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("Gagliardo: s must lie in (0,1)");
}

} // namespace

double kernel_mass(Interval I1, Interval I2, double s) {
    check_s(s);
    if (!(I1.lo < I1.hi) || !(I2.lo < I2.hi)) throw std::domain_error("kernel_mass: degenerate interval");
    if (I1.lo > I2.lo) std::swap(I1, I2);
    if (I2.lo < I1.hi - 1e-15 * (I1.hi - I1.lo))
        throw std::domain_error("kernel_mass: intervals overlap");
    const double a = I1.lo, b = I1.hi, c = I2.lo, d = I2.hi;
    if (c - b <= 0.0 && s >= 0.5) return std::numeric_limits<double>::infinity();
    auto g = [s](double r) {
        if (r <= 0.0) return 1.0 / (2.0 * s - 1.0); // lim r->0 of (r^{1-2s}-1)/(1-2s), s<1/2
        return pow_kernel(r, s);
    };
    return (g(d - b) - g(d - a) - g(c - b) + g(c - a)) / (2.0 * s);
}

double SeminormForm::evaluate(const Eigen::VectorXd& v) const {
    return v.dot(Q_ * v);
}

double SeminormForm::evaluate(const std::vector<double>& v) const {
    Eigen::Map<const Eigen::VectorXd> mv(v.data(), v.size());
    return mv.dot(Q_ * mv);
}

void SeminormForm::add_gradient(const Eigen::VectorXd& v, double coeff, Eigen::VectorXd& g) const {
    g.noalias() += (2.0 * coeff) * (Q_ * v);
}

SeminormForm assemble_form(double a, double b, int N, double s, int order) {
    check_s(s);
    if (!(b > a)) throw std::domain_error("assemble_form: requires b > a");
    if (N < 2) throw std::domain_error("assemble_form: requires N >= 2");
    if (N > kMaxFormCells) throw std::domain_error("assemble_form: N exceeds dense cap");
    const double h = (b - a) / N;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N + 1, N + 1);

    // same cell: c * (v_{i+1}-v_i)^2
    const double csame = 2.0 * std::pow(h, 1.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
    for (int i = 0; i < N; ++i) {
        Q(i, i) += csame;
        Q(i + 1, i + 1) += csame;
        Q(i, i + 1) -= csame;
        Q(i + 1, i) -= csame;
    }

    // adjacent cells: 2*fac*((c0+c2)(a^2+b^2) + 4 c1 ab) in the slopes
    if (N >= 2) {
        const double c0 = duffy_integral(1.0, 1.0, 0.0, s, order);
        const double c2 = duffy_integral(1.0, 0.0, 1.0, s, order);
        const double cc = duffy_integral(1.0, 1.0, 1.0, s, order); // c0 + 2c1 + c2
        const double c1 = 0.5 * (cc - c0 - c2);
        const double fac = std::pow(h, 3.0 - 2.0 * s) / (3.0 - 2.0 * s);
        const double ih = 1.0 / h;
        const double A[3] = {-ih, ih, 0.0}, B[3] = {0.0, -ih, ih};
        double blk[3][3];
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                blk[p][q] = 2.0 * fac * ((c0 + c2) * (A[p] * A[q] + B[p] * B[q]) +
                                         2.0 * c1 * (A[p] * B[q] + B[p] * A[q]));
        for (int i = 0; i + 1 < N; ++i)
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) Q(i + p, i + q) += blk[p][q];
    }

    // distant pairs, per-gap cached moments
    for (int d = 2; d < N; ++d) {
        const Moments m = kernel_moments((d - 1) * h, h, h, s);
        // quadratic form on (v_i, v_{i+1}, v_j, v_{j+1}), j = i+d:
        // B = v_{i+1}-v_j, a = (v_{i+1}-v_i)/h, c = (v_{j+1}-v_j)/h
        const double ih = 1.0 / h;
        const double Bv[4] = {0.0, 1.0, -1.0, 0.0};
        const double Av[4] = {-ih, ih, 0.0, 0.0};
        const double Cv[4] = {0.0, 0.0, -ih, ih};
        double blk[4][4];
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
                blk[p][q] = 2.0 * (m.m00 * Bv[p] * Bv[q] -
                                   m.m10 * (Bv[p] * Av[q] + Av[p] * Bv[q]) -
                                   m.m01 * (Bv[p] * Cv[q] + Cv[p] * Bv[q]) +
                                   m.m20 * Av[p] * Av[q] +
                                   m.m11 * (Av[p] * Cv[q] + Cv[p] * Av[q]) +
                                   m.m02 * Cv[p] * Cv[q]);
        const int map_[4] = {0, 1, d, d + 1};
        for (int i = 0; i + d <= N - 1; ++i)
            for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 4; ++q) Q(i + map_[p], i + map_[q]) += blk[p][q];
    }
    return SeminormForm(a, b, N, s, order, std::move(Q));
}

namespace {

struct FormKey {
    double a, b, s;
    int N, order;
    bool operator<(const FormKey& o) const {
        return std::tie(a, b, s, N, order) < std::tie(o.a, o.b, o.s, o.N, o.order);
    }
};

std::map<FormKey, std::shared_ptr<const SeminormForm>> g_form_cache;
std::list<FormKey> g_form_lru;
std::mutex g_form_mtx;

} // namespace

std::shared_ptr<const SeminormForm> cached_form(double a, double b, int N, double s, int order) {
    FormKey key{a, b, s, N, order};
    {
        std::lock_guard<std::mutex> lk(g_form_mtx);
        auto it = g_form_cache.find(key);
        if (it != g_form_cache.end()) return it->second;
    }
    auto form = std::make_shared<const SeminormForm>(assemble_form(a, b, N, s, order));
    std::lock_guard<std::mutex> lk(g_form_mtx);
    // bound the cache: at most 2 large forms, 16 total
    auto is_large = [](const FormKey& k) { return k.N > 1024; };
    int large = is_large(key) ? 1 : 0, total = 1;
    for (auto& k : g_form_lru) {
        large += is_large(k) ? 1 : 0;
        ++total;
    }
    while (!g_form_lru.empty() && (total > 16 || large > 2)) {
        // evict oldest (prefer oldest large when over the large budget)
        auto victim = g_form_lru.begin();
        if (large > 2)
            victim = std::find_if(g_form_lru.begin(), g_form_lru.end(), is_large);
        large -= is_large(*victim) ? 1 : 0;
        --total;
        g_form_cache.erase(*victim);
        g_form_lru.erase(victim);
    }
    g_form_cache[key] = form;
    g_form_lru.push_back(key);
    return form;
}

void clear_form_cache() {
    std::lock_guard<std::mutex> lk(g_form_mtx);
    g_form_cache.clear();
    g_form_lru.clear();
}

double seminorm_sq(const GridFunction& u, double s, int order) {
    u.check();
    auto form = cached_form(u.a, u.b, u.n_cells(), s, order);
    return form->evaluate(u.values);
}

double seminorm_sq_local(const GridFunction& u, const std::vector<Interval>& E, double s,
                         int order) {
    u.check();
    check_s(s);
    const double h = u.h();
    const int N = u.n_cells();
    std::vector<char> in(N, 0);
    for (const auto& I : E) {
        if (!(I.lo < I.hi)) throw std::domain_error("seminorm_sq_local: degenerate interval");
        const double flo = (I.lo - u.a) / h, fhi = (I.hi - u.a) / h;
        const long ilo = std::lround(flo), ihi = std::lround(fhi);
        if (std::abs(flo - ilo) > 1e-9 || std::abs(fhi - ihi) > 1e-9 || ilo < 0 || ihi > N)
            throw std::domain_error("seminorm_sq_local: interval not cell-aligned");
        for (long c = ilo; c < ihi; ++c) in[c] = 1;
    }
    std::vector<int> cells;
    for (int c = 0; c < N; ++c)
        if (in[c]) cells.push_back(c);

    std::map<int, Moments> mom;
    auto mom_for_gap = [&](int d) -> const Moments& {
        auto it = mom.find(d);
        if (it == mom.end()) it = mom.emplace(d, kernel_moments((d - 1) * h, h, h, s)).first;
        return it->second;
    };

    double total = 0.0;
    const auto& v = u.values;
    for (size_t p = 0; p < cells.size(); ++p) {
        const int i = cells[p];
        const double ai = (v[i + 1] - v[i]) / h;
        total += same_segment(h, ai, s);
        for (size_t q = p + 1; q < cells.size(); ++q) {
            const int j = cells[q];
            const double bj = (v[j + 1] - v[j]) / h;
            if (j == i + 1) {
                total += adjacent_pair(h, h, ai, bj, s, order);
            } else {
                const Moments& m = mom_for_gap(j - i);
                total += disjoint_pair(m, v[i + 1] - v[j], ai, bj);
            }
        }
    }
    return total;
}

double seminorm_sq_breakpoints(const std::vector<double>& x, const std::vector<double>& v,
                               double s) {
    check_s(s);
    if (x.size() != v.size() || x.size() < 2)
        throw std::domain_error("seminorm_sq_breakpoints: need matching breakpoint arrays");
    for (size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw std::domain_error("seminorm_sq_breakpoints: x must increase");
    const size_t K = x.size() - 1;
    std::vector<double> len(K), slope(K);
    for (size_t k = 0; k < K; ++k) {
        len[k] = x[k + 1] - x[k];
        slope[k] = (v[k + 1] - v[k]) / len[k];
    }
    double total = 0.0;
    for (size_t i = 0; i < K; ++i) {
        total += same_segment(len[i], slope[i], s);
        for (size_t j = i + 1; j < K; ++j) {
            if (j == i + 1) {
                total += adjacent_pair(len[i], len[j], slope[i], slope[j], s,
                                       kDefaultNearDiagonalOrder);
            } else {
                const double g0 = x[j] - x[i + 1];
                const Moments m = kernel_moments(g0, len[i], len[j], s);
                total += disjoint_pair(m, v[i + 1] - v[j], slope[i], slope[j]);
            }
        }
    }
    return total;
}

void SeminormForm::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const char magic[8] = {'F', 'L', 'S', 'F', '0', '0', '0', '1'};
    out.write(magic, 8);
    const double head[3] = {a_, b_, s_};
    out.write(reinterpret_cast<const char*>(head), sizeof(head));
    const std::int32_t dims[2] = {N_, order_};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(Q_.data()),
              static_cast<std::streamsize>(sizeof(double)) * Q_.size());
    if (!out) throw std::runtime_error("short write to " + path);
}

SeminormForm SeminormForm::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "FLSF0001", 8) != 0)
        throw std::runtime_error("bad form cache header in " + path);
    double head[3];
    in.read(reinterpret_cast<char*>(head), sizeof(head));
    std::int32_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || dims[0] < 2) throw std::runtime_error("bad form cache body in " + path);
    Eigen::MatrixXd Q(dims[0] + 1, dims[0] + 1);
    in.read(reinterpret_cast<char*>(Q.data()),
            static_cast<std::streamsize>(sizeof(double)) * Q.size());
    if (!in) throw std::runtime_error("truncated form cache " + path);
    return SeminormForm(head[0], head[1], dims[0], head[2], dims[1], std::move(Q));
}

} // namespace fraclab
