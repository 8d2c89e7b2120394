#include "fraclab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fraclab {

DoubleWell DoubleWell::quartic(double alpha, double beta) {
    if (!(alpha < beta)) throw std::domain_error("DoubleWell: wells must satisfy alpha < beta");
    DoubleWell w;
    w.alpha_ = alpha;
    w.beta_ = beta;
    w.form_ = WellForm::Quartic;
    return w;
}

DoubleWell DoubleWell::user_table(std::vector<double> z, std::vector<double> wv) {
    if (z.size() != wv.size() || z.size() < 4)
        throw std::domain_error("DoubleWell: table needs >= 4 matching samples");
    for (size_t i = 1; i < z.size(); ++i)
        if (!(z[i] > z[i - 1])) throw std::domain_error("DoubleWell: table abscissae must increase");
    DoubleWell w;
    w.form_ = WellForm::UserTable;
    w.tz_ = std::move(z);
    w.tw_ = std::move(wv);
    // wells = zeros of the table (exact zero samples)
    std::vector<double> zeros;
    for (size_t i = 0; i < w.tz_.size(); ++i)
        if (w.tw_[i] == 0.0) zeros.push_back(w.tz_[i]);
    if (zeros.size() != 2) throw std::domain_error("DoubleWell: table must vanish at exactly two wells");
    w.alpha_ = zeros[0];
    w.beta_ = zeros[1];
    w.validate_table();
    w.build_pchip();
    return w;
}

DoubleWell DoubleWell::user_table_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("DoubleWell: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("DoubleWell: empty table " + path);
    std::vector<double> z, w;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b;
        if (!(ss >> a >> b)) throw std::runtime_error("DoubleWell: bad row in " + path + ": " + line);
        z.push_back(a);
        w.push_back(b);
    }
    return user_table(std::move(z), std::move(w));
}

void DoubleWell::validate_table() const {
    for (size_t i = 0; i < tz_.size(); ++i) {
        if (tw_[i] < 0.0) throw std::domain_error("DoubleWell: table values must be nonnegative");
        if (tw_[i] == 0.0 && tz_[i] != alpha_ && tz_[i] != beta_)
            throw std::domain_error("DoubleWell: table vanishes away from the wells");
    }
    // coercivity spot-check on the extreme samples
    if (!(tw_.front() > 0.0 && tw_.back() > 0.0))
        throw std::domain_error("DoubleWell: table must be positive at its extremes");
}

void DoubleWell::build_pchip() {
    // Fritsch-Carlson monotone cubic slopes
    const size_t n = tz_.size();
    std::vector<double> h(n - 1), del(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = tz_[i + 1] - tz_[i];
        del[i] = (tw_[i + 1] - tw_[i]) / h[i];
    }
    td_.assign(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) {
            td_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            td_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    // one-sided ends with monotonicity limiting
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) d = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
        return d;
    };
    td_[0] = end_slope(h[0], h[1], del[0], del[1]);
    td_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

double DoubleWell::eval(double z) const {
    if (form_ == WellForm::Quartic) {
        const double t = (2.0 * z - alpha_ - beta_) / (beta_ - alpha_);
        const double q = 1.0 - t * t;
        return q * q;
    }
    if (z < tz_.front() || z > tz_.back())
        throw std::out_of_range("DoubleWell: evaluation outside sampled range");
    auto it = std::upper_bound(tz_.begin(), tz_.end(), z);
    size_t i = (it == tz_.begin()) ? 0 : (it - tz_.begin() - 1);
    if (i + 1 >= tz_.size()) i = tz_.size() - 2;
    const double h = tz_[i + 1] - tz_[i];
    const double t = (z - tz_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * tw_[i] + h * h10 * td_[i] + h01 * tw_[i + 1] + h * h11 * td_[i + 1];
}

double DoubleWell::deriv(double z) const {
    if (form_ == WellForm::Quartic) {
        const double c = 2.0 / (beta_ - alpha_);
        const double t = (2.0 * z - alpha_ - beta_) / (beta_ - alpha_);
        return -4.0 * t * (1.0 - t * t) * c;
    }
    if (z < tz_.front() || z > tz_.back())
        throw std::out_of_range("DoubleWell: evaluation outside sampled range");
    auto it = std::upper_bound(tz_.begin(), tz_.end(), z);
    size_t i = (it == tz_.begin()) ? 0 : (it - tz_.begin() - 1);
    if (i + 1 >= tz_.size()) i = tz_.size() - 2;
    const double h = tz_[i + 1] - tz_[i];
    const double t = (z - tz_[i]) / h;
    const double t2 = t * t;
    const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
    return d00 * tw_[i] + d10 * td_[i] + d01 * tw_[i + 1] + d11 * td_[i + 1];
}

double DoubleWell::c_eta(double eta) const {
    if (!(eta > 0.0 && eta < 0.25)) throw std::domain_error("c_eta: eta must lie in (0, 1/4)");
    if (form_ == WellForm::Quartic) {
        const double q = 2.0 * eta - eta * eta; // 1-(1-eta)^2
        return q * q;
    }
    // grid search over the eta-shrunk band between the wells
    const double half = 0.5 * eta * (beta_ - alpha_);
    const double lo = alpha_ + half, hi = beta_ - half;
    const int n = 200000;
    double best = eval(lo);
    for (int i = 1; i <= n; ++i) best = std::min(best, eval(lo + (hi - lo) * i / n));
    return best;
}

} // namespace fraclab
