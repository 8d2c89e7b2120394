#pragma once
#include <string>
#include <vector>

namespace fraclab {

enum class WellForm { Quartic, UserTable };

// Double-well potential with wells alpha < beta, W(alpha)=W(beta)=0, W>0
// elsewhere.  Quartic is (1-t^2)^2 in the affine variable
// t = (2z-alpha-beta)/(beta-alpha); UserTable is a monotone piecewise-cubic
// interpolant of sampled (z, W) pairs.
class DoubleWell {
public:
    static DoubleWell quartic(double alpha = -1.0, double beta = 1.0);
    // Two-column CSV (z,W) with a one-line header.
    static DoubleWell user_table_from_csv(const std::string& path);
    static DoubleWell user_table(std::vector<double> z, std::vector<double> w);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    WellForm form() const { return form_; }

    double eval(double z) const;   // W(z)
    double deriv(double z) const;  // W'(z)

    // min of W over the eta-shrunk interval between the wells; for the
    // default quartic wells this is (2*eta-eta^2)^2.  Requires 0 < eta < 1/4.
    double c_eta(double eta) const;

private:
    double alpha_ = -1.0, beta_ = 1.0;
    WellForm form_ = WellForm::Quartic;
    // table data (UserTable): nodes, values, pchip derivatives
    std::vector<double> tz_, tw_, td_;
    void build_pchip();
    void validate_table() const;
};

} // namespace fraclab
