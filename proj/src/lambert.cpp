#include "strgeo/lambert.hpp"
#include "strgeo/errors.hpp"

#include <cmath>
#include <limits>

namespace strgeo {

namespace {

constexpr double kInvE = 0.36787944117144232160; // 1/e

// Series about the branch point z = -1/e in p = sqrt(2(e z + 1)).
// W0 uses +p, W-1 uses -p.
double branch_point_series(double p)
{
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

// Halley iteration on f(w) = w e^w - z. The residual target is relative to
// |z|: near z = 0 on the lower branch an absolute target would lose the
// digits of W that downstream r = 1 + W(pq) recoveries need.
double halley(double z, double w)
{
    const double ftol = 1e-15 * std::abs(z);
    for (int i = 0; i < 50; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        if (std::abs(f) <= ftol)
            break;
        const double w1 = w + 1.0;
        double denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
        if (denom == 0.0)
            denom = ew * w1; // plain Newton fallback
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w)))
            break;
    }
    return w;
}

double w_principal(double z)
{
    if (z == 0.0)
        return 0.0;
    double w;
    if (z < -0.25) {
        const double d = 2.0 * (std::exp(1.0) * z + 1.0);
        w = branch_point_series(std::sqrt(d > 0.0 ? d : 0.0));
    } else if (z <= 1.0) {
        w = z; // leading Taylor term
    } else if (z <= 10.0) {
        w = std::log(z);
    } else {
        const double l1 = std::log(z);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1);
    }
    return halley(z, w);
}

double w_lower(double z)
{
    double w;
    if (z < -kInvE + 1e-2) {
        const double d = 2.0 * (std::exp(1.0) * z + 1.0);
        w = branch_point_series(-std::sqrt(d > 0.0 ? d : 0.0));
    } else {
        const double l1 = std::log(-z);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1);
    }
    return halley(z, w);
}

} // namespace

double lambert_w(WBranch branch, double z)
{
    if (!(z >= -kInvE)) {
        // Tolerate rounding just below the branch point.
        if (z > -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
            return -1.0;
        throw domain_error("lambert_w: z < -1/e is outside the real domain");
    }
    if (branch == WBranch::lower && z >= 0.0)
        throw domain_error("lambert_w: lower branch requires z < 0");
    if (std::abs(z + kInvE) <= 4.0 * std::numeric_limits<double>::epsilon() * kInvE)
        return -1.0;
    return branch == WBranch::principal ? w_principal(z) : w_lower(z);
}

} // namespace strgeo
