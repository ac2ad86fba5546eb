#ifndef STRGEO_LAMBERT_HPP
#define STRGEO_LAMBERT_HPP

namespace strgeo {

enum class WBranch { principal, lower };

/// Real Lambert W: the inverse of w -> w*e^w.
///
/// principal branch: defined for z >= -1/e, returns w >= -1.
/// lower branch:     defined for -1/e <= z < 0, returns w <= -1.
/// Residual |w e^w - z| <= 1e-12 * max(1, |z|).
/// Throws strgeo::domain_error outside the branch domain.
double lambert_w(WBranch branch, double z);

inline double lambert_w0(double z) { return lambert_w(WBranch::principal, z); }
inline double lambert_wm1(double z) { return lambert_w(WBranch::lower, z); }

} // namespace strgeo

#endif
