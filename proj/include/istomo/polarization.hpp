/**
 * Elasticity polarization matrix of a small spherical inhomogeneity,
 * including the cavity and rigid-sphere limits.
 *
 * For a sphere the 6x6 matrix has an isotropic 3x3 normal block plus a
 * diagonal shear block, fully determined by two dimensionless
 * coefficients (k_s, g_s) and the physical scale E * V_eps [N m].  The
 * matrix is positive definite for inclusions stiffer than the matrix and
 * negative definite for softer ones.
 */

#ifndef ISTOMO_POLARIZATION_HPP
#define ISTOMO_POLARIZATION_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "istomo/elastic.hpp"

namespace istomo {

struct KsGs {
    double k_s;  // bulk-type coefficient, dimensionless
    double g_s;  // shear-type coefficient, dimensionless
};

/**
 * Symmetric 6x6 polarization matrix [N m] acting on strain 6-vectors in
 * the (11, 22, 33, sqrt2*12, sqrt2*23, sqrt2*13) ordering.  The scale
 * factors it was built with are retained.
 */
struct PolarizationMatrix {
    Eigen::Matrix<double, 6, 6> entries;
    double E;      // matrix Young modulus [Pa]
    double v_eps;  // inclusion volume [m^3]
};

namespace detail {

inline void check_pole(double num, double den, const char* what) {
    if (std::abs(den) < 1e-12 * std::max(std::abs(num), 1.0))
        throw std::domain_error(std::string("spherical_ks_gs: ") + what +
                                " denominator vanishes for these (alpha, nu, nu0)");
}

}  // namespace detail

/**
 * Dimensionless spherical-inhomogeneity coefficients
 *   k_s = (1-nu)(alpha(1-2nu) + 2nu0 - 1)
 *         / ((1-2nu)^2 (alpha(1+nu) + 2(1-2nu0))),
 *   g_s = 15(1-nu)(1 + nu0 - alpha(1+nu))
 *         / (2(1+nu)(2alpha(1+nu)(5nu-4) + (1+nu0)(5nu-7))),
 * with alpha = E0/E.  Both vanish for a matched inclusion (alpha = 1,
 * nu0 = nu).  Requires nu < 0.5 (k_s has a pole there); alpha = 0 with
 * nu0 = 0.5 is a genuine 0/0 and is rejected.
 */
inline KsGs spherical_ks_gs(double alpha, double nu, double nu0) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("spherical_ks_gs: alpha must be >= 0");
    if (!(nu > -1.0) || !(nu < 0.5))
        throw std::invalid_argument("spherical_ks_gs: nu must lie in (-1, 0.5)");
    if (!(nu0 > -1.0) || !(nu0 <= 0.5))
        throw std::invalid_argument("spherical_ks_gs: nu0 must lie in (-1, 0.5]");

    // alpha(1-2nu) + 2nu0 - 1, grouped so the matched case cancels exactly
    const double kn = (1.0 - nu) * (alpha * (1.0 - 2.0 * nu) - (1.0 - 2.0 * nu0));
    const double kd = (1.0 - 2.0 * nu) * (1.0 - 2.0 * nu) * (alpha * (1.0 + nu) + 2.0 * (1.0 - 2.0 * nu0));
    detail::check_pole(kn, kd, "k_s");

    const double gn = 15.0 * (1.0 - nu) * (1.0 + nu0 - alpha * (1.0 + nu));
    const double gd = 2.0 * (1.0 + nu) *
                      (2.0 * alpha * (1.0 + nu) * (5.0 * nu - 4.0) + (1.0 + nu0) * (5.0 * nu - 7.0));
    detail::check_pole(gn, gd, "g_s");

    return {kn / kd, gn / gd};
}

/// Spherical cavity limit (alpha -> 0).
inline KsGs cavity_ks_gs(double nu) {
    if (!(nu > -1.0) || !(nu < 0.5))
        throw std::invalid_argument("cavity_ks_gs: nu must lie in (-1, 0.5)");
    const double k = -(1.0 - nu) / (2.0 * (1.0 - 2.0 * nu) * (1.0 - 2.0 * nu));
    const double g = -15.0 * (1.0 - nu) / (2.0 * (1.0 + nu) * (7.0 - 5.0 * nu));
    return {k, g};
}

/// Rigid sphere limit (alpha -> infinity).
inline KsGs rigid_ks_gs(double nu) {
    if (!(nu > -1.0) || !(nu < 0.5))
        throw std::invalid_argument("rigid_ks_gs: nu must lie in (-1, 0.5)");
    const double k = (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double g = 15.0 * (1.0 - nu) / (4.0 * (1.0 + nu) * (4.0 - 5.0 * nu));
    return {k, g};
}

/**
 * Assemble the 6x6 polarization matrix E * V_eps * p with
 *   p_ii = k_s + (2/3) g_s        (i = 1..3),
 *   p_ij = k_s - g_s/3            (i != j, i,j = 1..3),
 *   p_ii = g_s                    (i = 4..6),
 * and zero elsewhere.  Eigenvalues are {3 k_s, g_s (x5)} times E V_eps.
 */
inline PolarizationMatrix polarization_from_ksgs(const KsGs& c, double E, double v_eps) {
    const double scale = E * v_eps;
    const double diag = c.k_s + (2.0 / 3.0) * c.g_s;
    const double off = c.k_s - c.g_s / 3.0;
    Eigen::Matrix<double, 6, 6> p = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p(i, j) = scale * (i == j ? diag : off);
    for (int i = 3; i < 6; ++i) p(i, i) = scale * c.g_s;
    return {p, E, v_eps};
}

/// Spherical-inclusion polarization matrix in physical units.
inline PolarizationMatrix polarization_matrix_spherical(const MaterialParams& m,
                                                        const InclusionParams& incl) {
    return polarization_from_ksgs(spherical_ks_gs(incl.alpha, m.nu, incl.nu0), m.E,
                                  incl.volume());
}

}  // namespace istomo

#endif  // ISTOMO_POLARIZATION_HPP
