/**
 * Boussinesq point-load displacement field on an elastic half-space and
 * the strain 6-vector it induces at a buried inclusion site, with an
 * independent finite-difference strain oracle.
 *
 * Strain 6-vectors are ordered (e11, e22, e33, sqrt2*e12, sqrt2*e23,
 * sqrt2*e13); the sqrt(2) weights make the quadratic form against the
 * 6x6 polarization matrix equal the tensor double contraction.
 */

#ifndef ISTOMO_BOUSSINESQ_HPP
#define ISTOMO_BOUSSINESQ_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "istomo/elastic.hpp"

namespace istomo {

using Strain6 = Eigen::Matrix<double, 6, 1>;
using Vec3 = Eigen::Vector3d;

/**
 * Indentation point at dimensionless lateral offset xi = (x1 - x1^0)/d
 * from the epicenter of an inclusion buried at depth d.
 */
struct FieldPoint {
    double xi;
    double d;

    FieldPoint(double xi_, double d_) : xi(xi_), d(d_) {
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("FieldPoint: d must be positive and finite");
        if (!std::isfinite(xi)) throw std::invalid_argument("FieldPoint: xi must be finite");
    }
};

/**
 * Displacement T(x) [m/N] of the half-space x3 >= 0 under a unit point
 * force along +x3 at the origin:
 *   T_i = (1/(4 pi mu)) ( x_i x3 / |x|^3 - (1-2nu) x_i / (|x| (|x| + x3)) ),
 *   T_3 = (1/(4 pi mu)) ( x3^2 / |x|^3 + 2(1-nu) / |x| ),
 * where 1-2nu = mu/(lambda+mu) and 2(1-nu) = (lambda+2mu)/(lambda+mu).
 * The ratio form stays regular in the incompressible limit.
 */
inline Vec3 boussinesq_displacement(const Vec3& x, const MaterialParams& m) {
    if (x[2] < 0.0)
        throw std::invalid_argument("boussinesq_displacement: x3 must be nonnegative");
    const double rho = x.norm();
    if (!(rho > 0.0))
        throw std::invalid_argument("boussinesq_displacement: field is singular at the origin");
    const double mu = shear_modulus(m);
    const double c1 = 1.0 - 2.0 * m.nu;
    const double c2 = 2.0 * (1.0 - m.nu);
    const double pref = 1.0 / (4.0 * M_PI * mu);
    const double rho3 = rho * rho * rho;
    const double surf = 1.0 / (rho * (rho + x[2]));
    Vec3 t;
    t[0] = pref * (x[0] * x[2] / rho3 - c1 * x[0] * surf);
    t[1] = pref * (x[1] * x[2] / rho3 - c1 * x[1] * surf);
    t[2] = pref * (x[2] * x[2] / rho3 + c2 / rho);
    return t;
}

/**
 * Dimensionless strain 6-vector eps_bar(xi, nu) of the Boussinesq field
 * at the inclusion site, with r = sqrt(xi^2 + 1):
 *   eps1 = 1/r^3 - 3 xi^2/r^5
 *          + (1-2nu)( xi^2/(r^2 (r+1)^2) - 1/(r (r+1)) + xi^2/(r^3 (r+1)) ),
 *   eps2 = 1/r^3 - (1-2nu)/(r (r+1)),
 *   eps3 = 2nu/r^3 - 3/r^5,
 *   eps4 = eps5 = 0,   eps6 = 3 sqrt2 xi / r^5.
 * At nu = 0.5 the (1-2nu) terms drop and the trace vanishes identically.
 */
inline Strain6 scaled_strain_vector(double xi, double nu) {
    if (!(nu > -1.0) || !(nu <= 0.5))
        throw std::invalid_argument("scaled_strain_vector: nu must lie in (-1, 0.5]");
    const double r2 = xi * xi + 1.0;
    const double r = std::sqrt(r2);
    const double r3 = r2 * r;
    const double r5 = r2 * r3;
    const double c1 = 1.0 - 2.0 * nu;
    Strain6 e = Strain6::Zero();
    e[0] = 1.0 / r3 - 3.0 * xi * xi / r5 +
           c1 * (xi * xi / (r2 * (r + 1.0) * (r + 1.0)) - 1.0 / (r * (r + 1.0)) +
                 xi * xi / (r3 * (r + 1.0)));
    e[1] = 1.0 / r3 - c1 / (r * (r + 1.0));
    e[2] = 2.0 * nu / r3 - 3.0 / r5;
    e[5] = 3.0 * std::sqrt(2.0) * xi / r5;
    return e;
}

/**
 * Strain 6-vector [1/N] of the unit-force Boussinesq field at the
 * inclusion center, eps^0 = eps_bar(xi, nu) / (4 pi mu d^2).
 *
 * The indentation point sits at lateral offset +xi*d from the epicenter,
 * so the field is evaluated at x = (-xi d, 0, d) relative to the load;
 * strain_fd_oracle at that point reproduces this vector.
 */
inline Strain6 strain_at_inclusion(const FieldPoint& p, const MaterialParams& m) {
    const double mu = shear_modulus(m);
    return scaled_strain_vector(p.xi, m.nu) / (4.0 * M_PI * mu * p.d * p.d);
}

namespace detail {

// 6th-order central first-derivative of T along axis j, step h.
inline Vec3 displacement_derivative(const Vec3& x, const MaterialParams& m, int j, double h) {
    Vec3 e = Vec3::Zero();
    e[j] = h;
    const Vec3 d1 = boussinesq_displacement(x + e, m) - boussinesq_displacement(x - e, m);
    const Vec3 d2 = boussinesq_displacement(x + 2 * e, m) - boussinesq_displacement(x - 2 * e, m);
    const Vec3 d3 = boussinesq_displacement(x + 3 * e, m) - boussinesq_displacement(x - 3 * e, m);
    return (45.0 * d1 - 9.0 * d2 + d3) / (60.0 * h);
}

inline Strain6 pack_strain(const Eigen::Matrix3d& grad) {
    const double s2 = std::sqrt(2.0);
    Strain6 e;
    e[0] = grad(0, 0);
    e[1] = grad(1, 1);
    e[2] = grad(2, 2);
    e[3] = s2 * 0.5 * (grad(0, 1) + grad(1, 0));
    e[4] = s2 * 0.5 * (grad(1, 2) + grad(2, 1));
    e[5] = s2 * 0.5 * (grad(0, 2) + grad(2, 0));
    return e;
}

}  // namespace detail

/// One finite-difference pass (6th-order stencils, no extrapolation).
inline Strain6 strain_fd_single(const Vec3& x, const MaterialParams& m, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("strain_fd_single: h must be positive");
    Eigen::Matrix3d grad;  // grad(i, j) = dT_i/dx_j
    for (int j = 0; j < 3; ++j) grad.col(j) = detail::displacement_derivative(x, m, j, h);
    return detail::pack_strain(grad);
}

/**
 * Finite-difference strain oracle: central differences of
 * boussinesq_displacement assembled into the weighted 6-vector, with one
 * Richardson level over steps h and h/2.  Default step 1e-6 * |x|.
 *
 * Throws when the Richardson consistency check between the two passes
 * disagrees by more than 1e-4 relative (step-size degeneracy: h too
 * large for the local field curvature, or cancellation-dominated).
 */
inline Strain6 strain_fd_oracle(const Vec3& x, const MaterialParams& m, double h = 0.0) {
    const double rho = x.norm();
    if (!(rho > 0.0) || x[2] <= 0.0)
        throw std::invalid_argument("strain_fd_oracle: point must be off the surface singularity");
    if (h <= 0.0) h = 1e-6 * rho;
    const Strain6 coarse = strain_fd_single(x, m, h);
    const Strain6 fine = strain_fd_single(x, m, 0.5 * h);
    // 6th-order stencil: one Richardson level cancels the h^6 term.
    const Strain6 extrap = (64.0 * fine - coarse) / 63.0;
    const double scale = extrap.cwiseAbs().maxCoeff();
    if (scale > 0.0 && (extrap - fine).cwiseAbs().maxCoeff() > 1e-4 * scale)
        throw std::runtime_error("strain_fd_oracle: step-size degeneracy (Richardson check failed)");
    return extrap;
}

}  // namespace istomo

#endif  // ISTOMO_BOUSSINESQ_HPP
