/**
 * Isotropic elastic constants, blunt-indenter parameterization, and the
 * analytic contact constants shared by the forward and inverse models.
 */

#ifndef ISTOMO_ELASTIC_HPP
#define ISTOMO_ELASTIC_HPP

#include <cmath>
#include <array>
#include <stdexcept>
#include <string>

namespace istomo {

/**
 * Isotropic bulk material, Young modulus E [Pa] and Poisson ratio nu.
 * nu = 0.5 is admitted; routines that cannot handle the incompressible
 * limit (lame_constants) reject it themselves.
 */
struct MaterialParams {
    double E;
    double nu;

    MaterialParams(double E_, double nu_) : E(E_), nu(nu_) { validate(); }

    void validate() const {
        if (!(E > 0.0) || !std::isfinite(E))
            throw std::invalid_argument("MaterialParams: E must be positive and finite");
        if (!(nu > -1.0) || !(nu <= 0.5))
            throw std::invalid_argument("MaterialParams: nu must lie in (-1, 0.5]");
    }

    bool incompressible() const { return nu == 0.5; }
};

/**
 * Power-law (blunt) indenter profile phi(r) = A * r^lambda_exp.
 * lambda_exp = 1 is a cone, lambda_exp = 2 a paraboloid with A = 1/(2R).
 * A carries units m^(1 - lambda_exp).
 *
 * The flat punch (lambda -> infinity) degenerates the power-law contact
 * relations and is not representable; the usable range is capped at 50,
 * where the gamma-function ratios are still exactly evaluable in double.
 */
struct IndenterShape {
    double lambda_exp;
    double A;

    IndenterShape(double lambda_, double A_) : lambda_exp(lambda_), A(A_) { validate(); }

    void validate() const {
        if (!(lambda_exp > 0.0) || !(lambda_exp <= 50.0))
            throw std::invalid_argument("IndenterShape: lambda_exp must lie in (0, 50]");
        if (!(A > 0.0) || !std::isfinite(A))
            throw std::invalid_argument("IndenterShape: A must be positive and finite");
    }
};

/**
 * Small spherical inhomogeneity: center depth d below the surface,
 * epicenter (x10, x20), radius r_eps, moduli ratio alpha = E0/E and
 * Poisson ratio nu0.  alpha = 0 is a cavity, alpha -> infinity a rigid
 * sphere.
 */
struct InclusionParams {
    double d;
    std::array<double, 2> x0;
    double r_eps;
    double alpha;
    double nu0;

    InclusionParams(double d_, std::array<double, 2> x0_, double r_eps_, double alpha_,
                    double nu0_)
        : d(d_), x0(x0_), r_eps(r_eps_), alpha(alpha_), nu0(nu0_) {
        validate();
    }

    void validate() const {
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("InclusionParams: d must be positive and finite");
        if (!(r_eps > 0.0) || !std::isfinite(r_eps))
            throw std::invalid_argument("InclusionParams: r_eps must be positive and finite");
        if (!(alpha >= 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("InclusionParams: alpha must be nonnegative and finite");
        if (!(nu0 > -1.0) || !(nu0 <= 0.5))
            throw std::invalid_argument("InclusionParams: nu0 must lie in (-1, 0.5]");
        if (!std::isfinite(x0[0]) || !std::isfinite(x0[1]))
            throw std::invalid_argument("InclusionParams: epicenter must be finite");
    }

    /// Sphere volume V_eps = (4 pi / 3) r_eps^3 [m^3].
    double volume() const { return (4.0 * M_PI / 3.0) * r_eps * r_eps * r_eps; }

    /// Smallness ratio r_eps/d; the asymptotic model assumes this is small.
    double smallness() const { return r_eps / d; }

    /// True when r_eps/d exceeds the usual validity guideline.
    bool smallness_warning() const { return smallness() > 0.3; }
};

/// Contact modulus theta1 = 2E/(1 - nu^2) [Pa].
inline double contact_modulus(const MaterialParams& m) {
    return 2.0 * m.E / (1.0 - m.nu * m.nu);
}

struct LameConstants {
    double lambda;  // first Lame parameter [Pa]
    double mu;      // shear modulus [Pa]
};

/// Shear modulus mu = E/(2(1+nu)) [Pa]; finite for all admissible nu.
inline double shear_modulus(const MaterialParams& m) { return m.E / (2.0 * (1.0 + m.nu)); }

/**
 * Lame constants (lambda, mu) from (E, nu).  The first parameter is
 * singular at nu = 0.5; callers on the incompressible path must use the
 * closed forms written in terms of mu alone.
 */
inline LameConstants lame_constants(const MaterialParams& m) {
    if (m.nu >= 0.5)
        throw std::invalid_argument(
            "lame_constants: lambda is singular at nu = 0.5; use the incompressible path");
    const double mu = shear_modulus(m);
    const double lambda = m.E * m.nu / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
    return {lambda, mu};
}

struct ShapeConstants {
    double n1;  // N1(lambda), dimensionless
    double n2;  // N2(lambda), dimensionless
};

/**
 * Indenter shape constants
 *   N1 = 2^(lambda-2) lambda Gamma(lambda/2)^2 / Gamma(lambda),
 *   N2 = 2^(lambda-1) lambda^2 Gamma(lambda/2)^2 / (pi (lambda+1) Gamma(lambda)).
 * N1(2) = 2, N2(2) = 8/(3 pi) recover the Hertz relations; N1(1) = pi/2,
 * N2(1) = 1/2 the conical ones.
 */
inline ShapeConstants shape_constants(double lambda_exp) {
    if (!(lambda_exp > 0.0) || !(lambda_exp <= 50.0))
        throw std::invalid_argument("shape_constants: lambda_exp must lie in (0, 50]");
    const double gh = std::tgamma(0.5 * lambda_exp);
    const double g = std::tgamma(lambda_exp);
    const double ratio = gh * gh / g;
    const double n1 = std::exp2(lambda_exp - 2.0) * lambda_exp * ratio;
    const double n2 =
        std::exp2(lambda_exp - 1.0) * lambda_exp * lambda_exp / (M_PI * (lambda_exp + 1.0)) * ratio;
    return {n1, n2};
}

}  // namespace istomo

#endif  // ISTOMO_ELASTIC_HPP
