/**
 * Forward indentation model: the compliance perturbation m3^0 of a buried
 * spherical inhomogeneity, the exact and first-order force-indentation
 * relations of a power-law indenter, and synthetic grid-indentation
 * stiffness maps with reproducible multiplicative noise.
 *
 * Conventions.  m3^0 is a compliance [m/N]:
 *   m3^0 = g3 - eps0^T P^eps eps0,
 * with eps0 the per-unit-force strain 6-vector at the inclusion center
 * (eps_bar/(4 pi mu d^2)) and g3 the regular Green-function offset
 * (0 for the half-space).  For an incompressible bulk this closes to
 *   -m3^0 = E V_eps / (16 pi^2 mu^2 d^4)
 *           * (15 alpha - 10(1+nu0)) / (3(alpha+1+nu0)) * (xi^2+1)^-3.
 */

#ifndef ISTOMO_FORWARD_HPP
#define ISTOMO_FORWARD_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "istomo/boussinesq.hpp"
#include "istomo/elastic.hpp"
#include "istomo/polarization.hpp"

namespace istomo {

/// State of one quasi-static indentation: depth, contact radius, force,
/// incremental stiffness dP/dw.
struct ContactState {
    double w;  // [m]
    double a;  // [m]
    double P;  // [N]
    double S;  // [N/m]
};

struct MapPoint {
    double x1;  // [m]
    double x2;  // [m]
    double s;   // [N/m]
};

struct NoiseSpec {
    double sigma = 0.0;       // relative noise amplitude
    std::uint64_t seed = 0;   // stream seed
};

struct MapMetadata {
    bool present = true;  // false when a map was loaded without its sidecar
    std::optional<double> w;
    NoiseSpec noise;
    std::string units = "SI";
    std::string generator_version;
    std::vector<std::string> warnings;
    std::optional<MaterialParams> material;
    std::optional<IndenterShape> indenter;
    std::optional<InclusionParams> inclusion;
};

/// Grid of stiffness samples S(x1, x2) plus the protocol that produced it.
struct StiffnessMap {
    std::vector<MapPoint> points;
    MapMetadata meta;
};

/// Uniform rectangular sampling grid, nx x ny over extent1 x extent2,
/// centered at (center1, center2).
struct GridSpec {
    int nx = 21;
    int ny = 21;
    double extent1;
    double extent2;
    double center1 = 0.0;
    double center2 = 0.0;

    void validate() const {
        if (nx < 1 || ny < 1) throw std::invalid_argument("GridSpec: nx, ny must be >= 1");
        if (!(extent1 > 0.0) || !(extent2 > 0.0))
            throw std::invalid_argument("GridSpec: extents must be positive");
    }
};

/// m3^0 = g3 - eps0^T P eps0  [m/N].
inline double m3_quadratic_form(const Strain6& eps0, const PolarizationMatrix& P, double g3) {
    return g3 - eps0.dot(P.entries * eps0);
}

/**
 * Compliance perturbation of a spherical inhomogeneity for a compressible
 * bulk (nu < 0.5), assembled from the Boussinesq strain vector and the
 * spherical polarization matrix.  Identical to m3_quadratic_form with the
 * corresponding arguments; this is merely the convenient entry point.
 */
inline double m3_spherical_general(const MaterialParams& m, const InclusionParams& incl,
                                   double xi, double g3 = 0.0) {
    if (!(m.nu < 0.5))
        throw std::invalid_argument(
            "m3_spherical_general: nu must be < 0.5; use m3_spherical_incompressible");
    const Strain6 eps0 = strain_at_inclusion(FieldPoint(xi, incl.d), m);
    const PolarizationMatrix P = polarization_matrix_spherical(m, incl);
    return m3_quadratic_form(eps0, P, g3);
}

/**
 * Closed-form compliance perturbation for an incompressible bulk
 * (nu = 0.5, mu = E/3).  Stiffening (-m3^0 > 0) iff 15 alpha > 10(1+nu0).
 */
inline double m3_spherical_incompressible(const MaterialParams& m, const InclusionParams& incl,
                                          double xi, double g3 = 0.0) {
    if (m.nu != 0.5)
        throw std::invalid_argument("m3_spherical_incompressible: requires nu = 0.5 exactly");
    const double mu = shear_modulus(m);  // E/3
    const double r2 = xi * xi + 1.0;
    const double q = (15.0 * incl.alpha - 10.0 * (1.0 + incl.nu0)) /
                     (3.0 * (incl.alpha + 1.0 + incl.nu0));
    const double pref = m.E * incl.volume() /
                        (16.0 * M_PI * M_PI * mu * mu * incl.d * incl.d * incl.d * incl.d);
    return g3 - pref * q / (r2 * r2 * r2);
}

namespace detail {

// Left-hand side of the contact equation, g(a) = A N1 a^lam
// + m3 theta1 A (pi/2) N2 a^(lam+1) - w.  Monotone increasing up to
// a_crit = lam N1 / ((lam+1)(pi/2) N2 theta1 |m3|) when m3 < 0.
struct ContactEquation {
    double A, lam, n1, n2, theta1, m3, w;

    double operator()(double a) const {
        const double al = std::pow(a, lam);
        return A * n1 * al + m3 * theta1 * A * (M_PI / 2.0) * n2 * al * a - w;
    }
};

// Bracketed bisection/secant hybrid; [lo, hi] must straddle the root.
// Relative tolerance is on the contact radius.
inline double solve_bracketed(const ContactEquation& g, double lo, double hi, double rel_tol) {
    double flo = g(lo);
    double fhi = g(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw std::logic_error("solve_bracketed: endpoints do not straddle the root");
    const double tol_scale = std::max(std::abs(hi), std::abs(lo));
    double a = lo, fa = flo, b = hi, fb = fhi;
    for (int it = 0; it < 200 && (b - a) > rel_tol * tol_scale; ++it) {
        // secant proposal, clipped away from the bracket edges
        double mid = 0.5 * (a + b);
        double cand = mid;
        if (fb != fa) {
            const double sec = b - fb * (b - a) / (fb - fa);
            if (sec > a + 0.01 * (b - a) && sec < b - 0.01 * (b - a)) cand = sec;
        }
        const double fc = g(cand);
        if (fc == 0.0) return cand;
        if (fa * fc < 0.0) {
            b = cand;
            fb = fc;
        } else {
            a = cand;
            fa = fc;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/**
 * Solve the exact contact relations
 *   w - m3^0 P = A N1 a^lambda,      P = theta1 A (pi/2) N2 a^(lambda+1)
 * for the contact radius at prescribed depth w, and return (a, P, S) with
 * S = theta1 a / (1 + m3^0 theta1 a).
 *
 * For m3^0 < 0 (stiffening) the depth-radius map folds at a finite
 * maximum depth; depths beyond it have no solution on the physical branch
 * and are rejected with the admissible range in the message.
 */
inline ContactState indentation_curve_exact(double w, const IndenterShape& ind, double theta1,
                                            double m3) {
    if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("indentation_curve_exact: w must be nonnegative");
    if (!(theta1 > 0.0))
        throw std::invalid_argument("indentation_curve_exact: theta1 must be positive");
    if (w == 0.0) return {0.0, 0.0, 0.0, 0.0};

    const ShapeConstants sc = shape_constants(ind.lambda_exp);
    const double lam = ind.lambda_exp;
    const double a0 = std::pow(w / (ind.A * sc.n1), 1.0 / lam);
    const detail::ContactEquation g{ind.A, lam, sc.n1, sc.n2, theta1, m3, w};

    double hi;
    if (m3 >= 0.0) {
        hi = a0;  // g(a0) = m3 P(a0) >= 0
        if (g(hi) < 0.0) hi = 10.0 * a0;  // guard against pow roundoff
    } else {
        const double a_crit = lam * sc.n1 / ((lam + 1.0) * (M_PI / 2.0) * sc.n2 * theta1 * (-m3));
        hi = std::min(10.0 * a0, a_crit);
        if (g(hi) < 0.0) {
            const double w_max = g(a_crit) + w;
            throw std::domain_error(
                "indentation_curve_exact: no contact solution at w = " + std::to_string(w) +
                "; admissible depths for this m3 are w < " + std::to_string(w_max));
        }
    }

    const double a = detail::solve_bracketed(g, 0.0, hi, 1e-12);
    const double P = theta1 * ind.A * (M_PI / 2.0) * sc.n2 * std::pow(a, lam + 1.0);
    const double denom = 1.0 + m3 * theta1 * a;
    if (!(denom > 0.0))
        throw std::domain_error("indentation_curve_exact: negative-stiffness branch rejected");
    const double S = theta1 * a / denom;
    return {w, a, P, S};
}

struct AsymptoticStiffness {
    double s_eps;  // perturbed stiffness [N/m]
    double s0;     // bulk stiffness at the same depth [N/m]
};

/// Bulk indentation stiffness S0 = theta1 (w / (A N1))^(1/lambda).
inline double bulk_stiffness(double w, const IndenterShape& ind, double theta1) {
    if (!(w > 0.0)) throw std::invalid_argument("bulk_stiffness: w must be positive");
    const ShapeConstants sc = shape_constants(ind.lambda_exp);
    return theta1 * std::pow(w / (ind.A * sc.n1), 1.0 / ind.lambda_exp);
}

/// Magnitude of the first-order correction, |m3| S0 (lambda+2)/(lambda+1);
/// the expansion is trustworthy only while this is small (< 0.3 or so).
inline double first_order_magnitude(double m3, double s0, double lambda_exp) {
    return std::abs(m3) * s0 * (lambda_exp + 2.0) / (lambda_exp + 1.0);
}

/**
 * First-order stiffness at prescribed depth,
 *   S_eps = S0 (1 - m3^0 ((lambda+2)/(lambda+1)) S0).
 */
inline AsymptoticStiffness stiffness_asymptotic(double w, const IndenterShape& ind, double theta1,
                                                double m3) {
    const double s0 = bulk_stiffness(w, ind, theta1);
    const double s_eps =
        s0 * (1.0 - m3 * ((ind.lambda_exp + 2.0) / (ind.lambda_exp + 1.0)) * s0);
    return {s_eps, s0};
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/**
 * Standard-normal draw keyed by (seed, counter): splitmix64 stream plus
 * Box-Muller.  Independent of evaluation order, so parallel map
 * generation stays bit-reproducible.
 */
inline double gaussian_draw(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t s = detail::splitmix64(seed ^ detail::splitmix64(counter));
    const std::uint64_t a = detail::splitmix64(s);
    const std::uint64_t b = detail::splitmix64(s ^ 0xd1b54a32d192ed03ull);
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// m3^0 at lateral offset xi, dispatching on the bulk compressibility.
inline double m3_spherical(const MaterialParams& m, const InclusionParams& incl, double xi,
                           double g3 = 0.0) {
    return m.incompressible() ? m3_spherical_incompressible(m, incl, xi, g3)
                              : m3_spherical_general(m, incl, xi, g3);
}

/// First-order stiffness of one indentation at surface point (x1, x2);
/// depends on the point only through its distance to the epicenter.
inline double stiffness_at_point(const MaterialParams& m, const InclusionParams& incl,
                                 const IndenterShape& ind, double w, double x1, double x2,
                                 double g3 = 0.0) {
    const double rho = std::hypot(x1 - incl.x0[0], x2 - incl.x0[1]);
    const double m3 = m3_spherical(m, incl, rho / incl.d, g3);
    return stiffness_asymptotic(w, ind, contact_modulus(m), m3).s_eps;
}

/**
 * Synthetic grid-indentation stiffness map at fixed depth w.  Stiffness
 * per point is the first-order model at xi = |x - x0| / d; optional
 * multiplicative Gaussian noise S (1 + sigma zeta) is keyed per point
 * index.  Validity concerns (inclusion smallness, contact radius vs
 * depth, first-order magnitude) are recorded as metadata warnings.
 */
inline StiffnessMap stiffness_map_forward(const GridSpec& grid, const MaterialParams& m,
                                          const InclusionParams& incl, const IndenterShape& ind,
                                          double w, double g3 = 0.0, NoiseSpec noise = {}) {
    grid.validate();
    if (!(w > 0.0)) throw std::invalid_argument("stiffness_map_forward: w must be positive");
    if (noise.sigma < 0.0 || !std::isfinite(noise.sigma))
        throw std::invalid_argument("stiffness_map_forward: sigma must be nonnegative");

    const double theta1 = contact_modulus(m);
    const ShapeConstants sc = shape_constants(ind.lambda_exp);
    const double a0 = std::pow(w / (ind.A * sc.n1), 1.0 / ind.lambda_exp);
    const double s0 = bulk_stiffness(w, ind, theta1);

    StiffnessMap map;
    map.meta.w = w;
    map.meta.noise = noise;
    map.meta.material = m;
    map.meta.indenter = ind;
    map.meta.inclusion = incl;

    if (incl.smallness_warning())
        map.meta.warnings.push_back("inclusion smallness r_eps/d = " +
                                    std::to_string(incl.smallness()) + " exceeds 0.3");
    if (a0 / incl.d > 0.3)
        map.meta.warnings.push_back("contact radius a0/d = " + std::to_string(a0 / incl.d) +
                                    " exceeds 0.3; half-space approximation degraded");
    const double peak = first_order_magnitude(m3_spherical(m, incl, 0.0, g3), s0, ind.lambda_exp);
    if (peak > 0.3)
        map.meta.warnings.push_back("first-order correction magnitude " + std::to_string(peak) +
                                    " exceeds 0.3 at the epicenter");

    map.points.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
    std::uint64_t counter = 0;
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j, ++counter) {
            const double x1 =
                grid.nx == 1 ? grid.center1
                             : grid.center1 - 0.5 * grid.extent1 + grid.extent1 * i / (grid.nx - 1);
            const double x2 =
                grid.ny == 1 ? grid.center2
                             : grid.center2 - 0.5 * grid.extent2 + grid.extent2 * j / (grid.ny - 1);
            double s = stiffness_at_point(m, incl, ind, w, x1, x2, g3);
            if (noise.sigma > 0.0) s *= 1.0 + noise.sigma * gaussian_draw(noise.seed, counter);
            if (!(s > 0.0))
                throw std::domain_error(
                    "stiffness_map_forward: nonpositive stiffness sample; parameters outside the "
                    "model's validity");
            map.points.push_back({x1, x2, s});
        }
    }
    return map;
}

}  // namespace istomo

#endif  // ISTOMO_FORWARD_HPP
