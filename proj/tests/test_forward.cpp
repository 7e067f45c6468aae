#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "istomo/forward.hpp"

using namespace istomo;
using Catch::Approx;

namespace {

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const MaterialParams kIncomp(1e4, 0.5);
const InclusionParams kStiffIncl(1e-6, {0.0, 0.0}, 2e-7, 10.0, 0.5);

}  // namespace

TEST_CASE("quadratic form reduces to the offset for zero strain or matched inclusion") {
    const PolarizationMatrix p = polarization_matrix_spherical(
        MaterialParams(1e4, 0.3), InclusionParams(1e-6, {0, 0}, 2e-7, 5.0, 0.2));
    CHECK(m3_quadratic_form(Strain6::Zero(), p, 0.125) == 0.125);

    for (double nu : {0.0, 0.3, 0.45})
        for (double xi : {0.0, 0.5, 1.0, 2.0}) {
            const MaterialParams m(1e4, nu);
            const InclusionParams matched(1e-6, {0, 0}, 2e-7, 1.0, nu);
            CHECK(m3_spherical_general(m, matched, xi, -3e-4) == -3e-4);
        }
}

TEST_CASE("incompressible closed form: invisibility, cavity amplitude, parity") {
    const InclusionParams matched(1e-6, {0, 0}, 2e-7, 1.0, 0.5);
    CHECK(m3_spherical_incompressible(kIncomp, matched, 0.7) == 0.0);

    // cavity: braces factor -10/3 at xi = 0, independent of nu0
    const InclusionParams cavity(1e-6, {0, 0}, 2e-7, 0.0, 0.3);
    const double mu = shear_modulus(kIncomp);
    const double pref = kIncomp.E * cavity.volume() /
                        (16.0 * M_PI * M_PI * mu * mu * std::pow(cavity.d, 4));
    const double m3 = m3_spherical_incompressible(kIncomp, cavity, 0.0);
    CHECK(m3 == Approx(pref * 10.0 / 3.0).epsilon(1e-14));
    CHECK(m3 > 0.0);  // softening

    for (double xi : {0.3, 1.0, 2.5})
        CHECK(m3_spherical_incompressible(kIncomp, kStiffIncl, xi) ==
              m3_spherical_incompressible(kIncomp, kStiffIncl, -xi));

    CHECK_THROWS_AS(m3_spherical_incompressible(MaterialParams(1e4, 0.3), kStiffIncl, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(m3_spherical_general(kIncomp, kStiffIncl, 0.0), std::invalid_argument);
}

TEST_CASE("general path converges linearly to the incompressible closed form") {
    // nu0 = 0.5 throughout: Eq-level limit only exists there (see ledger).
    for (double alpha : {0.5, 2.0, 10.0})
        for (double xi : {0.0, 0.7, 1.5}) {
            const InclusionParams incl(1e-6, {0, 0}, 2e-7, alpha, 0.5);
            const double ref = m3_spherical_incompressible(kIncomp, incl, xi);
            double prev_err = 1e9;
            std::vector<double> errs;
            for (int k = 2; k <= 4; ++k) {
                const MaterialParams m(1e4, 0.5 - std::pow(10.0, -k));
                const double err = std::abs(m3_spherical_general(m, incl, xi) - ref) / std::abs(ref);
                CHECK(err < prev_err);
                errs.push_back(err);
                prev_err = err;
            }
            // error is O(0.5 - nu): one decade in nu gives about one in error
            CHECK(errs[0] / errs[1] == Approx(10.0).margin(6.0));
            CHECK(errs[2] < 1e-2);
        }
}

TEST_CASE("near-incompressible quadratic form matches the closed form within 1%") {
    const MaterialParams near(1e4, 0.4999);
    const InclusionParams incl(1e-6, {0, 0}, 2e-7, 3.0, 0.5);
    for (double xi : {0.0, 0.5, 1.3}) {
        const double general = m3_spherical_general(near, incl, xi);
        const double closed = m3_spherical_incompressible(kIncomp, incl, xi);
        CHECK(general == Approx(closed).epsilon(1e-2));
    }
}

TEST_CASE("perturbation decays as the sixth power of the offset") {
    const MaterialParams near(1e4, 0.4999);
    const InclusionParams incl(1e-6, {0, 0}, 2e-7, 3.0, 0.5);
    std::vector<double> xs, ys;
    for (double xi = 5.0; xi <= 50.0; xi *= 1.4) {
        xs.push_back(xi);
        ys.push_back(std::abs(m3_spherical_general(near, incl, xi)));
    }
    const double slope = loglog_slope(xs, ys);
    CHECK(slope == Approx(-6.0).margin(0.2));
}

TEST_CASE("Hertz reduction at lambda = 2") {
    const MaterialParams m(1e4, 0.3);
    const double theta1 = contact_modulus(m);
    const double R = 1e-6;
    const IndenterShape ind(2.0, 1.0 / (2.0 * R));
    const double estar = m.E / (1.0 - m.nu * m.nu);
    for (double w : {1e-9, 5e-9, 2e-8, 1e-7}) {
        const ContactState st = indentation_curve_exact(w, ind, theta1, 0.0);
        CHECK(st.a == Approx(std::sqrt(w * R)).epsilon(1e-10));
        CHECK(st.w == Approx(st.a * st.a / R).epsilon(1e-10));
        CHECK(st.P == Approx((4.0 / 3.0) * estar * std::sqrt(R) * std::pow(w, 1.5)).epsilon(1e-10));
        CHECK(st.P == Approx((4.0 / 3.0) * estar * std::pow(st.a, 3) / R).epsilon(1e-10));
        CHECK(st.S == Approx(theta1 * st.a).epsilon(1e-12));
    }
}

TEST_CASE("Sneddon cone reduction at lambda = 1") {
    const MaterialParams m(5e3, 0.45);
    const double theta1 = contact_modulus(m);
    const IndenterShape ind(1.0, 0.5);
    for (double w : {1e-8, 1e-7, 1e-6}) {
        const ContactState st = indentation_curve_exact(w, ind, theta1, 0.0);
        CHECK(w == Approx((M_PI / 2.0) * ind.A * st.a).epsilon(1e-10));
        CHECK(st.P == Approx(theta1 * ind.A * (M_PI / 4.0) * st.a * st.a).epsilon(1e-10));
    }
}

TEST_CASE("zero depth gives the unloaded state; invalid depths are rejected") {
    const IndenterShape ind(2.0, 5e5);
    const ContactState st = indentation_curve_exact(0.0, ind, 2e4, 1e-3);
    CHECK(st.a == 0.0);
    CHECK(st.P == 0.0);
    CHECK(st.S == 0.0);
    CHECK_THROWS_AS(indentation_curve_exact(-1e-9, ind, 2e4, 0.0), std::invalid_argument);
}

TEST_CASE("stiffening fold: depths beyond the admissible range are rejected") {
    const IndenterShape ind(2.0, 5e5);
    const double theta1 = 2e4;
    const double m3 = -5e2;  // strong stiffening
    const ShapeConstants sc = shape_constants(2.0);
    const double a_crit = 2.0 * sc.n1 / (3.0 * (M_PI / 2.0) * sc.n2 * theta1 * (-m3));
    // maximum attainable depth on the physical branch
    const double w_max = ind.A * sc.n1 * a_crit * a_crit +
                         m3 * theta1 * ind.A * (M_PI / 2.0) * sc.n2 * std::pow(a_crit, 3);
    CHECK_NOTHROW(indentation_curve_exact(0.9 * w_max, ind, theta1, m3));
    CHECK_THROWS_AS(indentation_curve_exact(2.0 * w_max, ind, theta1, m3), std::domain_error);
}

TEST_CASE("incremental stiffness is increasing in contact radius") {
    const double theta1 = 2.5e4;
    for (double m3 : {0.0, 2.0, -2.0}) {
        double prev = -1.0;
        for (double a = 0.0; a <= 1e-6; a += 2e-8) {
            const double denom = 1.0 + m3 * theta1 * a;
            REQUIRE(denom > 0.0);
            const double s = theta1 * a / denom;
            CHECK(s > prev);
            prev = s;
        }
    }
}

TEST_CASE("asymptotic stiffness: bulk value, relative perturbation, validity helper") {
    const IndenterShape ind(2.0, 2.5e5);
    const double theta1 = 8.0 / 3.0 * 1e4;
    const double w = 4.5e-8;
    const AsymptoticStiffness plain = stiffness_asymptotic(w, ind, theta1, 0.0);
    CHECK(plain.s_eps == plain.s0);
    CHECK(plain.s0 == Approx(theta1 * std::sqrt(w / (ind.A * 2.0))).epsilon(1e-14));

    for (double m3 : {-20.0, -1.0, 5.0, 60.0}) {
        const AsymptoticStiffness st = stiffness_asymptotic(w, ind, theta1, m3);
        const double lamfac = (ind.lambda_exp + 2.0) / (ind.lambda_exp + 1.0);
        CHECK((st.s_eps - st.s0) / st.s0 == Approx(-m3 * lamfac * st.s0).epsilon(1e-12));
        CHECK(first_order_magnitude(m3, st.s0, ind.lambda_exp) ==
              Approx(std::abs(m3) * lamfac * st.s0).epsilon(1e-15));
    }
}

TEST_CASE("exact-asymptotic gap shrinks quadratically") {
    const IndenterShape ind(2.0, 2.5e5);
    const double theta1 = 8.0 / 3.0 * 1e4;
    const double w = 4.5e-8;
    const double s0 = bulk_stiffness(w, ind, theta1);

    auto gap = [&](double m3) {
        const ContactState ex = indentation_curve_exact(w, ind, theta1, m3);
        const AsymptoticStiffness as = stiffness_asymptotic(w, ind, theta1, m3);
        return std::abs(ex.S - as.s_eps) / as.s0;
    };

    // halving m3 cuts the O(m3^2) discrepancy about 4x
    const double m3 = 0.02 / s0;
    CHECK(gap(m3) / gap(0.5 * m3) == Approx(4.0).margin(0.5));

    // fitted order over the sweep m3 s0 in [1e-4, 1e-1]
    std::vector<double> ts, errs;
    for (double t = 1e-4; t <= 1.001e-1; t *= std::pow(10.0, 1.0 / 3.0)) {
        ts.push_back(t);
        errs.push_back(gap(t / s0));
    }
    CHECK(loglog_slope(ts, errs) >= 1.9);
}

TEST_CASE("matched inclusion produces a flat map") {
    const InclusionParams matched(1e-6, {0, 0}, 2e-7, 1.0, 0.5);
    GridSpec grid;
    grid.extent1 = grid.extent2 = 6e-6;
    const IndenterShape ind(2.0, 2.5e5);
    const StiffnessMap map = stiffness_map_forward(grid, kIncomp, matched, ind, 4.5e-8);
    const double s0 = bulk_stiffness(4.5e-8, ind, contact_modulus(kIncomp));
    for (const auto& p : map.points) CHECK(p.s == s0);
    REQUIRE(map.meta.w.has_value());
    CHECK(*map.meta.w == 4.5e-8);
}

TEST_CASE("anomaly peaks at the epicenter and keeps the stiffening sign") {
    GridSpec grid;
    grid.extent1 = grid.extent2 = 6e-6;
    const IndenterShape ind(2.0, 2.5e5);
    const double w = 4.5e-8;
    const double s0 = bulk_stiffness(w, ind, contact_modulus(kIncomp));

    // stiff inclusion at a grid node: peak there, all samples stiffer
    const StiffnessMap stiff = stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, w);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < stiff.points.size(); ++i) {
        if (std::abs(stiff.points[i].s - s0) > std::abs(stiff.points[peak].s - s0)) peak = i;
        CHECK(stiff.points[i].s > s0);  // 15 alpha > 10 (1 + nu0)
    }
    CHECK(stiff.points[peak].x1 == 0.0);
    CHECK(stiff.points[peak].x2 == 0.0);
    CHECK(stiff.points[peak].s > s0);

    // soft inclusion: sign flips everywhere
    const InclusionParams soft(1e-6, {0, 0}, 2e-7, 0.2, 0.5);
    const StiffnessMap softmap = stiffness_map_forward(grid, kIncomp, soft, ind, w);
    for (const auto& p : softmap.points) CHECK(p.s < s0);
}

TEST_CASE("anomaly half width maps to the depth") {
    const IndenterShape ind(2.0, 2.5e5);
    const double w = 4.5e-8;
    const double d = kStiffIncl.d;
    const double s0 = bulk_stiffness(w, ind, contact_modulus(kIncomp));
    const double peak = stiffness_at_point(kIncomp, kStiffIncl, ind, w, 0.0, 0.0) - s0;
    const double rho_half = d * std::sqrt(std::cbrt(2.0) - 1.0);
    const double at_half = stiffness_at_point(kIncomp, kStiffIncl, ind, w, rho_half, 0.0) - s0;
    CHECK(at_half == Approx(0.5 * peak).epsilon(1e-12));
    // full width at half maximum = 2 d sqrt(2^(1/3) - 1) ~ 1.02 d
    CHECK(2.0 * rho_half == Approx(1.0196490570678866 * d).epsilon(1e-14));
}

TEST_CASE("map is rotation invariant about the epicenter") {
    const IndenterShape ind(2.0, 2.5e5);
    const double w = 4.5e-8;
    const double c = std::cos(0.53), s = std::sin(0.53);
    for (double x1 = -3e-6; x1 <= 3e-6; x1 += 7.3e-7)
        for (double x2 = -3e-6; x2 <= 3e-6; x2 += 7.3e-7) {
            const double r1 = c * x1 - s * x2;
            const double r2 = s * x1 + c * x2;
            const double a = stiffness_at_point(kIncomp, kStiffIncl, ind, w, x1, x2);
            const double b = stiffness_at_point(kIncomp, kStiffIncl, ind, w, r1, r2);
            CHECK(a == Approx(b).epsilon(1e-12));
        }
}

TEST_CASE("noise is reproducible and keyed by the point index") {
    GridSpec grid;
    grid.extent1 = grid.extent2 = 6e-6;
    const IndenterShape ind(2.0, 2.5e5);
    const NoiseSpec noise{0.01, 42};
    const StiffnessMap a = stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, 4.5e-8, 0.0, noise);
    const StiffnessMap b = stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, 4.5e-8, 0.0, noise);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].s == b.points[i].s);

    const StiffnessMap clean = stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, 4.5e-8);
    for (std::size_t i = 0; i < a.points.size(); ++i)
        CHECK(a.points[i].s ==
              clean.points[i].s * (1.0 + noise.sigma * gaussian_draw(noise.seed, i)));

    const StiffnessMap c = stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, 4.5e-8, 0.0,
                                                 NoiseSpec{0.01, 43});
    bool any_differ = false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (a.points[i].s != c.points[i].s) any_differ = true;
    CHECK(any_differ);
}

TEST_CASE("validity warnings land in the metadata") {
    GridSpec grid;
    grid.extent1 = grid.extent2 = 6e-6;
    const IndenterShape ind(2.0, 2.5e5);
    const InclusionParams big(1e-6, {0, 0}, 4.5e-7, 100.0, 0.5);
    const StiffnessMap map = stiffness_map_forward(grid, kIncomp, big, ind, 1e-7);
    CHECK(!map.meta.warnings.empty());

    const StiffnessMap clean = stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, 4.5e-8);
    CHECK(clean.meta.warnings.empty());
}

TEST_CASE("map generation rejects invalid requests") {
    GridSpec bad;
    bad.extent1 = 0.0;
    bad.extent2 = 1e-6;
    const IndenterShape ind(2.0, 2.5e5);
    CHECK_THROWS_AS(stiffness_map_forward(bad, kIncomp, kStiffIncl, ind, 4.5e-8),
                    std::invalid_argument);
    GridSpec grid;
    grid.extent1 = grid.extent2 = 6e-6;
    CHECK_THROWS_AS(stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, 0.0),
                    std::invalid_argument);
    // absurd noise drives samples nonpositive
    CHECK_THROWS_AS(
        stiffness_map_forward(grid, kIncomp, kStiffIncl, ind, 4.5e-8, 0.0, NoiseSpec{10.0, 1}),
        std::domain_error);
}
