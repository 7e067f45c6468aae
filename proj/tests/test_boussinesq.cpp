#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "istomo/boussinesq.hpp"

using namespace istomo;
using Catch::Approx;

namespace {

// Max componentwise deviation relative to the larger vector's scale.
double rel_inf(const Strain6& a, const Strain6& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return scale > 0.0 ? (a - b).cwiseAbs().maxCoeff() / scale : 0.0;
}

// Second-order FD residual of the Lame operator mu lap(T) + (lam+mu) grad(div T).
double lame_residual(const Vec3& x, const MaterialParams& m) {
    const LameConstants lc = lame_constants(m);
    const double h = 1e-4 * x.norm();
    auto T = [&](const Vec3& y) { return boussinesq_displacement(y, m); };
    auto div_at = [&](const Vec3& y) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = h;
            acc += (T(y + e)[j] - T(y - e)[j]) / (2.0 * h);
        }
        return acc;
    };
    Vec3 lap = Vec3::Zero();
    const Vec3 center = T(x);
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = h;
        lap += (T(x + e) - 2.0 * center + T(x - e)) / (h * h);
    }
    Vec3 graddiv;
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = h;
        graddiv[j] = (div_at(x + e) - div_at(x - e)) / (2.0 * h);
    }
    const Vec3 res = lc.mu * lap + (lc.lambda + lc.mu) * graddiv;
    const double scale =
        lc.mu * lap.cwiseAbs().maxCoeff() + (lc.lambda + lc.mu) * graddiv.cwiseAbs().maxCoeff();
    return res.cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
}

}  // namespace

TEST_CASE("displacement is axial on the load axis") {
    for (double nu : {0.0, 0.3, 0.5}) {
        const MaterialParams m(2.5e3, nu);
        for (double z : {0.5, 2.0}) {
            const Vec3 t = boussinesq_displacement({0.0, 0.0, z}, m);
            CHECK(t[0] == 0.0);
            CHECK(t[1] == 0.0);
            CHECK(t[2] > 0.0);
        }
    }
}

TEST_CASE("incompressible on-axis displacement closes to 1/(2 pi mu z)") {
    const MaterialParams m(9.0, 0.5);
    const double mu = shear_modulus(m);
    for (double z : {0.25, 1.0, 7.5}) {
        const Vec3 t = boussinesq_displacement({0.0, 0.0, z}, m);
        CHECK(t[2] == Approx(1.0 / (2.0 * M_PI * mu * z)).epsilon(1e-14));
    }
}

TEST_CASE("displacement satisfies the Lame system") {
    for (double nu : {0.0, 0.3, 0.45}) {
        const MaterialParams m(2.5, nu);
        CHECK(lame_residual({0.3, -0.2, 0.7}, m) < 1e-6);
        CHECK(lame_residual({-1.1, 0.4, 1.9}, m) < 1e-6);
    }
}

TEST_CASE("displacement rejects the singular point and the upper half") {
    const MaterialParams m(1.0, 0.3);
    CHECK_THROWS_AS(boussinesq_displacement({0.0, 0.0, 0.0}, m), std::invalid_argument);
    CHECK_THROWS_AS(boussinesq_displacement({0.1, 0.0, -0.1}, m), std::invalid_argument);
}

TEST_CASE("scaled strain vector at reference points") {
    const Strain6 e0 = scaled_strain_vector(0.0, 0.5);
    CHECK(e0[0] == 1.0);
    CHECK(e0[1] == 1.0);
    CHECK(e0[2] == -2.0);
    CHECK(e0[3] == 0.0);
    CHECK(e0[4] == 0.0);
    CHECK(e0[5] == 0.0);

    // xi = 1, nu = 1/2: eps6 = 3 sqrt2 / (sqrt2)^5 = 3/4
    const Strain6 e1 = scaled_strain_vector(1.0, 0.5);
    CHECK(e1[5] == Approx(0.75).epsilon(1e-14));
    CHECK(e1[0] == Approx(-0.17677669529663687).epsilon(1e-14));  // -1/(4 sqrt2)
    CHECK(e1[1] == Approx(0.35355339059327373).epsilon(1e-14));   //  1/(2 sqrt2)
}

TEST_CASE("in-plane shear components vanish identically") {
    for (double nu : {0.0, 0.2, 0.45, 0.5})
        for (double xi = -3.0; xi <= 3.0; xi += 0.17) {
            const Strain6 e = scaled_strain_vector(xi, nu);
            CHECK(e[3] == 0.0);
            CHECK(e[4] == 0.0);
        }
}

TEST_CASE("parity in xi: normal components even, eps6 odd") {
    for (double nu : {0.0, 0.3, 0.5})
        for (double xi = 0.1; xi <= 4.0; xi += 0.3) {
            const Strain6 p = scaled_strain_vector(xi, nu);
            const Strain6 n = scaled_strain_vector(-xi, nu);
            CHECK(p[0] == n[0]);
            CHECK(p[1] == n[1]);
            CHECK(p[2] == n[2]);
            CHECK(p[5] == -n[5]);
        }
}

TEST_CASE("decay with lateral distance") {
    for (double nu : {0.0, 0.3, 0.5})
        for (double xi = 0.0; xi <= 10.0; xi += 0.5) {
            const double r = std::hypot(xi, 1.0);
            const double bound = 10.0 / (r * r * r);
            const Strain6 e = scaled_strain_vector(xi, nu);
            for (int k = 0; k < 6; ++k) CHECK(std::abs(e[k]) <= bound);
        }
    CHECK(scaled_strain_vector(50.0, 0.3).cwiseAbs().maxCoeff() < 1e-3);
    CHECK(scaled_strain_vector(500.0, 0.3).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("incompressible strains are trace-free") {
    for (double xi = 0.0; xi <= 6.0; xi += 0.25) {
        const Strain6 e = scaled_strain_vector(xi, 0.5);
        const double scale = e.cwiseAbs().maxCoeff();
        CHECK(std::abs(e[0] + e[1] + e[2]) <= 4e-16 * std::max(scale, 1.0));
    }
}

TEST_CASE("strain at the inclusion site: on-axis closed form and depth scaling") {
    const MaterialParams m(6e3, 0.5);
    const double mu = shear_modulus(m);
    const Strain6 e1 = strain_at_inclusion(FieldPoint(0.0, 1.0), m);
    CHECK(e1[2] == Approx(-1.0 / (2.0 * M_PI * mu)).epsilon(1e-14));

    // 1/d^2 scaling is exact (power-of-two depth ratio)
    const Strain6 e2 = strain_at_inclusion(FieldPoint(0.0, 2.0), m);
    for (int k = 0; k < 6; ++k) CHECK(4.0 * e2[k] == e1[k]);
}

TEST_CASE("strain at the inclusion site matches the FD oracle") {
    const double d = 2.0;
    for (double nu : {0.0, 0.3, 0.49, 0.5}) {
        const MaterialParams m(5e3, nu);
        for (double xi : {0.0, 0.5, 0.7, 1.0, 2.0}) {
            const Strain6 analytic = strain_at_inclusion(FieldPoint(xi, d), m);
            // The indentation point is at +xi*d from the epicenter, so the
            // field point relative to the load is (-xi d, 0, d).
            const Strain6 fd = strain_fd_oracle({-xi * d, 0.0, d}, m);
            CHECK(rel_inf(analytic, fd) < 1e-6);
        }
    }
}

TEST_CASE("FD oracle trace equals the analytic dilatation on axis") {
    const MaterialParams m(2.0, 0.25);
    const double mu = shear_modulus(m);
    const double d = 1.5;
    const Strain6 fd = strain_fd_oracle({0.0, 0.0, d}, m);
    // div T = -(1-2nu) x3 / (2 pi mu |x|^3); on axis at depth d
    const double want = -(1.0 - 2.0 * m.nu) / (2.0 * M_PI * mu * d * d);
    CHECK(fd[0] + fd[1] + fd[2] == Approx(want).epsilon(1e-8));
}

TEST_CASE("FD error drops at least quadratically when the step is halved") {
    const MaterialParams m(5e3, 0.3);
    const Vec3 x{-1.4, 0.0, 2.0};
    const Strain6 exact = strain_at_inclusion(FieldPoint(0.7, 2.0), m);
    const double h = 0.12 * x.norm();
    const double err_h = (strain_fd_single(x, m, h) - exact).cwiseAbs().maxCoeff();
    const double err_h2 = (strain_fd_single(x, m, 0.5 * h) - exact).cwiseAbs().maxCoeff();
    CHECK(err_h / err_h2 > 3.5);
}

TEST_CASE("FD oracle reports step-size degeneracy") {
    const MaterialParams m(1.0, 0.3);
    // Steps this large sample the near-singular region: the Richardson
    // consistency check must fire rather than return garbage.
    CHECK_THROWS_AS(strain_fd_oracle({0.3, 0.0, 0.95}, m, 0.3), std::runtime_error);
}
