/**
 * Five-parameter anomaly fit for grid-indentation stiffness maps,
 *   S(x1, x2) = S0 + C0 / (d^2 + (x1-x10)^2 + (x2-x20)^2)^3,
 * by damped (Levenberg-Marquardt) least squares with analytic
 * derivatives, plus extraction of the inclusion parameters from the
 * fitted coefficients.
 *
 * The fit is deterministic for a given (map, init, options).  Internally
 * the problem is nondimensionalized by the grid's length scale and the
 * median stiffness (the raw normal matrix spans ~70 orders of magnitude
 * in SI units), and the depth is log-parameterized to stay positive.
 */

#ifndef ISTOMO_FIT_HPP
#define ISTOMO_FIT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "istomo/elastic.hpp"
#include "istomo/forward.hpp"

namespace istomo {

struct ModelParams5 {
    double s0;   // bulk stiffness [N/m]
    double c0;   // anomaly coefficient [N m^5]
    double d;    // depth [m], > 0
    double x10;  // epicenter [m]
    double x20;  // epicenter [m]
};

struct FitOptions {
    int max_iter = 200;
    double step_tol = 1e-10;  // relative accepted-step threshold
    double grad_tol = 1e-12;  // gradient inf-norm threshold, times max(1, rss)
    int multistart = 0;       // extra restarts over anomaly candidates
};

struct FitResult {
    ModelParams5 params{};
    double rss = 0.0;           // residual sum of squares [N^2/m^2]
    int iterations = 0;
    bool converged = false;
    std::array<double, 5> ci{};  // linearized 1-sigma half-widths (s0, c0, d, x10, x20)
    bool degenerate = false;     // near rank-deficient normal equations (C0 ~ 0)
    std::string note;
};

/// Model surface evaluation.
inline double model_eval(const ModelParams5& p, double x1, double x2) {
    const double dx1 = x1 - p.x10;
    const double dx2 = x2 - p.x20;
    const double D = p.d * p.d + dx1 * dx1 + dx2 * dx2;
    return p.s0 + p.c0 / (D * D * D);
}

/// Analytic partials (dS/dS0, dS/dC0, dS/dd, dS/dx10, dS/dx20).
inline Eigen::Matrix<double, 5, 1> model_jacobian(const ModelParams5& p, double x1, double x2) {
    const double dx1 = x1 - p.x10;
    const double dx2 = x2 - p.x20;
    const double D = p.d * p.d + dx1 * dx1 + dx2 * dx2;
    const double D3 = D * D * D;
    const double D4 = D3 * D;
    Eigen::Matrix<double, 5, 1> j;
    j[0] = 1.0;
    j[1] = 1.0 / D3;
    j[2] = -6.0 * p.c0 * p.d / D4;
    j[3] = 6.0 * p.c0 * dx1 / D4;
    j[4] = 6.0 * p.c0 * dx2 / D4;
    return j;
}

struct InitialGuess {
    ModelParams5 params{};
    bool anomaly_detected = false;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        return 0.5 * (v[mid - 1] + hi);
    }
    return hi;
}

// Parabolic vertex offset from three samples at -h, 0, +h; 0 when the
// center is not a proper maximum.
inline double parabolic_offset(double fm, double f0, double fp, double h) {
    const double denom = fm - 2.0 * f0 + fp;
    if (!(denom < 0.0)) return 0.0;
    const double delta = 0.5 * (fm - fp) / denom * h;
    return std::clamp(delta, -0.5 * h, 0.5 * h);
}

// FWHM radius of the |S - S0| profile maps to depth via
// (d^2 + rho^2)^3 = 2 d^6  =>  rho_half = d sqrt(2^(1/3) - 1).
inline double half_width_to_depth(double rho_half) {
    return rho_half / std::sqrt(std::cbrt(2.0) - 1.0);
}

}  // namespace detail

/**
 * Heuristic starting point: S0 from the median stiffness, the epicenter
 * from the largest |S - S0| sample (with parabolic sub-grid refinement
 * along each axis where lattice neighbors exist), the depth from the
 * interpolated half-max radius of the anomaly, and C0 from the peak.
 *
 * A map whose peak does not rise above the robust noise floor is
 * reported with anomaly_detected = false and a pure-bulk guess (C0 = 0).
 */
inline InitialGuess initial_guess(const StiffnessMap& map) {
    const auto& pts = map.points;
    if (pts.size() < 10)
        throw std::invalid_argument("initial_guess: need at least 10 points");

    std::vector<double> svals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) svals[i] = pts[i].s;
    const double s0 = detail::median_of(svals);

    std::vector<double> dev(pts.size());
    std::size_t peak_idx = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        dev[i] = std::abs(pts[i].s - s0);
        if (dev[i] > dev[peak_idx]) peak_idx = i;
    }
    const double peak = dev[peak_idx];

    // Coordinate scales: bounding box extent and a local spacing estimate.
    double x1min = pts[0].x1, x1max = pts[0].x1, x2min = pts[0].x2, x2max = pts[0].x2;
    for (const auto& p : pts) {
        x1min = std::min(x1min, p.x1);
        x1max = std::max(x1max, p.x1);
        x2min = std::min(x2min, p.x2);
        x2max = std::max(x2max, p.x2);
    }
    const double extent = std::max(x1max - x1min, x2max - x2min);

    const double coord_tol = 1e-9 * std::max(extent, 1e-300);
    // Nearest lattice neighbors of the peak along each axis.
    double hx = 0.0, hy = 0.0;
    double f_left = 0.0, f_right = 0.0, f_down = 0.0, f_up = 0.0;
    bool have_x = false, have_y = false;
    {
        const MapPoint& c = pts[peak_idx];
        double best_l = -1, best_r = -1, best_d = -1, best_u = -1;
        std::size_t il = 0, ir = 0, id = 0, iu = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == peak_idx) continue;
            if (std::abs(pts[i].x2 - c.x2) <= coord_tol) {
                const double gap = pts[i].x1 - c.x1;
                if (gap < 0 && (best_l < 0 || -gap < best_l)) { best_l = -gap; il = i; }
                if (gap > 0 && (best_r < 0 || gap < best_r)) { best_r = gap; ir = i; }
            }
            if (std::abs(pts[i].x1 - c.x1) <= coord_tol) {
                const double gap = pts[i].x2 - c.x2;
                if (gap < 0 && (best_d < 0 || -gap < best_d)) { best_d = -gap; id = i; }
                if (gap > 0 && (best_u < 0 || gap < best_u)) { best_u = gap; iu = i; }
            }
        }
        if (best_l > 0 && best_r > 0 && std::abs(best_l - best_r) <= 0.01 * best_l) {
            have_x = true;
            hx = best_r;
            f_left = dev[il];
            f_right = dev[ir];
        }
        if (best_d > 0 && best_u > 0 && std::abs(best_d - best_u) <= 0.01 * best_d) {
            have_y = true;
            hy = best_u;
            f_down = dev[id];
            f_up = dev[iu];
        }
    }
    const double spacing = std::max(std::max(hx, hy), coord_tol);

    // Robust noise floor; 4x keeps a 441-sample Gaussian max below it.
    const double mad = detail::median_of(dev);
    const double floor = std::max(4.0 * 1.4826 * mad, 1e-12 * std::abs(s0));
    if (!(peak > floor)) {
        InitialGuess g;
        g.anomaly_detected = false;
        g.params = {s0, 0.0, std::max(spacing, 0.25 * extent), 0.5 * (x1min + x1max),
                    0.5 * (x2min + x2max)};
        return g;
    }

    double ex = pts[peak_idx].x1;
    double ey = pts[peak_idx].x2;
    if (have_x) ex += detail::parabolic_offset(f_left, peak, f_right, hx);
    if (have_y) ey += detail::parabolic_offset(f_down, peak, f_up, hy);

    // Interpolated first crossing of |S - S0| below half max, by radius.
    std::vector<std::pair<double, double>> prof(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        prof[i] = {std::hypot(pts[i].x1 - ex, pts[i].x2 - ey), dev[i]};
    std::sort(prof.begin(), prof.end());
    const double half = 0.5 * peak;
    double rho_half = 0.5 * extent;
    for (std::size_t i = 1; i < prof.size(); ++i) {
        if (prof[i].second < half) {
            const auto& [r0, f0] = prof[i - 1];
            const auto& [r1, f1] = prof[i];
            rho_half = (f0 > f1) ? r0 + (r1 - r0) * (f0 - half) / (f0 - f1) : r1;
            break;
        }
    }
    double d = detail::half_width_to_depth(rho_half);
    d = std::clamp(d, spacing, std::max(extent, spacing));

    InitialGuess g;
    g.anomaly_detected = true;
    const double d3 = d * d * d;
    g.params = {s0, (pts[peak_idx].s - s0) * d3 * d3, d, ex, ey};
    return g;
}

namespace detail {

struct ScaledProblem {
    Eigen::VectorXd x1, x2, s;  // nondimensional samples
    double ls;                  // length scale [m]
    double ss;                  // stiffness scale [N/m]
    double cx1, cx2;            // coordinate offsets [m]
};

inline ScaledProblem scale_problem(const StiffnessMap& map) {
    const auto n = static_cast<Eigen::Index>(map.points.size());
    ScaledProblem sp;
    sp.x1.resize(n);
    sp.x2.resize(n);
    sp.s.resize(n);
    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        m1 += map.points[i].x1;
        m2 += map.points[i].x2;
    }
    sp.cx1 = m1 / n;
    sp.cx2 = m2 / n;
    double r2 = 0.0;
    std::vector<double> sv(map.points.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = map.points[i].x1 - sp.cx1;
        const double b = map.points[i].x2 - sp.cx2;
        r2 += a * a + b * b;
        sv[i] = std::abs(map.points[i].s);
    }
    sp.ls = std::sqrt(r2 / n);
    if (!(sp.ls > 0.0)) sp.ls = 1.0;
    sp.ss = median_of(sv);
    if (!(sp.ss > 0.0)) sp.ss = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        sp.x1[i] = (map.points[i].x1 - sp.cx1) / sp.ls;
        sp.x2[i] = (map.points[i].x2 - sp.cx2) / sp.ls;
        sp.s[i] = map.points[i].s / sp.ss;
    }
    return sp;
}

// Internal parameter vector: (s0, c0, u = ln d, x10, x20), nondimensional.
inline Eigen::Matrix<double, 5, 1> to_internal(const ModelParams5& p, const ScaledProblem& sp) {
    Eigen::Matrix<double, 5, 1> q;
    const double l6 = std::pow(sp.ls, 6);
    q << p.s0 / sp.ss, p.c0 / (sp.ss * l6), std::log(p.d / sp.ls), (p.x10 - sp.cx1) / sp.ls,
        (p.x20 - sp.cx2) / sp.ls;
    return q;
}

inline ModelParams5 from_internal(const Eigen::Matrix<double, 5, 1>& q, const ScaledProblem& sp) {
    const double l6 = std::pow(sp.ls, 6);
    return {q[0] * sp.ss, q[1] * sp.ss * l6, std::exp(q[2]) * sp.ls, q[3] * sp.ls + sp.cx1,
            q[4] * sp.ls + sp.cx2};
}

inline double internal_rss(const Eigen::Matrix<double, 5, 1>& q, const ScaledProblem& sp) {
    const double d = std::exp(q[2]);
    double rss = 0.0;
    for (Eigen::Index i = 0; i < sp.s.size(); ++i) {
        const double a = sp.x1[i] - q[3];
        const double b = sp.x2[i] - q[4];
        const double D = d * d + a * a + b * b;
        const double r = q[0] + q[1] / (D * D * D) - sp.s[i];
        rss += r * r;
    }
    return rss;
}

struct LmState {
    Eigen::Matrix<double, 5, 1> q;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;
};

inline LmState lm_minimize(const ScaledProblem& sp, Eigen::Matrix<double, 5, 1> q,
                           const FitOptions& opts) {
    using Vec5 = Eigen::Matrix<double, 5, 1>;
    using Mat5 = Eigen::Matrix<double, 5, 5>;
    const Eigen::Index n = sp.s.size();

    LmState st;
    st.q = q;

    auto assemble = [&](const Vec5& qq, Mat5& jtj, Vec5& jtr, double& rss, bool& degen) {
        const double d = std::exp(qq[2]);
        jtj.setZero();
        jtr.setZero();
        rss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = sp.x1[i] - qq[3];
            const double b = sp.x2[i] - qq[4];
            const double D = d * d + a * a + b * b;
            const double D3 = D * D * D;
            const double D4 = D3 * D;
            Vec5 j;
            j << 1.0, 1.0 / D3, -6.0 * qq[1] * d * d / D4, 6.0 * qq[1] * a / D4,
                6.0 * qq[1] * b / D4;
            const double r = qq[0] + qq[1] / D3 - sp.s[i];
            jtj.selfadjointView<Eigen::Lower>().rankUpdate(j);
            jtr += j * r;
            rss += r * r;
        }
        jtj = jtj.selfadjointView<Eigen::Lower>();
        const double maxdiag = jtj.diagonal().maxCoeff();
        degen = false;
        for (int k = 2; k < 5; ++k)
            if (jtj(k, k) < 1e-24 * maxdiag) degen = true;
    };

    Mat5 jtj;
    Vec5 jtr;
    bool degen = false;
    assemble(st.q, jtj, jtr, st.rss, degen);
    st.degenerate = degen;

    double lambda = 1e-3 * jtj.diagonal().maxCoeff();
    if (!(lambda > 0.0)) lambda = 1e-3;
    const double lambda_cap = 1e14 * std::max(jtj.diagonal().maxCoeff(), 1.0);

    for (; st.iterations < opts.max_iter; ) {
        if (jtr.cwiseAbs().maxCoeff() <= opts.grad_tol * std::max(1.0, st.rss)) {
            st.converged = true;
            break;
        }
        ++st.iterations;
        const Mat5 damped = jtj + lambda * Mat5::Identity();
        const Vec5 delta = damped.ldlt().solve(-jtr);
        const Vec5 q_try = st.q + delta;
        const double rss_try = internal_rss(q_try, sp);
        if (rss_try < st.rss) {
            const double rel_step = delta.norm() / std::max(st.q.norm(), 1e-300);
            st.q = q_try;
            assemble(st.q, jtj, jtr, st.rss, degen);
            st.degenerate = st.degenerate || degen;
            lambda = std::max(lambda * 0.1, 1e-300);
            if (rel_step < opts.step_tol) {
                st.converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > lambda_cap) break;  // stuck; gradient check above decides
        }
    }
    if (!st.converged && jtr.cwiseAbs().maxCoeff() <= opts.grad_tol * std::max(1.0, st.rss))
        st.converged = true;
    return st;
}

// 1-sigma half-widths from the scaled normal matrix, mapped back to SI.
inline std::array<double, 5> confidence_halfwidths(const ScaledProblem& sp,
                                                   const Eigen::Matrix<double, 5, 1>& q,
                                                   double rss_scaled) {
    using Vec5 = Eigen::Matrix<double, 5, 1>;
    using Mat5 = Eigen::Matrix<double, 5, 5>;
    std::array<double, 5> ci{};
    const Eigen::Index n = sp.s.size();
    if (n <= 5) {
        ci.fill(std::numeric_limits<double>::quiet_NaN());
        return ci;
    }
    const double d = std::exp(q[2]);
    Mat5 jtj = Mat5::Zero();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = sp.x1[i] - q[3];
        const double b = sp.x2[i] - q[4];
        const double D = d * d + a * a + b * b;
        const double D3 = D * D * D;
        const double D4 = D3 * D;
        Vec5 j;
        j << 1.0, 1.0 / D3, -6.0 * q[1] * d * d / D4, 6.0 * q[1] * a / D4, 6.0 * q[1] * b / D4;
        jtj.selfadjointView<Eigen::Lower>().rankUpdate(j);
    }
    jtj = jtj.selfadjointView<Eigen::Lower>();
    const double s2 = rss_scaled / static_cast<double>(n - 5);
    const Mat5 cov = s2 * jtj.ldlt().solve(Mat5::Identity());
    const double l6 = std::pow(sp.ls, 6);
    const std::array<double, 5> t = {sp.ss, sp.ss * l6, d * sp.ls, sp.ls, sp.ls};
    for (int k = 0; k < 5; ++k) {
        const double v = cov(k, k);
        ci[k] = v > 0.0 ? std::sqrt(v) * t[k] : 0.0;
    }
    return ci;
}

// Indices of local maxima of |S - median|, strongest first.
inline std::vector<std::size_t> anomaly_candidates(const StiffnessMap& map, double spacing_hint) {
    const auto& pts = map.points;
    std::vector<double> sv(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) sv[i] = pts[i].s;
    const double s0 = median_of(sv);
    std::vector<std::size_t> out;
    const double r2max = 2.25 * spacing_hint * spacing_hint;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double fi = std::abs(pts[i].s - s0);
        bool is_max = true;
        for (std::size_t j = 0; j < pts.size() && is_max; ++j) {
            if (j == i) continue;
            const double dx = pts[j].x1 - pts[i].x1;
            const double dy = pts[j].x2 - pts[i].x2;
            if (dx * dx + dy * dy <= r2max && std::abs(pts[j].s - s0) > fi) is_max = false;
        }
        if (is_max) out.push_back(i);
    }
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(pts[a].s - s0) > std::abs(pts[b].s - s0);
    });
    return out;
}

}  // namespace detail

/**
 * Fit the five-parameter model to a stiffness map.  The starting point is
 * `init` when given, otherwise initial_guess(map).  With
 * opts.multistart = N > 0, up to N additional restarts are seeded at the
 * strongest local anomaly candidates; the best RSS wins, ties going to
 * the smaller depth.  Deterministic for fixed inputs.
 */
inline FitResult fit_map(const StiffnessMap& map, std::optional<ModelParams5> init = {},
                         const FitOptions& opts = {}) {
    if (map.points.size() < 6)
        throw std::invalid_argument("fit_map: need at least 6 points for 5 parameters");
    for (const auto& p : map.points)
        if (!std::isfinite(p.s) || !std::isfinite(p.x1) || !std::isfinite(p.x2))
            throw std::invalid_argument("fit_map: non-finite sample");

    const detail::ScaledProblem sp = detail::scale_problem(map);

    InitialGuess base;
    if (init) {
        if (!(init->d > 0.0) || !(init->s0 > 0.0))
            throw std::invalid_argument("fit_map: init must have positive s0 and d");
        base.params = *init;
        base.anomaly_detected = true;
    } else {
        base = initial_guess(map);
    }

    std::vector<ModelParams5> starts{base.params};
    if (opts.multistart > 0) {
        double x1min = map.points[0].x1, x1max = x1min, x2min = map.points[0].x2, x2max = x2min;
        for (const auto& p : map.points) {
            x1min = std::min(x1min, p.x1);
            x1max = std::max(x1max, p.x1);
            x2min = std::min(x2min, p.x2);
            x2max = std::max(x2max, p.x2);
        }
        const double hint = std::sqrt((x1max - x1min) * (x2max - x2min) /
                                      static_cast<double>(map.points.size()));
        const auto cand = detail::anomaly_candidates(map, std::max(hint, 1e-300));
        std::vector<double> sv(map.points.size());
        for (std::size_t i = 0; i < map.points.size(); ++i) sv[i] = map.points[i].s;
        const double s0m = detail::median_of(sv);
        int added = 0;
        for (std::size_t idx : cand) {
            if (added >= opts.multistart) break;
            ModelParams5 p = base.params;
            p.x10 = map.points[idx].x1;
            p.x20 = map.points[idx].x2;
            const double d6 = std::pow(p.d, 6);
            p.c0 = (map.points[idx].s - s0m) * d6;
            starts.push_back(p);
            ++added;
        }
    }

    detail::LmState best;
    bool have_best = false;
    for (const auto& start : starts) {
        detail::LmState st = detail::lm_minimize(sp, detail::to_internal(start, sp), opts);
        const double d_st = std::exp(st.q[2]);
        const double d_best = have_best ? std::exp(best.q[2]) : 0.0;
        if (!have_best || st.rss < best.rss || (st.rss == best.rss && d_st < d_best)) {
            best = st;
            have_best = true;
        }
    }

    FitResult out;
    out.params = detail::from_internal(best.q, sp);
    out.rss = best.rss * sp.ss * sp.ss;
    out.iterations = best.iterations;
    out.converged = best.converged;
    out.degenerate = best.degenerate;
    out.ci = detail::confidence_halfwidths(sp, best.q, best.rss);
    if (!base.anomaly_detected && !init) out.note = "no anomaly detected above the noise floor";
    else if (best.degenerate) out.note = "normal equations near rank-deficient (C0 ~ 0)";
    return out;
}

enum class KnownKind { volume, alpha };

struct Extraction {
    double alpha = 0.0;
    double v_eps = 0.0;  // [m^3]
    double q = 0.0;      // (15 alpha - 10(1+nu0)) / (alpha + 1 + nu0)
    double q_times_v = 0.0;
    bool paper_normalization = false;
    std::vector<std::string> warnings;
};

/**
 * Invert the fitted anomaly coefficient for the inclusion parameters.
 * With q V_eps the combined observable,
 *   canonical:  q V_eps = 3 (lambda+1)/(lambda+2) 16 pi^2 mu^2 C0 / (E S0^2 d^2),
 *   paper flag: q V_eps = 3 (lambda+1)/(lambda+2) C0 / (E S0^2 d^4),
 * and alpha = (1+nu0)(q+10)/(15-q), feasible only for q in (-10, 15).
 * Given V_eps the ratio alpha is returned; given alpha, the volume.
 * nu0 is an assumed value (0.5 for soft matter unless known otherwise).
 */
inline Extraction extract_inclusion(const FitResult& fit, const MaterialParams& m,
                                    const IndenterShape& ind, double nu0, KnownKind kind,
                                    double known_value, bool paper_normalization = false) {
    if (!fit.converged)
        throw std::invalid_argument("extract_inclusion: fit did not converge");
    const ModelParams5& p = fit.params;
    if (!(p.d > 0.0) || !(p.s0 > 0.0))
        throw std::invalid_argument("extract_inclusion: fitted d and S0 must be positive");
    if (!(nu0 > -1.0) || !(nu0 <= 0.5))
        throw std::invalid_argument("extract_inclusion: nu0 must lie in (-1, 0.5]");

    Extraction ex;
    ex.paper_normalization = paper_normalization;
    const double lamfac = (ind.lambda_exp + 1.0) / (ind.lambda_exp + 2.0);
    if (paper_normalization) {
        ex.q_times_v = 3.0 * lamfac * p.c0 / (m.E * p.s0 * p.s0 * std::pow(p.d, 4));
    } else {
        const double mu = shear_modulus(m);
        ex.q_times_v =
            3.0 * lamfac * 16.0 * M_PI * M_PI * mu * mu * p.c0 / (m.E * p.s0 * p.s0 * p.d * p.d);
    }

    if (kind == KnownKind::volume) {
        if (!(known_value > 0.0))
            throw std::invalid_argument("extract_inclusion: known volume must be positive");
        ex.v_eps = known_value;
        ex.q = ex.q_times_v / known_value;
        if (!(ex.q > -10.0) || !(ex.q < 15.0))
            throw std::domain_error(
                "extract_inclusion: q = " + std::to_string(ex.q) +
                " outside (-10, 15); no physical alpha (model misfit or wrong nu0)");
        ex.alpha = (1.0 + nu0) * (ex.q + 10.0) / (15.0 - ex.q);
    } else {
        if (!(known_value >= 0.0))
            throw std::invalid_argument("extract_inclusion: known alpha must be nonnegative");
        ex.alpha = known_value;
        ex.q = (15.0 * known_value - 10.0 * (1.0 + nu0)) / (known_value + 1.0 + nu0);
        if (ex.q == 0.0)
            throw std::domain_error(
                "extract_inclusion: alpha at the invisibility threshold (q = 0); volume not "
                "identifiable");
        ex.v_eps = ex.q_times_v / ex.q;
        if (!(ex.v_eps > 0.0))
            throw std::domain_error(
                "extract_inclusion: fitted C0 sign inconsistent with the requested alpha");
    }

    if (ex.alpha > 100.0)
        ex.warnings.push_back(
            "rigid-limit regime (alpha > 100): extraction error grows with stiffness contrast");
    if (ex.q > 14.0)
        ex.warnings.push_back("q close to the rigid pole at 15; alpha is ill-conditioned here");
    return ex;
}

}  // namespace istomo

#endif  // ISTOMO_FIT_HPP
