// Command-line driver: generate synthetic stiffness maps, fit the
// five-parameter anomaly model, extract inclusion parameters, dump
// force-indentation curves and low-level oracle values.
//
// Exit codes: 0 success, 2 validation error, 3 fit non-convergence.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "istomo/istomo.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;

int cmd_generate(const std::string& config_path, const std::string& out_path) {
    const istomo::RunConfig cfg = istomo::load_config(config_path);
    istomo::StiffnessMap map =
        istomo::stiffness_map_forward(cfg.grid, cfg.material, cfg.inclusion, cfg.indenter, cfg.w,
                                      cfg.g3, cfg.noise);
    map.meta.generator_version = istomo::kGeneratorVersion;
    istomo::save_map(map, out_path);
    for (const auto& warning : map.meta.warnings)
        std::cerr << "warning: " << warning << '\n';
    std::cerr << "wrote " << map.points.size() << " points to " << out_path << '\n';
    return 0;
}

int cmd_fit(const std::string& in_path, const std::string& out_path, int multistart) {
    const istomo::StiffnessMap map = istomo::load_map(in_path);
    if (!map.meta.present)
        std::cerr << "warning: metadata absent (no sidecar); extraction from this fit will be "
                     "refused\n";
    istomo::FitOptions opts;
    opts.multistart = multistart;
    const istomo::FitResult fit = istomo::fit_map(map, std::nullopt, opts);
    istomo::save_fit({fit, map.meta.w}, out_path);
    std::cerr << "fit: converged=" << (fit.converged ? "yes" : "no") << " iterations="
              << fit.iterations << " rss=" << istomo::g17(fit.rss) << '\n';
    if (!fit.converged) {
        std::cerr << "error: fit did not converge within the iteration budget\n";
        return kExitNonConvergence;
    }
    return 0;
}

int cmd_extract(const std::string& fit_path, const std::string& config_path,
                std::optional<double> known_volume, std::optional<double> known_alpha,
                bool paper_flag) {
    const istomo::FitRecord rec = istomo::load_fit(fit_path);
    if (!rec.w)
        throw std::invalid_argument(
            "extract: the fit carries no indentation depth (map metadata was absent); refusing "
            "to extract");
    if (!rec.fit.converged)
        throw std::invalid_argument("extract: fit result is marked non-converged");
    const istomo::RunConfig cfg = istomo::load_config(config_path);

    istomo::KnownKind kind;
    double value;
    if (known_volume && !known_alpha) {
        kind = istomo::KnownKind::volume;
        value = *known_volume;
    } else if (known_alpha && !known_volume) {
        kind = istomo::KnownKind::alpha;
        value = *known_alpha;
    } else {
        throw std::invalid_argument(
            "extract: exactly one of --known-volume or --known-alpha is required");
    }

    const istomo::Extraction ex =
        istomo::extract_inclusion(rec.fit, cfg.material, cfg.indenter, cfg.inclusion.nu0, kind,
                                  value, paper_flag || cfg.paper_normalization);
    for (const auto& warning : ex.warnings) std::cerr << "warning: " << warning << '\n';
    std::cout << istomo::to_json(ex).dump(2) << '\n';
    return 0;
}

int cmd_curve(const std::string& config_path, double w_max, int steps,
              const std::string& out_path) {
    if (!(w_max > 0.0)) throw std::invalid_argument("curve: --w-max must be positive");
    if (steps < 1) throw std::invalid_argument("curve: --steps must be >= 1");
    const istomo::RunConfig cfg = istomo::load_config(config_path);
    const double theta1 = istomo::contact_modulus(cfg.material);
    // The curve is taken at the protocol's grid center.
    const double rho = std::hypot(cfg.grid.center1 - cfg.inclusion.x0[0],
                                  cfg.grid.center2 - cfg.inclusion.x0[1]);
    const double m3 =
        istomo::m3_spherical(cfg.material, cfg.inclusion, rho / cfg.inclusion.d, cfg.g3);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write curve file: " + out_path);
    out << "w,contact_radius,force,stiffness_exact,stiffness_bulk,stiffness_asymptotic\n";
    for (int i = 0; i <= steps; ++i) {
        const double w = w_max * i / steps;
        istomo::ContactState st{0.0, 0.0, 0.0, 0.0};
        double s0 = 0.0, s_asym = 0.0;
        if (w > 0.0) {
            st = istomo::indentation_curve_exact(w, cfg.indenter, theta1, m3);
            const auto asym = istomo::stiffness_asymptotic(w, cfg.indenter, theta1, m3);
            s0 = asym.s0;
            s_asym = asym.s_eps;
        }
        out << istomo::g17(w) << ',' << istomo::g17(st.a) << ',' << istomo::g17(st.P) << ','
            << istomo::g17(st.S) << ',' << istomo::g17(s0) << ',' << istomo::g17(s_asym) << '\n';
    }
    std::cerr << "wrote " << steps + 1 << " samples to " << out_path << '\n';
    return 0;
}

int cmd_oracle_strain(double xi, double nu) {
    const istomo::Strain6 e = istomo::scaled_strain_vector(xi, nu);
    istomo::json j{{"xi", xi}, {"nu", nu}};
    j["epsilon_bar"] = {e[0], e[1], e[2], e[3], e[4], e[5]};
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_oracle_ksgs(double alpha, double nu, double nu0) {
    const istomo::KsGs c = istomo::spherical_ks_gs(alpha, nu, nu0);
    istomo::json j{{"alpha", alpha}, {"nu", nu}, {"nu0", nu0}, {"k_s", c.k_s}, {"g_s", c.g_s}};
    // Unit-scale (E = V_eps = 1) polarization matrix for inspection.
    j["polarization"] = istomo::to_json(istomo::polarization_from_ksgs(c, 1.0, 1.0));
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indentation stiffness tomography: forward maps and inverse fits"};
    app.require_subcommand(1);

    std::string config_path, in_path, out_path, fit_path;
    int multistart = 0;
    int steps = 100;
    double w_max = 0.0, xi = 0.0, nu = 0.0, nu0 = 0.5, alpha = 1.0;
    std::optional<double> known_volume, known_alpha;
    bool paper_flag = false;

    auto* gen = app.add_subcommand("generate", "Generate a synthetic stiffness map");
    gen->add_option("--config", config_path, "Run configuration JSON")->required();
    gen->add_option("--out", out_path, "Output CSV path")->required();

    auto* fit = app.add_subcommand("fit", "Fit the five-parameter anomaly model to a map");
    fit->add_option("--in", in_path, "Input map CSV")->required();
    fit->add_option("--out", out_path, "Output fit JSON")->required();
    fit->add_option("--multistart", multistart, "Extra restarts over anomaly candidates");

    auto* ext = app.add_subcommand("extract", "Extract inclusion parameters from a fit");
    ext->add_option("--fit", fit_path, "Fit JSON from the fit subcommand")->required();
    ext->add_option("--config", config_path, "Run configuration JSON")->required();
    ext->add_option("--known-volume", known_volume, "Known inclusion volume [m^3]");
    ext->add_option("--known-alpha", known_alpha, "Known moduli ratio E0/E");
    ext->add_flag("--paper-normalization", paper_flag,
                  "Use the paper-printed d^-4 normalization instead of the canonical one");

    auto* curve = app.add_subcommand("curve", "Dump exact and asymptotic force-indentation data");
    curve->add_option("--config", config_path, "Run configuration JSON")->required();
    curve->add_option("--w-max", w_max, "Maximum indentation depth [m]")->required();
    curve->add_option("--steps", steps, "Number of depth steps");
    curve->add_option("--out", out_path, "Output CSV path")->required();

    auto* oracle = app.add_subcommand("oracle", "Low-level model evaluations");
    oracle->require_subcommand(1);
    auto* o_strain = oracle->add_subcommand("strain", "Scaled Boussinesq strain 6-vector");
    o_strain->add_option("--xi", xi, "Lateral offset / depth")->required();
    o_strain->add_option("--nu", nu, "Bulk Poisson ratio")->required();
    auto* o_ksgs = oracle->add_subcommand("ksgs", "Spherical polarization coefficients");
    o_ksgs->add_option("--alpha", alpha, "Moduli ratio E0/E")->required();
    o_ksgs->add_option("--nu", nu, "Bulk Poisson ratio")->required();
    o_ksgs->add_option("--nu0", nu0, "Inclusion Poisson ratio")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (gen->parsed()) return cmd_generate(config_path, out_path);
        if (fit->parsed()) return cmd_fit(in_path, out_path, multistart);
        if (ext->parsed())
            return cmd_extract(fit_path, config_path, known_volume, known_alpha, paper_flag);
        if (curve->parsed()) return cmd_curve(config_path, w_max, steps, out_path);
        if (oracle->parsed()) {
            if (o_strain->parsed()) return cmd_oracle_strain(xi, nu);
            if (o_ksgs->parsed()) return cmd_oracle_ksgs(alpha, nu, nu0);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
