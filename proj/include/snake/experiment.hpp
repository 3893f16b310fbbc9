#pragma once

// Dispatches one experiment (evolve | certify | modal | capture) and writes its
// artifacts. Exit status: 0 success, 2 certificate or criterion failure,
// 1 error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "snake/config.hpp"
#include "snake/contour.hpp"
#include "snake/convexity.hpp"
#include "snake/dynamics.hpp"
#include "snake/potential.hpp"
#include "snake/render.hpp"
#include "snake/spectral.hpp"

namespace snake {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFailed = 2;

inline ScalarField build_field(const FieldConfig& f) {
    if (f.type != "pgm") return build_synthetic(f.synthetic);
    std::ifstream in(f.path, std::ios::binary);
    if (!in) throw ConfigError("cannot open image '" + f.path.string() + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ScalarField image = load_pgm(bytes, f.spacing);
    return f.mode == "edge" ? edge_potential(image, f.sigma) : image;
}

inline Contour build_contour(const ContourConfig& c) {
    Contour out;
    if (c.source == "circle") {
        out = make_circle(c.center, c.radius, c.count);
    } else if (c.source == "line") {
        if (c.count < 2) throw SizeError("line contour needs count >= 2");
        out = make_line(c.start, c.end, c.count);
    } else {
        std::ifstream in(c.path);
        if (!in) throw ConfigError("cannot open contour '" + c.path.string() + "'");
        out = read_contour_csv(in);
    }
    out.validate();
    return out;
}

namespace detail {

inline Vector uniform_velocity(int free_count, Vec2 v) {
    Vector out(2 * free_count);
    out.head(free_count).setConstant(v.x());
    out.tail(free_count).setConstant(v.y());
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write '" + p.string() + "'");
    return os;
}

inline double grid_step_for(const ExperimentConfig& cfg, const ScalarField& field) {
    return cfg.grid_step > 0.0 ? cfg.grid_step : default_grid_step(field);
}

inline int run_evolve(const ExperimentConfig& cfg, const ScalarField& field, const std::filesystem::path& dir) {
    const Contour c0 = build_contour(*cfg.contour);
    SnakeModel model(field, build_matrices(c0.size(), c0.topology, cfg.params), c0);
    const SystemMatrices sys = assemble_system(model.stiffness(), cfg.params);
    const Vector v0 = uniform_velocity(c0.free_count(), cfg.initial_velocity);

    EvolveResult result;
    try {
        result = evolve(model, sys, cfg.params, c0.free_coordinates(), v0, *cfg.stop, cfg.max_iter);
    } catch (const EvolutionError& e) {
        auto trace = open_out(dir / "trace.csv");
        write_trace_csv(trace, e.partial_trace());
        auto rep = open_out(dir / "evolve_report.txt");
        rep << "stop_reason=error\nerror=" << e.what() << '\n';
        throw;
    }
    {
        auto os = open_out(dir / "trace.csv");
        write_trace_csv(os, result.trace);
    }
    {
        auto os = open_out(dir / "final_contour.csv");
        write_contour_csv(os, result.contour);
    }
    const bool met = result.stop_reason == "criterion";
    {
        auto os = open_out(dir / "evolve_report.txt");
        const TraceRecord& last = result.trace.back();
        os << "stop_reason=" << result.stop_reason << '\n'
           << "criterion=" << (met ? "met" : "unmet") << '\n'
           << "stop_rule=" << to_string(cfg.stop->criterion) << '\n'
           << "epsilon=" << format_double(cfg.stop->epsilon) << '\n'
           << "iterations=" << last.iteration << '\n'
           << "E_p=" << format_double(last.E_p) << '\n'
           << "H=" << format_double(last.H) << '\n'
           << "equilibrium_residual="
           << format_double(equilibrium_residual(result.contour, field, model.stiffness())) << '\n';
        const ConditionDiagnostics cd = condition_diagnostics(sys, model.stiffness());
        os << "beta=" << format_double(sys.beta) << '\n'
           << "kappa_bound=" << format_double(cd.kappa_bound) << '\n'
           << "lambda_max_bound=" << format_double(cd.lambda_max_bound) << '\n';
    }
    if (cfg.render) {
        render_overlay(field, {{c0, "initial"}, {result.contour, "final"}}, dir / "overlay.svg");
        write_field_pgm(field, dir / "field.pgm");
    }
    return met ? kExitOk : kExitFailed;
}

inline int run_certify(const ExperimentConfig& cfg, const ScalarField& field, const std::filesystem::path& dir) {
    const ConvexityReport r = certify(field, *cfg.region, cfg.params.omega1, cfg.params.omega2,
                                      grid_step_for(cfg, field), cfg.diagnostic_N);
    {
        auto os = open_out(dir / "convexity_report.csv");
        write_report_csv(os, r);
    }
    {
        auto os = open_out(dir / "convexity_report.txt");
        write_report_text(os, r);
    }
    return r.holds ? kExitOk : kExitFailed;
}

inline int run_modal(const ExperimentConfig& cfg, const ScalarField& field, const std::filesystem::path& dir) {
    const Contour c = build_contour(*cfg.contour);
    const StiffnessSet s = build_matrices(c.size(), c.topology, cfg.params);
    const ModalSpectrum spec = modal_spectrum(hessian_Ep(c, field, s), s.M0, cfg.params.mu, cfg.params.gamma);
    const EquilibriumClassification cls = classify_equilibrium(spec);
    {
        auto os = open_out(dir / "modes.csv");
        write_modes_csv(os, spec);
    }
    {
        auto os = open_out(dir / "classification.txt");
        write_classification(os, cls, spec.rates.size());
        os << "equilibrium_residual=" << format_double(equilibrium_residual(c, field, s)) << '\n';
    }
    if (cfg.render) {
        render_overlay(field, {{c, "analysed"}}, dir / "overlay.svg");
        write_field_pgm(field, dir / "field.pgm");
    }
    return kExitOk;
}

inline int run_capture(const ExperimentConfig& cfg, const ScalarField& field, const std::filesystem::path& dir) {
    const Contour c0 = build_contour(*cfg.contour);
    SnakeModel model(field, build_matrices(c0.size(), c0.topology, cfg.params), c0);
    const Vector q0 = c0.free_coordinates();
    const Vector v0 = uniform_velocity(c0.free_count(), cfg.capture.velocity);
    const double step = grid_step_for(cfg, field);
    const ConvexityReport conv = certify(field, *cfg.region, cfg.params.omega1, cfg.params.omega2, step,
                                         cfg.diagnostic_N);
    const CaptureReport cap = capture_certificate(model, cfg.params, *cfg.region, q0, v0, step);

    bool criterion_ok = true;
    auto os = open_out(dir / "capture_report.txt");
    write_capture_report(os, cap);
    os << "region_certified=" << (conv.holds ? "true" : "false") << '\n'
       << "condition_value=" << format_double(conv.condition_value) << '\n';
    if (cfg.capture.verify) {
        const SystemMatrices sys = assemble_system(model.stiffness(), cfg.params);
        const CaptureVerification ver =
            verify_capture(model, sys, cfg.params, *cfg.region, q0, v0, *cfg.stop, cfg.max_iter);
        auto tr = open_out(dir / "verification_trace.csv");
        write_trace_csv(tr, ver.trace);
        os << "never_exited=" << (ver.never_exited ? "true" : "false") << '\n'
           << "exit_iteration=" << ver.exit_iteration << '\n'
           << "verify_stop_reason=" << ver.stop_reason << '\n';
        // A certified start that still leaves the region contradicts the certificate.
        if (cap.holds && !ver.never_exited) {
            criterion_ok = false;
            os << "criterion=unmet\n";
        }
        if (cfg.render && ver.final_q.size() > 0) {
            render_overlay(field, {{c0, "initial"}, {model.contour(ver.final_q), "final"}}, dir / "overlay.svg");
        }
    }
    if (cfg.render) write_field_pgm(field, dir / "field.pgm");
    return cap.holds && criterion_ok ? kExitOk : kExitFailed;
}

}  // namespace detail

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;
    bool render = false;
};

/// Runs one experiment. Library errors propagate; the CLI maps them to status 1.
inline int run(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
    const std::filesystem::path dir = opts.out_dir.value_or(cfg.output_dir);
    std::filesystem::create_directories(dir);
    ExperimentConfig c = cfg;
    c.render = cfg.render || opts.render;
    const ScalarField field = build_field(c.field);
    switch (c.kind) {
        case ExperimentKind::evolve: return detail::run_evolve(c, field, dir);
        case ExperimentKind::certify: return detail::run_certify(c, field, dir);
        case ExperimentKind::modal: return detail::run_modal(c, field, dir);
        case ExperimentKind::capture: return detail::run_capture(c, field, dir);
    }
    return kExitError;
}

}  // namespace snake
