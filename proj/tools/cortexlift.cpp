#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "cortexlift/analysis.hpp"
#include "cortexlift/config.hpp"
#include "cortexlift/image.hpp"
#include "cortexlift/lifting.hpp"
#include "cortexlift/stimuli.hpp"
#include "cortexlift/wilson_cowan.hpp"

namespace fs = std::filesystem;
using namespace cortexlift;

namespace {

struct RunArtifacts {
    Image output;
    EvolutionState state;
    double wall_seconds = 0;
};

RunArtifacts execute(const RunConfig& cfg) {
    const Image f0 = cfg.render_stimulus();
    RunArtifacts art;
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.model3d) {
        const CakeWaveletStack stack = build_cake_stack(f0.n, cfg.K, cfg.bw, cfg.taper);
        auto [out, st] = run_evolution(f0, stack, cfg.params, cfg.fast, cfg.degree);
        art.output = std::move(out);
        art.state = std::move(st);
    } else {
        auto [out, st] = run_evolution_2d(f0, cfg.params, cfg.fast, cfg.degree);
        art.output = std::move(out);
        art.state = std::move(st);
    }
    art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return art;
}

void write_run_artifacts(const RunConfig& cfg, const RunArtifacts& art) {
    fs::create_directories(cfg.out_dir);
    const std::string dir = cfg.out_dir + "/";
    save_image(cfg.render_stimulus(), dir + "stimulus.png");

    LiftedField raw(art.output.n, 1);
    raw.v = art.output.v;
    dump_field(raw, dir + "output.raw");
    save_image(art.output, dir + "output.png");
    save_image(art.output, dir + "output_rescaled.png", true);

    if (cfg.dump_energy) write_energy_csv(art.state, dir + "energy.csv");
    if (cfg.dump_lifted) dump_field(art.state.F, dir + "field.lf1");
    if (cfg.dump_profiles) {
        const int n = art.output.n;
        std::vector<Profile> profs = {line_profile(art.output, n / 2),
                                      line_profile(art.output, n / 8)};
        export_csv(profs, dir + "profiles.csv");
        export_svg(profs, dir + "profiles.svg");
    }
    if (cfg.dump_metrics) {
        std::ofstream mtx(dir + "metrics.txt");
        if (cfg.stimulus_type == "grating" && cfg.grating.bar_height > 0) {
            const InductionMetrics m = induction_metrics(art.output, cfg.grating);
            mtx << "amplitude=" << m.amplitude << "\nphase_corr=" << m.phase_corr << "\n";
        } else if (cfg.stimulus_type == "poggendorff" && !cfg.pogg.classic) {
            const OffsetReport r = perceived_offset(art.output, cfg.pogg);
            mtx << "propagated=" << (r.propagated ? 1 : 0) << "\noffset=" << r.offset
                << "\noscillation_amplitude=" << r.amplitude << "\n";
        }
    }
    std::ofstream mani(dir + "manifest.json");
    mani << manifest_json(cfg, art.state, art.wall_seconds).dump(2) << "\n";
    save_kv_text(cfg.to_kv(), dir + "config_resolved.txt");
}

int cmd_run(const RunConfig& cfg) {
    cfg.validate();
    const RunArtifacts art = execute(cfg);
    write_run_artifacts(cfg, art);
    if (!art.state.converged) {
        std::cerr << "run did not converge within " << cfg.params.max_iters << " iterations\n";
        return 3;
    }
    std::cout << "converged after " << art.state.iter << " iterations, output in "
              << cfg.out_dir << "\n";
    return 0;
}

WCParams gi_params() {
    WCParams p;
    p.alpha = 2.9;
    p.lambda = 0.5;
    p.sigma_mu = 10;
    p.sigma_omega = 5;
    p.sigma_theta = std::numbers::pi / 20;
    return p;
}

WCParams pogg_params() {
    WCParams p;
    p.alpha = 2.8;
    p.lambda = 0.5;
    p.sigma_mu = 3;
    p.sigma_omega = 10;
    p.sigma_theta = std::numbers::pi / 16;
    return p;
}

RunConfig gi_config(double orientation, bool model3d, const std::string& out) {
    RunConfig c;
    c.params = gi_params();
    c.model3d = model3d;
    c.grating.orientation = orientation;
    c.out_dir = out;
    return c;
}

RunConfig pogg_config(bool classic, bool model3d, const std::string& out) {
    RunConfig c;
    c.params = pogg_params();
    c.model3d = model3d;
    c.stimulus_type = "poggendorff";
    c.pogg.classic = classic;
    c.out_dir = out;
    return c;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

void write_summary(const std::string& path, const std::string& experiment,
                   const std::vector<std::pair<std::string, double>>& metrics,
                   const std::vector<Check>& checks) {
    std::ofstream out(path);
    out << "experiment=" << experiment << "\n";
    out.precision(10);
    for (const auto& [k, v] : metrics) out << k << "=" << v << "\n";
    bool all = true;
    for (const auto& c : checks) {
        out << "check " << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " (" << c.detail
            << ")\n";
        all = all && c.pass;
    }
    out << "result=" << (all ? "PASS" : "FAIL") << "\n";
}

int cmd_reproduce(const std::string& experiment, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::string summary = out_dir + "/summary.txt";
    bool all_converged = true;
    auto run_one = [&all_converged](const RunConfig& cfg) {
        cfg.validate();
        const RunArtifacts art = execute(cfg);
        write_run_artifacts(cfg, art);
        all_converged = all_converged && art.state.converged;
        return art;
    };
    char buf[256];

    if (experiment == "gi-pi2") {
        const RunConfig c3 = gi_config(std::numbers::pi / 2, true, out_dir + "/3d");
        const RunConfig c2 = gi_config(std::numbers::pi / 2, false, out_dir + "/2d");
        const RunArtifacts a3 = run_one(c3), a2 = run_one(c2);
        const InductionMetrics m3 = induction_metrics(a3.output, c3.grating);
        const InductionMetrics m2 = induction_metrics(a2.output, c2.grating);
        std::vector<Check> checks;
        std::snprintf(buf, sizeof buf, "phase_corr=%.3f, threshold -0.5", m3.phase_corr);
        checks.push_back({"counter_phase", m3.phase_corr <= -0.5, buf});
        std::snprintf(buf, sizeof buf, "amplitude_2d=%.4f vs 0.25*%.4f", m2.amplitude,
                      m3.amplitude);
        checks.push_back({"flat_2d_baseline", m2.amplitude < 0.25 * m3.amplitude, buf});
        write_summary(summary, experiment,
                      {{"amplitude_3d", m3.amplitude},
                       {"phase_corr_3d", m3.phase_corr},
                       {"amplitude_2d", m2.amplitude},
                       {"phase_corr_2d", m2.phase_corr}},
                      checks);
        return all_converged ? 0 : 3;
    }
    if (experiment == "gi-pi3") {
        const RunConfig c3 = gi_config(std::numbers::pi / 3, true, out_dir + "/3d");
        const RunConfig c2 = gi_config(std::numbers::pi / 3, false, out_dir + "/2d");
        const RunConfig cref = gi_config(std::numbers::pi / 2, true, out_dir + "/3d-pi2");
        const RunArtifacts a3 = run_one(c3), a2 = run_one(c2), aref = run_one(cref);
        const InductionMetrics m3 = induction_metrics(a3.output, c3.grating);
        const InductionMetrics m2 = induction_metrics(a2.output, c2.grating);
        const InductionMetrics mref = induction_metrics(aref.output, cref.grating);
        std::vector<Check> checks;
        std::snprintf(buf, sizeof buf, "phase_corr=%.3f, threshold -0.5", m3.phase_corr);
        checks.push_back({"counter_phase", m3.phase_corr <= -0.5, buf});
        std::snprintf(buf, sizeof buf, "amplitude pi/2 %.4f vs 1.2 * pi/3 %.4f", mref.amplitude,
                      m3.amplitude);
        checks.push_back({"orthogonal_maximal", mref.amplitude >= 1.2 * m3.amplitude, buf});
        write_summary(summary, experiment,
                      {{"amplitude_3d", m3.amplitude},
                       {"phase_corr_3d", m3.phase_corr},
                       {"amplitude_3d_pi2", mref.amplitude},
                       {"amplitude_2d", m2.amplitude}},
                      checks);
        return all_converged ? 0 : 3;
    }
    if (experiment == "poggendorff") {
        const RunConfig c3 = pogg_config(false, true, out_dir + "/3d");
        const RunConfig c2 = pogg_config(false, false, out_dir + "/2d");
        const RunArtifacts a3 = run_one(c3), a2 = run_one(c2);
        const OffsetReport r3 = perceived_offset(a3.output, c3.pogg);
        const OffsetReport r2 = perceived_offset(a2.output, c2.pogg);
        std::vector<Check> checks;
        std::snprintf(buf, sizeof buf, "offset=%.2f px, need |offset| >= 1 and positive",
                      r3.offset);
        checks.push_back({"misalignment", r3.propagated && r3.offset >= 1.0, buf});
        std::snprintf(buf, sizeof buf, "2d propagated=%d amplitude=%.4f vs 0.25*%.4f",
                      r2.propagated ? 1 : 0, r2.amplitude, r3.amplitude);
        checks.push_back({"no_2d_propagation",
                          !r2.propagated || r2.amplitude < 0.25 * r3.amplitude, buf});
        write_summary(summary, experiment,
                      {{"offset_3d", r3.offset},
                       {"oscillation_3d", r3.amplitude},
                       {"propagated_3d", r3.propagated ? 1.0 : 0.0},
                       {"oscillation_2d", r2.amplitude},
                       {"propagated_2d", r2.propagated ? 1.0 : 0.0}},
                      checks);
        return all_converged ? 0 : 3;
    }
    if (experiment == "poggendorff-classic") {
        const RunConfig c3 = pogg_config(true, true, out_dir + "/3d");
        const RunArtifacts a3 = run_one(c3);
        std::vector<Check> checks;
        checks.push_back({"converged", a3.state.converged, "full run"});
        write_summary(summary, experiment, {{"iterations", double(a3.state.iter)}}, checks);
        return all_converged ? 0 : 3;
    }
    std::cerr << "unknown experiment '" << experiment
              << "'; valid: gi-pi2 gi-pi3 poggendorff poggendorff-classic\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orientation-lifted contrast perception model"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "render a stimulus image");
    std::string gen_kind = "grating", gen_out = "stimulus.png";
    GratingSpec gspec;
    PoggendorffSpec pspec;
    int gen_classic = 0;
    gen->add_option("--stimulus", gen_kind, "grating | poggendorff");
    gen->add_option("--out", gen_out, "output image path (.png or .pgm)");
    gen->add_option("--n", gspec.n, "image size");
    gen->add_option("--period", gspec.period, "grating period, pixels");
    gen->add_option("--orientation", gspec.orientation, "grating orientation, radians");
    gen->add_option("--bar-height", gspec.bar_height, "bar height, pixels");
    gen->add_option("--bar-value", gspec.bar_value, "bar luminance");
    gen->add_option("--stripe-hi", gspec.stripe_hi, "bright stripe luminance");
    gen->add_option("--stripe-lo", gspec.stripe_lo, "dark stripe luminance");
    gen->add_option("--occluder-width", pspec.occluder_width, "occluder width, pixels");
    gen->add_option("--occluder-value", pspec.occluder_value, "occluder luminance");
    gen->add_option("--line-angle", pspec.line_angle, "line angle, radians");
    gen->add_option("--line-period", pspec.line_period, "line spacing, pixels");
    gen->add_option("--line-thickness", pspec.line_thickness, "line thickness, pixels");
    gen->add_flag("--classic", gen_classic, "single line instead of a line grating");

    // run
    auto* run = app.add_subcommand("run", "run the model from a config file");
    std::string run_config_path;
    run->add_option("--config", run_config_path, "key=value config file");
    std::string ov_model, ov_out;
    double ov_alpha = -1, ov_lambda = -1, ov_M = -1, ov_sigma_mu = -1, ov_sigma_omega = -1,
           ov_sigma_theta = -1, ov_dt = -1, ov_tau = -1;
    int ov_max_iters = -1, ov_K = -1, ov_bw = -1, ov_degree = -1;
    int flag_fast = 0, flag_direct = 0, flag_dump_lifted = 0;
    run->add_option("--model", ov_model, "3d | 2d");
    run->add_option("--out", ov_out, "output directory");
    run->add_option("--alpha", ov_alpha, "sigmoid slope");
    run->add_option("--lambda", ov_lambda, "fidelity weight");
    run->add_option("--M", ov_M, "interaction normalization, (0,1]");
    run->add_option("--sigma-mu", ov_sigma_mu, "local mean std, pixels");
    run->add_option("--sigma-omega", ov_sigma_omega, "interaction spatial std, pixels");
    run->add_option("--sigma-theta", ov_sigma_theta, "interaction angular std, radians");
    run->add_option("--dt", ov_dt, "time step");
    run->add_option("--tau", ov_tau, "relative-change stopping tolerance");
    run->add_option("--max-iters", ov_max_iters, "iteration cap");
    run->add_option("--K", ov_K, "orientation channels");
    run->add_option("--bw", ov_bw, "angular B-spline order");
    run->add_option("--degree", ov_degree, "polynomial degree of the fast path");
    run->add_flag("--fast", flag_fast, "use the polynomial interaction (default)");
    run->add_flag("--direct", flag_direct, "use the exact interaction sum");
    run->add_flag("--dump-lifted", flag_dump_lifted, "dump the final lifted field");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "run a bundled experiment end to end");
    std::string rep_experiment, rep_out = "reproduction";
    rep->add_option("--experiment", rep_experiment,
                    "gi-pi2 | gi-pi3 | poggendorff | poggendorff-classic");
    rep->add_option("--out", rep_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            Image img;
            std::string spec_text;
            if (gen_kind == "grating") {
                img = grating_induction(gspec);
                spec_text = gspec.to_kv();
            } else if (gen_kind == "poggendorff") {
                pspec.n = gspec.n;
                pspec.classic = gen_classic != 0;
                img = poggendorff(pspec);
                spec_text = pspec.to_kv();
            } else {
                std::cerr << "unknown stimulus '" << gen_kind << "'; valid: grating poggendorff\n";
                return 2;
            }
            save_image(img, gen_out);
            save_kv_text(spec_text, gen_out + ".spec");
            std::cout << "wrote " << gen_out << " and " << gen_out << ".spec\n";
            return 0;
        }
        if (run->parsed()) {
            RunConfig cfg;
            if (!run_config_path.empty()) cfg = RunConfig::from_kv(load_kv(run_config_path));
            if (!ov_model.empty()) {
                if (ov_model != "3d" && ov_model != "2d") {
                    std::cerr << "model must be 3d or 2d\n";
                    return 2;
                }
                cfg.model3d = ov_model == "3d";
            }
            if (!ov_out.empty()) cfg.out_dir = ov_out;
            if (ov_alpha >= 0) cfg.params.alpha = ov_alpha;
            if (ov_lambda >= 0) cfg.params.lambda = ov_lambda;
            if (ov_M >= 0) cfg.params.M = ov_M;
            if (ov_sigma_mu >= 0) cfg.params.sigma_mu = ov_sigma_mu;
            if (ov_sigma_omega >= 0) cfg.params.sigma_omega = ov_sigma_omega;
            if (ov_sigma_theta >= 0) cfg.params.sigma_theta = ov_sigma_theta;
            if (ov_dt >= 0) cfg.params.dt = ov_dt;
            if (ov_tau >= 0) cfg.params.tau = ov_tau;
            if (ov_max_iters >= 0) cfg.params.max_iters = ov_max_iters;
            if (ov_K >= 0) cfg.K = ov_K;
            if (ov_bw >= 0) cfg.bw = ov_bw;
            if (ov_degree >= 0) cfg.degree = ov_degree;
            if (flag_fast) cfg.fast = true;
            if (flag_direct) cfg.fast = false;
            if (flag_dump_lifted) cfg.dump_lifted = true;
            return cmd_run(cfg);
        }
        if (rep->parsed()) return cmd_reproduce(rep_experiment, rep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
