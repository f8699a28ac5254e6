// Command-line front end for the tactile pattern library. Talks to the
// shared library strictly through the C interface.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <tactag/tactag.h>

namespace {

int status_rc(tactag_status s) {
    switch (s) {
        case TACTAG_OK:
            return 0;
        case TACTAG_INVALID_ARGUMENT:
            return 1;
        case TACTAG_IO_ERROR:
        case TACTAG_DATA_ERROR:
            return 2;
        case TACTAG_NUMERIC_ERROR:
            return 3;
    }
    return 3;
}

int report_failure(tactag_status s) {
    std::fprintf(stderr, "error: %s\n", tactag_last_error());
    return status_rc(s);
}

using LibraryHandle = std::unique_ptr<tactag_library, decltype(&tactag_library_free)>;

struct StringHandle {
    char* s = nullptr;
    ~StringHandle() { tactag_string_free(s); }
};

bool emit_report(const char* json, const std::string& path) {
    if (path.empty() || !json) return true;
    std::ofstream f(path);
    f << json << "\n";
    if (!f) {
        std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tactile pattern library: generation, classification, pose refinement"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string library_dir;
    std::uint64_t seed = 0;
    double pitch = 0.0;
    bool quiet = false;
    bool no_verify = false;
    app.add_option("--library", library_dir, "Pattern library directory");
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_option("--pitch", pitch, "Pixel pitch override for mask files, mm");
    app.add_flag("--quiet", quiet, "Suppress informational output");
    app.add_flag("--no-verify", no_verify, "Skip integrity checks when loading the library");

    tactag_generate_params gen_params;
    tactag_generate_params_init(&gen_params);
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Generate a pattern library");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--count", gen_params.count, "Patterns to generate")->capture_default_str();
    gen->add_option("--divisions", gen_params.divisions, "Grid divisions")->capture_default_str();
    gen->add_option("--alpha", gen_params.alpha, "Hu dispersion threshold")->capture_default_str();
    gen->add_option("--n-min", gen_params.n_min, "Min triangles per pattern")->capture_default_str();
    gen->add_option("--n-max", gen_params.n_max, "Max triangles per pattern")->capture_default_str();
    gen->add_option("--scale", gen_params.scale_mm, "Pattern size, mm")->capture_default_str();
    gen->add_option("--max-attempts", gen_params.max_attempts,
                    "Candidate budget, 0 = 200 per pattern");

    std::string exp_label, exp_stl, exp_ply;
    auto* exp = app.add_subcommand("export", "Export one entry's mesh or cloud");
    exp->add_option("--label", exp_label, "Entry label")->required();
    exp->add_option("--stl", exp_stl, "Prism mesh output (binary STL)");
    exp->add_option("--cloud,--ply", exp_ply, "Registration cloud output (ASCII PLY)");

    std::string cls_mask;
    bool cls_json = false;
    auto* cls = app.add_subcommand("classify", "Classify an imprint mask");
    cls->add_option("--imprint,--mask", cls_mask, "Imprint mask (PGM/PBM)")->required();
    cls->add_flag("--json", cls_json, "Print the result as JSON");

    std::string ref_label, ref_cloud, ref_mask;
    tactag_refine_params ref_params;
    tactag_refine_params_init(&ref_params);
    bool ref_icp = false;
    auto* ref = app.add_subcommand("refine", "Refine pose from an imprint cloud");
    ref->add_option("--label", ref_label, "Entry label")->required();
    ref->add_option("--imprint-cloud,--cloud", ref_cloud, "Imprint cloud (ASCII PLY)")->required();
    ref->add_option("--imprint-mask,--mask", ref_mask, "Imprint mask for initial alignment")
        ->required();
    ref->add_option("--max-iters", ref_params.max_iterations, "EM iteration cap")
        ->capture_default_str();
    ref->add_flag("--icp", ref_icp, "Nearest-neighbor baseline instead of EM");

    tactag_sensor sensor;
    tactag_sensor_init(&sensor);
    auto add_sensor_options = [&sensor](CLI::App* cmd) {
        cmd->add_option("--window", sensor.width_mm, "Sensor window side, mm")
            ->capture_default_str();
        cmd->add_option("--noise,--noise-sigma", sensor.depth_noise_sigma_mm,
                        "Depth noise sigma, mm")
            ->capture_default_str();
        cmd->add_option("--dropout", sensor.dropout_fraction, "Pixel dropout fraction")
            ->capture_default_str();
    };

    std::string sim_label, sim_mask_out, sim_cloud_out;
    double sim_x = 0.0, sim_y = 0.0, sim_theta = 0.0;
    auto* sim = app.add_subcommand("simulate", "Render a perturbed imprint of an entry");
    sim->add_option("--label", sim_label, "Entry label")->required();
    sim->add_option("--x", sim_x, "X offset, mm")->capture_default_str();
    sim->add_option("--y", sim_y, "Y offset, mm")->capture_default_str();
    sim->add_option("--theta", sim_theta, "Z rotation, deg")->capture_default_str();
    sim->add_option("--mask-out", sim_mask_out, "Mask output (PGM)");
    sim->add_option("--cloud-out", sim_cloud_out, "Cloud output (PLY)");
    add_sensor_options(sim);

    auto* eval = app.add_subcommand("evaluate", "Run an evaluation harness");
    eval->require_subcommand(1);
    std::string report_path;

    int ec_patterns = 30, ec_trials = 1;
    auto* ec = eval->add_subcommand("classification", "Classify simulated imprints");
    ec->add_option("--patterns", ec_patterns, "Entries to draw")->capture_default_str();
    ec->add_option("--trials-per", ec_trials, "Imprints per entry")->capture_default_str();
    ec->add_option("--report", report_path, "Write the JSON report here");
    add_sensor_options(ec);

    std::string er_label;
    std::vector<double> er_offsets;
    auto* er = eval->add_subcommand("refinement", "Recover pure Y offsets");
    er->add_option("--label", er_label, "Entry label")->required();
    er->add_option("--offsets", er_offsets, "Y offsets to test, mm")->required();
    er->add_option("--report", report_path, "Write the JSON report here");
    add_sensor_options(er);

    std::string ei_label;
    double ei_peg = 30.2, ei_hole = 31.6;
    int ei_trials = 20;
    bool ei_without = false;
    auto* ei = eval->add_subcommand("insertion", "Monte Carlo peg-in-hole insertion");
    ei->add_option("--label", ei_label, "Entry label")->required();
    ei->add_option("--peg", ei_peg, "Peg side, mm")->capture_default_str();
    ei->add_option("--hole", ei_hole, "Hole side, mm")->capture_default_str();
    ei->add_option("--trials", ei_trials, "Trial count")->capture_default_str();
    ei->add_flag("--no-refine,--without-refinement", ei_without, "Score the raw grasp offset");
    ei->add_option("--report", report_path, "Write the JSON report here");
    add_sensor_options(ei);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (*gen) {
        gen_params.seed = seed;
        tactag_library* lib = nullptr;
        tactag_status s = tactag_library_generate(&gen_params, &lib);
        if (s != TACTAG_OK) return report_failure(s);
        LibraryHandle handle(lib, tactag_library_free);
        s = tactag_library_save(lib, gen_out.c_str());
        if (s != TACTAG_OK) return report_failure(s);
        double dispersion = 0.0;
        tactag_library_dispersion(lib, &dispersion);
        if (!quiet)
            std::printf("generated %d patterns (dispersion %.4f) -> %s\n",
                        tactag_library_size(lib), dispersion, gen_out.c_str());
        return 0;
    }

    if (library_dir.empty()) {
        std::fprintf(stderr, "error: this command needs --library\n");
        return 1;
    }
    tactag_library* raw = nullptr;
    tactag_status s = tactag_library_load(library_dir.c_str(), no_verify ? 0 : 1, &raw);
    if (s != TACTAG_OK) return report_failure(s);
    LibraryHandle lib(raw, tactag_library_free);

    if (*exp) {
        if (exp_stl.empty() && exp_ply.empty()) {
            std::fprintf(stderr, "error: export needs --stl and/or --ply\n");
            return 1;
        }
        s = tactag_export_entry(lib.get(), exp_label.c_str(),
                                exp_stl.empty() ? nullptr : exp_stl.c_str(),
                                exp_ply.empty() ? nullptr : exp_ply.c_str());
        if (s != TACTAG_OK) return report_failure(s);
        if (!quiet) std::printf("exported %s\n", exp_label.c_str());
        return 0;
    }

    if (*cls) {
        tactag_classification result;
        s = tactag_classify_file(lib.get(), cls_mask.c_str(), pitch, &result);
        if (s != TACTAG_OK) return report_failure(s);
        if (cls_json)
            std::printf("{\"label\": \"%s\", \"index\": %d, \"loss\": %.6f, "
                        "\"margin\": %.6f, \"elapsed_ms\": %.3f}\n",
                        result.label, result.index, result.loss, result.runner_up_margin,
                        result.elapsed_ms);
        else
            std::printf("label=%s index=%d loss=%.6f margin=%.6f time=%.3fms\n", result.label,
                        result.index, result.loss, result.runner_up_margin, result.elapsed_ms);
        return 0;
    }

    if (*ref) {
        ref_params.use_icp = ref_icp ? 1 : 0;
        tactag_refinement result;
        s = tactag_refine_files(lib.get(), ref_label.c_str(), ref_cloud.c_str(),
                                ref_mask.c_str(), pitch, &ref_params, &result);
        if (s != TACTAG_OK) return report_failure(s);
        std::printf("y_ref=%.4fmm theta_z=%.4fdeg tx=%.4fmm rmse=%.4fmm converged=%d\n",
                    result.y_ref_mm, result.theta_z_deg, result.tx_mm, result.residual_rmse_mm,
                    result.converged);
        return 0;
    }

    if (*sim) {
        if (sim_mask_out.empty() && sim_cloud_out.empty()) {
            std::fprintf(stderr, "error: simulate needs --mask-out and/or --cloud-out\n");
            return 1;
        }
        s = tactag_simulate(lib.get(), sim_label.c_str(), sim_x, sim_y, sim_theta, &sensor,
                            seed, sim_mask_out.empty() ? nullptr : sim_mask_out.c_str(),
                            sim_cloud_out.empty() ? nullptr : sim_cloud_out.c_str());
        if (s != TACTAG_OK) return report_failure(s);
        if (!quiet) std::printf("simulated %s\n", sim_label.c_str());
        return 0;
    }

    if (*ec) {
        int correct = 0, total = 0;
        double mean_ms = 0.0;
        StringHandle report;
        s = tactag_eval_classification(lib.get(), ec_patterns, ec_trials, &sensor, seed,
                                       &correct, &total, &mean_ms,
                                       report_path.empty() ? nullptr : &report.s);
        if (s != TACTAG_OK) return report_failure(s);
        if (!emit_report(report.s, report_path)) return 2;
        std::printf("classification: %d/%d correct, mean %.2f ms\n", correct, total, mean_ms);
        return 0;
    }

    if (*er) {
        double max_abs = 0.0, max_pct = 0.0;
        StringHandle report;
        s = tactag_eval_refinement(lib.get(), er_label.c_str(), er_offsets.data(),
                                   static_cast<int>(er_offsets.size()), &sensor, seed, &max_abs,
                                   &max_pct, report_path.empty() ? nullptr : &report.s);
        if (s != TACTAG_OK) return report_failure(s);
        if (!emit_report(report.s, report_path)) return 2;
        std::printf("refinement: max |error| %.3f mm, max %.1f%%\n", max_abs, max_pct);
        return 0;
    }

    if (*ei) {
        double rate = 0.0;
        StringHandle report;
        s = tactag_eval_insertion(lib.get(), ei_label.c_str(), ei_peg, ei_hole, ei_trials,
                                  ei_without ? 0 : 1, &sensor, seed, &rate,
                                  report_path.empty() ? nullptr : &report.s);
        if (s != TACTAG_OK) return report_failure(s);
        if (!emit_report(report.s, report_path)) return 2;
        std::printf("insertion: %.0f%% success over %d trials (%s refinement)\n", rate * 100.0,
                    ei_trials, ei_without ? "without" : "with");
        return 0;
    }

    return 1;
}
