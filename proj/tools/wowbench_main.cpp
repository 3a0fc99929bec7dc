// wowbench: batch scoring, calibration, and reporting for world-model
// evaluation runs. Exit codes: 0 success, 1 input error, 2 internal error.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "wowbench/errors.hpp"
#include "wowbench/pipeline.hpp"
#include "wowbench/report.hpp"
#include "wowbench/version.hpp"

namespace {

struct SharedArgs {
    std::string registry;
    std::string input;
    std::string out;
    std::uint64_t seed = 0;
    int folds = 5;
    std::string format = "csv";
};

void add_shared_flags(CLI::App* cmd, SharedArgs& args, bool registry_required) {
    auto* registry = cmd->add_option("--registry", args.registry, "Registry config file");
    if (registry_required) registry->required();
    cmd->add_option("--input", args.input, "Input manifest JSON (paths resolve against it)");
    cmd->add_option("--out", args.out, "Output directory")->required();
    cmd->add_option("--seed", args.seed, "RNG seed recorded in every output");
    cmd->add_option("--folds", args.folds, "Cross-validation fold count K")
        ->check(CLI::Range(2, 1000));
    cmd->add_option("--format", args.format, "Report format: csv|markdown|json-lines");
}

wowbench::RunManifest build_manifest(const SharedArgs& args, bool input_required) {
    wowbench::RunManifest manifest;
    manifest.registry_path = args.registry;
    manifest.out_dir = args.out;
    manifest.seed = args.seed;
    manifest.folds = args.folds;
    manifest.format = wowbench::report_format_from_string(args.format);
    if (!args.input.empty()) {
        wowbench::load_manifest(manifest, args.input);
    } else if (input_required) {
        throw wowbench::InputError("missing --input manifest", "", "input");
    }
    return manifest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wowbench: deterministic scoring for embodied world-model evaluations"};
    app.set_version_flag("--version", std::string(wowbench::kVersion));
    app.require_subcommand(1);

    SharedArgs score_args, calibrate_args, traj_args, plan_args, consistency_args, report_args;

    auto* score = app.add_subcommand("score", "Score records and emit the leaderboard");
    add_shared_flags(score, score_args, true);
    auto* calibrate = app.add_subcommand("calibrate", "Freeze mapping parameters against ratings");
    add_shared_flags(calibrate, calibrate_args, true);
    auto* traj = app.add_subcommand("traj", "Trajectory similarity per sample");
    add_shared_flags(traj, traj_args, true);
    auto* plan = app.add_subcommand("plan", "Plan DAG scores per sample");
    add_shared_flags(plan, plan_args, true);
    auto* consistency = app.add_subcommand("consistency", "Regional temporal consistency per sample");
    add_shared_flags(consistency, consistency_args, true);
    auto* report = app.add_subcommand("report", "Render tables and plot series from a score run");
    add_shared_flags(report, report_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (score->parsed()) {
            wowbench::run_score(build_manifest(score_args, true), std::cerr);
        } else if (calibrate->parsed()) {
            wowbench::run_calibrate(build_manifest(calibrate_args, true), std::cerr);
        } else if (traj->parsed()) {
            wowbench::run_traj(build_manifest(traj_args, true), std::cerr);
        } else if (plan->parsed()) {
            wowbench::run_plan(build_manifest(plan_args, true), std::cerr);
        } else if (consistency->parsed()) {
            wowbench::run_consistency(build_manifest(consistency_args, true), std::cerr);
        } else if (report->parsed()) {
            if (report_args.input.empty()) {
                throw wowbench::InputError("report needs --input <scored output dir>", "", "input");
            }
            wowbench::run_report(report_args.input, report_args.out,
                                 wowbench::report_format_from_string(report_args.format), std::cerr);
        }
    } catch (const wowbench::InputError& e) {
        nlohmann::ordered_json err;
        err["error"] = e.what();
        err["file"] = e.file();
        err["key"] = e.key();
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
