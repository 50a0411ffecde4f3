// warnfix: scans a C++ workspace for implicit data-loss warnings, decides range
// checks by self-consistency voting, and repairs them with validated patches.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "warnfix/pipeline.hpp"
#include "warnfix/util.hpp"

using namespace warnfix;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string workspace = ".";
    std::string config_file;
    std::string backend;
    std::string compile_db;
    std::string codes_csv;
    std::string out_dir;
    std::string transcript;
    std::string record_transcript;
    std::string server_cmd;
    int samples = -1;
    double temperature = -1.0;
    int max_iterations = -1;
    int jobs = -1;
    int quiescence_ms = -1;
    long long seed = -1;
    bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("workspace", f.workspace, "workspace root")->required(false);
    cmd->add_option("--config", f.config_file, "config file (key = value lines)");
    cmd->add_option("--backend", f.backend, "model backend: http | mock | oracle");
    cmd->add_option("--samples", f.samples, "self-consistency sample count");
    cmd->add_option("--temperature", f.temperature, "sampling temperature");
    cmd->add_option("--max-iterations", f.max_iterations, "validation loop bound");
    cmd->add_option("--jobs", f.jobs, "concurrent files");
    cmd->add_option("--compile-db", f.compile_db, "directory with compile_commands.json");
    cmd->add_option("--codes", f.codes_csv, "comma-separated data-loss warning codes");
    cmd->add_option("--out", f.out_dir, "output directory for manifest/patches/report");
    cmd->add_option("--transcript", f.transcript, "mock backend transcript (JSON lines)");
    cmd->add_option("--record-transcript", f.record_transcript, "record gateway traffic here");
    cmd->add_option("--server-cmd", f.server_cmd, "language server command line");
    cmd->add_option("--quiescence-ms", f.quiescence_ms, "diagnostics quiescence window");
    cmd->add_option("--seed", f.seed, "seed recorded into the manifest environment");
    cmd->add_flag("--dry-run", f.dry_run, "emit patches without touching workspace files");
}

Config resolve_config(const CommonFlags& f) {
    Config cfg;
    if (!f.config_file.empty()) apply_overrides(cfg, parse_config_file(f.config_file));
    apply_overrides(cfg, config_from_env());
    std::map<std::string, std::string> cli;
    if (!f.backend.empty()) cli["backend"] = f.backend;
    if (f.samples >= 0) cli["samples"] = std::to_string(f.samples);
    if (f.temperature >= 0) cli["temperature"] = std::to_string(f.temperature);
    if (f.max_iterations >= 0) cli["max_iterations"] = std::to_string(f.max_iterations);
    if (f.jobs >= 0) cli["jobs"] = std::to_string(f.jobs);
    if (f.quiescence_ms >= 0) cli["quiescence_ms"] = std::to_string(f.quiescence_ms);
    if (!f.compile_db.empty()) cli["compile_db"] = f.compile_db;
    if (!f.codes_csv.empty()) cli["codes"] = f.codes_csv;
    if (!f.out_dir.empty()) cli["out_dir"] = f.out_dir;
    if (!f.transcript.empty()) cli["transcript"] = f.transcript;
    if (!f.server_cmd.empty()) cli["server_cmd"] = f.server_cmd;
    if (f.seed >= 0) cli["seed"] = std::to_string(f.seed);
    apply_overrides(cfg, cli);
    if (!f.record_transcript.empty()) cfg.record_transcript = f.record_transcript;
    cfg.dry_run = f.dry_run;
    return cfg;
}

int require_compile_db(const Config& cfg, const std::string& workspace) {
    if (!compile_db_present(workspace, cfg.compile_db)) {
        std::cerr << "error: no compile_commands.json under "
                  << (cfg.compile_db.empty() ? workspace : cfg.compile_db)
                  << " (point --compile-db at the build directory)\n";
        return 2;
    }
    return 0;
}

int cmd_scan(const CommonFlags& flags) {
    Config cfg = resolve_config(flags);
    std::string workspace = fs::absolute(flags.workspace).lexically_normal().string();
    if (int rc = require_compile_db(cfg, workspace)) return rc;

    auto session = start_session(cfg, workspace);
    std::vector<FixUnit> units = scan_units(*session, workspace_sources(workspace), cfg.codes);
    session->shutdown();

    std::cout << units_to_jsonl(units);
    int warnings = 0;
    for (const auto& u : units) warnings += static_cast<int>(u.warnings.size());
    std::cout << warnings << " data-loss warning(s) in " << units.size() << " unit(s)\n";
    return 0;
}

int cmd_fix(const CommonFlags& flags) {
    Config cfg = resolve_config(flags);
    std::string workspace = fs::absolute(flags.workspace).lexically_normal().string();
    if (int rc = require_compile_db(cfg, workspace)) return rc;

    FixRun run = run_fix(cfg, workspace);

    fs::path out_dir = cfg.out_dir;
    fs::create_directories(out_dir);
    write_file_atomic((out_dir / "manifest.jsonl").string(),
                      manifest_text(run.outcomes, run.report));
    std::string patches;
    for (const auto& o : run.outcomes) {
        for (const auto& p : o.patch_history) {
            patches += "# unit " + o.unit_id + " " + o.file + "\n";
            patches += to_diff_text(p);
        }
    }
    write_file_atomic((out_dir / "patches.diff").string(), patches);
    write_file_atomic((out_dir / "report.json").string(),
                      report_to_json(run.report).dump(2) + "\n");
    write_file_atomic((out_dir / "report.txt").string(), render_text(run.report));

    std::cout << render_text(run.report);
    return run.report.failed == 0 ? 0 : 1;
}

int cmd_report(const std::string& manifest_path, const std::string& optimal_path) {
    try {
        RunReport report = load_manifest(manifest_path);
        std::optional<int> optimal;
        if (!optimal_path.empty()) optimal = optimal_overhead_from_manifest(optimal_path);
        std::cout << render_text(report, optimal);
        std::cout << report_to_json(report, optimal).dump(2) << "\n";
        return 0;
    } catch (const ManifestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"automated repair of implicit data-loss compiler warnings"};
    app.require_subcommand(1);

    CommonFlags scan_flags;
    CLI::App* scan = app.add_subcommand("scan", "list data-loss warnings grouped into fix units");
    add_common(scan, scan_flags);

    CommonFlags fix_flags;
    CLI::App* fix = app.add_subcommand("fix", "repair the workspace's data-loss warnings");
    add_common(fix, fix_flags);

    std::string manifest_path, optimal_path;
    CLI::App* report = app.add_subcommand("report", "render a run manifest as a report");
    report->add_option("manifest", manifest_path, "manifest.jsonl from a fix run")->required();
    report->add_option("--optimal-manifest", optimal_path,
                       "human-optimal manifest for the gap comparison");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scan->parsed()) return cmd_scan(scan_flags);
        if (fix->parsed()) return cmd_fix(fix_flags);
        if (report->parsed()) return cmd_report(manifest_path, optimal_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
