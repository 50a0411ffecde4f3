#include "warnfix/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>

#include "warnfix/cst.hpp"
#include "warnfix/repair.hpp"
#include "warnfix/util.hpp"

namespace warnfix {

namespace fs = std::filesystem;

std::string default_minilsp_path() {
    char buf[4096];
    ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (n <= 0) return "warnfix-minilsp";
    buf[n] = '\0';
    fs::path sibling = fs::path(buf).parent_path() / "warnfix-minilsp";
    if (fs::exists(sibling)) return sibling.string();
    return "warnfix-minilsp";
}

std::vector<std::string> workspace_sources(const std::string& workspace) {
    std::vector<std::string> out;
    fs::path root(workspace);
    fs::path src = root / "src";
    if (!fs::is_directory(src)) src = root;
    if (!fs::is_directory(src)) return out;
    for (const auto& entry : fs::directory_iterator(src)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        if (ext == ".cpp" || ext == ".cc" || ext == ".cxx") {
            out.push_back(fs::absolute(entry.path()).lexically_normal().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool compile_db_present(const std::string& workspace, const std::string& compile_db_dir) {
    fs::path dir = compile_db_dir.empty() ? fs::path(workspace) : fs::path(compile_db_dir);
    return fs::exists(dir / "compile_commands.json");
}

std::unique_ptr<lsp::LspSession> start_session(const Config& cfg, const std::string& workspace) {
    std::vector<std::string> cmd = cfg.server_cmd;
    if (cmd.empty()) cmd = {default_minilsp_path()};

    lsp::LspSession::Options opts;
    opts.root_path = workspace;
    opts.quiescence_ms = cfg.quiescence_ms;
    opts.diagnostics_deadline_ms = cfg.deadline_ms;
    opts.request_timeout_ms = cfg.deadline_ms;

    auto transport = std::make_unique<lsp::ChildProcessTransport>(cmd, workspace);
    auto session = std::make_unique<lsp::LspSession>(std::move(transport), opts);
    session->initialize();
    return session;
}

std::unique_ptr<ModelGateway> make_gateway(const Config& cfg) {
    std::unique_ptr<ModelGateway> gateway;
    if (cfg.backend == "oracle") {
        gateway = std::make_unique<OracleBackend>(TypeTable::lp64());
    } else if (cfg.backend == "mock") {
        if (cfg.transcript.empty()) {
            throw GatewayError("mock backend needs --transcript (or transcript= in config)");
        }
        gateway = std::make_unique<MockBackend>(MockBackend::from_transcript_file(cfg.transcript));
    } else if (cfg.backend == "http") {
        HttpBackend::Options opts;
        opts.base_url = cfg.http_url;
        opts.model = cfg.http_model;
        gateway = std::make_unique<HttpBackend>(opts);
    } else {
        throw GatewayError("unknown backend: " + cfg.backend);
    }
    return gateway;
}

std::vector<FixUnit> scan_units(lsp::LspSession& session, const std::vector<std::string>& files,
                                const std::set<std::string>& codes) {
    for (const std::string& file : files) {
        session.open_document(file, read_file(file));
    }
    std::vector<Diagnostic> dataloss;
    std::map<std::string, std::vector<LineSpan>> spans;
    for (const std::string& file : files) {
        std::vector<Diagnostic> diags = session.fresh_diagnostics(file);
        for (const Diagnostic& d : diags) {
            if (classify(d, codes).variant == WarningVariant::ImplicitDataLoss) {
                dataloss.push_back(d);
            }
        }
        spans[file] = cst::top_level_function_spans(session.document_text(file));
    }
    return group_into_units(dataloss, spans);
}

FixRun run_fix(const Config& cfg, const std::string& workspace) {
    auto session = start_session(cfg, workspace);
    auto gateway = make_gateway(cfg);
    std::unique_ptr<RecordingGateway> recorder;
    ModelGateway* active = gateway.get();
    if (!cfg.record_transcript.empty()) {
        recorder = std::make_unique<RecordingGateway>(*gateway, cfg.record_transcript);
        active = recorder.get();
    }

    std::vector<std::string> files = workspace_sources(workspace);
    std::vector<FixUnit> units = scan_units(*session, files, cfg.codes);

    RepairConfig rc;
    rc.max_iterations = cfg.max_iterations;
    rc.sample_count = cfg.samples;
    rc.temperature = cfg.temperature;
    rc.quiescence_ms = cfg.quiescence_ms;
    rc.diagnostics_deadline_ms = cfg.deadline_ms;
    rc.dry_run = cfg.dry_run;
    rc.dataloss_codes = cfg.codes;
    rc.workspace = workspace;

    FixRun run;
    run.outcomes = repair_all(units, *session, *active, rc, cfg.jobs);
    run.report = report_from_outcomes(run.outcomes);
    session->shutdown();
    return run;
}

}  // namespace warnfix
