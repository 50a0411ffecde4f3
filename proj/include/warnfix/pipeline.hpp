#pragma once

#include <memory>
#include <string>
#include <vector>

#include "warnfix/config.hpp"
#include "warnfix/lsp_client.hpp"
#include "warnfix/report.hpp"

namespace warnfix {

// Sibling warnfix-minilsp binary of the running executable, when present.
std::string default_minilsp_path();

// Sorted .cpp/.cc/.cxx source files directly under <workspace>/src (or the
// workspace root when there is no src/).
std::vector<std::string> workspace_sources(const std::string& workspace);

bool compile_db_present(const std::string& workspace, const std::string& compile_db_dir);

std::unique_ptr<lsp::LspSession> start_session(const Config& cfg, const std::string& workspace);

std::unique_ptr<ModelGateway> make_gateway(const Config& cfg);

// Opens every source, waits for diagnostics, classifies, and groups.
std::vector<FixUnit> scan_units(lsp::LspSession& session, const std::vector<std::string>& files,
                                const std::set<std::string>& codes);

struct FixRun {
    std::vector<ValidationOutcome> outcomes;
    RunReport report;
};

FixRun run_fix(const Config& cfg, const std::string& workspace);

}  // namespace warnfix
