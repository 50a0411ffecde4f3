#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace warnfix {

// Resolved configuration. Precedence: CLI flags > environment (WARNFIX_*) >
// config file > defaults.
struct Config {
    std::string backend = "mock";  // http | mock | oracle
    int samples = 13;
    double temperature = 0.7;
    int max_iterations = 3;
    int quiescence_ms = 500;
    int deadline_ms = 30000;
    int jobs = 1;
    bool dry_run = false;
    std::string compile_db;  // directory holding compile_commands.json ("" = workspace)
    std::set<std::string> codes;
    std::string out_dir = "warnfix-out";
    std::string transcript;         // mock backend transcript file
    std::string record_transcript;  // tee requests/samples here
    unsigned long long seed = 0;
    std::vector<std::string> server_cmd;  // language server argv
    std::string http_url = "http://localhost:8080";
    std::string http_model = "default";
    std::string optimal_manifest;

    Config();
};

// `key = value` lines; '#' starts a comment. Keys mirror the CLI flags
// (backend, samples, temperature, max_iterations, quiescence_ms, deadline_ms,
// jobs, compile_db, codes, out_dir, server_cmd, http_url, http_model, seed).
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Environment overrides: WARNFIX_<UPPERCASED KEY>.
std::map<std::string, std::string> config_from_env();

// Applies key/value overrides onto cfg; unknown keys throw.
void apply_overrides(Config& cfg, const std::map<std::string, std::string>& kv);

std::set<std::string> parse_code_set(const std::string& csv);

}  // namespace warnfix
