#include "warnfix/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "warnfix/diagnostics.hpp"
#include "warnfix/util.hpp"

namespace warnfix {

Config::Config() : codes(default_dataloss_codes()) {}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::map<std::string, std::string> out;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line is not key = value: " + line);
        }
        out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

namespace {

const char* kKeys[] = {"backend",     "samples",     "temperature", "max_iterations",
                       "quiescence_ms", "deadline_ms", "jobs",        "compile_db",
                       "codes",       "out_dir",     "server_cmd",  "http_url",
                       "http_model",  "seed",        "transcript",  "optimal_manifest"};

std::string to_env_name(const std::string& key) {
    std::string out = "WARNFIX_";
    for (char c : key) out.push_back(static_cast<char>(std::toupper(c)));
    return out;
}

}  // namespace

std::map<std::string, std::string> config_from_env() {
    std::map<std::string, std::string> out;
    for (const char* key : kKeys) {
        if (const char* v = std::getenv(to_env_name(key).c_str()); v && *v) out[key] = v;
    }
    return out;
}

std::set<std::string> parse_code_set(const std::string& csv) {
    std::set<std::string> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.insert(t);
    }
    return out;
}

void apply_overrides(Config& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "backend") cfg.backend = value;
        else if (key == "samples") cfg.samples = std::stoi(value);
        else if (key == "temperature") cfg.temperature = std::stod(value);
        else if (key == "max_iterations") cfg.max_iterations = std::stoi(value);
        else if (key == "quiescence_ms") cfg.quiescence_ms = std::stoi(value);
        else if (key == "deadline_ms") cfg.deadline_ms = std::stoi(value);
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else if (key == "compile_db") cfg.compile_db = value;
        else if (key == "codes") cfg.codes = parse_code_set(value);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "transcript") cfg.transcript = value;
        else if (key == "optimal_manifest") cfg.optimal_manifest = value;
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "http_url") cfg.http_url = value;
        else if (key == "http_model") cfg.http_model = value;
        else if (key == "server_cmd") {
            cfg.server_cmd.clear();
            std::istringstream ss(value);
            std::string word;
            while (ss >> word) cfg.server_cmd.push_back(word);
        } else {
            throw std::runtime_error("unknown config key: " + key);
        }
    }
}

}  // namespace warnfix
