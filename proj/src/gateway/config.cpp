#include "semaclaw/gateway/config.hpp"

#include <charconv>
#include <sstream>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/text.hpp"

extern char** environ;

namespace semaclaw::gateway {

namespace {

long long parse_int(const std::string& value, const std::string& where) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) fail(Errc::config, where + ": expected an integer, got '" + value + "'");
    return out;
}

bool parse_bool(const std::string& value, const std::string& where) {
    auto v = text::to_lower(value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(Errc::config, where + ": expected a boolean, got '" + value + "'");
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
        return v.substr(1, v.size() - 2);
    }
    return v;
}

void set_key(GatewayConfig& c, const std::string& section, const std::string& key, const std::string& value,
             const std::string& where) {
    auto seconds = [&] { return Duration(parse_int(value, where) * 1000); };
    if (section == "server") {
        if (key == "host") return void(c.host = value);
        if (key == "port") {
            auto p = parse_int(value, where);
            if (p < 0 || p > 65535) fail(Errc::config, where + ": port out of range");
            return void(c.port = static_cast<int>(p));
        }
        if (key == "token") return void(c.token = value);
    } else if (section == "runtime") {
        if (key == "context_limit") {
            auto l = parse_int(value, where);
            if (l < 16000) fail(Errc::config, where + ": context_limit must be at least 16000");
            return void(c.context_limit = static_cast<std::size_t>(l));
        }
        if (key == "idle_timeout_s") return void(c.idle_timeout = seconds());
        if (key == "max_steps") return void(c.max_steps = static_cast<int>(parse_int(value, where)));
    } else if (section == "model") {
        if (key == "adapter") return void(c.adapter = value);
        if (key == "name") return void(c.model_name = value);
        if (key == "api_key") return void(c.api_key = value);
        if (key.rfind("agent.", 0) == 0 && key.size() > 6) return void(c.agent_adapters[key.substr(6)] = value);
    } else if (section == "memory") {
        if (key == "embeddings") return void(c.embeddings = parse_bool(value, where));
        if (key == "stopwords") return void(c.stopwords = fs::path(value));
    } else if (section == "dispatch") {
        if (key == "state_file") return void(c.state_file = fs::path(value));
        if (key == "task_timeout_s") return void(c.task_timeout = seconds());
        if (key == "tool_subprocess") return void(c.tool_subprocess = parse_bool(value, where));
    } else if (section == "scheduler") {
        if (key == "interval_ms") return void(c.scheduler_interval = Duration(parse_int(value, where)));
    } else {
        fail(Errc::config, where + ": unknown section [" + section + "]");
    }
    fail(Errc::config, where + ": unknown key '" + key + "' in [" + section + "]");
}

}  // namespace

std::string GatewayConfig::adapter_for(const std::string& folder) const {
    auto it = agent_adapters.find(folder);
    return it != agent_adapters.end() ? it->second : adapter;
}

GatewayConfig parse_config(const std::string& text, GatewayConfig base, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto where = origin + ":" + std::to_string(lineno);
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(Errc::config, where + ": malformed section header");
            section = text::trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) fail(Errc::config, where + ": expected key = value");
        if (section.empty()) fail(Errc::config, where + ": key outside of a section");
        set_key(base, section, text::trim(t.substr(0, eq)), unquote(text::trim(t.substr(eq + 1))), where);
    }
    return base;
}

void apply_env_overrides(GatewayConfig& config, const std::map<std::string, std::string>& env) {
    static const std::vector<std::string> sections = {"server", "runtime", "model", "memory", "dispatch", "scheduler"};
    for (const auto& [name, value] : env) {
        if (name.rfind("SEMACLAW_", 0) != 0) continue;
        auto rest = text::to_lower(name.substr(9));
        for (const auto& s : sections) {
            if (rest.rfind(s + "_", 0) == 0) {
                set_key(config, s, rest.substr(s.size() + 1), value, "env " + name);
                break;
            }
        }
    }
}

GatewayConfig load_config(const fs::path& data_root, const std::optional<fs::path>& file) {
    GatewayConfig config;
    config.data_root = fs::absolute(data_root).lexically_normal();
    auto path = file.value_or(config.data_root / "semaclaw.conf");
    if (file || fs::exists(path)) {
        auto text = fsutil::try_read_file(path);
        if (!text) fail(Errc::config, "cannot read config file " + path.string());
        config = parse_config(*text, config, path.string());
    }
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        std::string kv(*e);
        auto eq = kv.find('=');
        if (eq != std::string::npos && kv.rfind("SEMACLAW_", 0) == 0) env[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    apply_env_overrides(config, env);
    return config;
}

}  // namespace semaclaw::gateway
