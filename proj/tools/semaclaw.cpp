#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/text.hpp"
#include "semaclaw/context/registry.hpp"
#include "semaclaw/dispatch/dispatch_tools.hpp"
#include "semaclaw/extend/hooks.hpp"
#include "semaclaw/extend/skills.hpp"
#include "semaclaw/gateway/client.hpp"
#include "semaclaw/gateway/config.hpp"
#include "semaclaw/gateway/daemon.hpp"
#include "semaclaw/gateway/services.hpp"
#include "semaclaw/gateway/wire.hpp"
#include "semaclaw/permbridge/bridge.hpp"
#include "semaclaw/schedtask/job.hpp"
#include "semaclaw/wiki/wiki_store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace semaclaw;

namespace {

struct Globals {
    std::string data_root;
    std::string config_file;
    bool as_json = false;
};

fs::path default_data_root() {
    if (const char* env = std::getenv("SEMACLAW_DATA_ROOT"); env && *env) return env;
    if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".semaclaw";
    return ".semaclaw";
}

gateway::GatewayConfig config_of(const Globals& g) {
    std::optional<fs::path> file;
    if (!g.config_file.empty()) file = g.config_file;
    return gateway::load_config(g.data_root.empty() ? default_data_root() : fs::path(g.data_root), file);
}

fs::path self_executable() {
    std::error_code ec;
    auto p = fs::read_symlink("/proc/self/exe", ec);
    return ec ? fs::path("semaclaw") : p;
}

std::vector<std::string> split_tags(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        auto part = text::trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!part.empty()) out.push_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void print_tree(const json& node, int depth) {
    for (const auto& c : node.value("children", json::array())) {
        std::cout << std::string(depth * 2, ' ') << c["name"].get<std::string>();
        if (c["type"] == "category") {
            std::cout << "/\n";
            print_tree(c, depth + 1);
        } else {
            auto tags = c.value("tags", std::vector<std::string>{});
            if (!tags.empty()) {
                std::cout << "  [";
                for (std::size_t i = 0; i < tags.size(); ++i) std::cout << (i ? ", " : "") << tags[i];
                std::cout << "]";
            }
            std::cout << "\n";
        }
    }
}

int serve(const gateway::GatewayConfig& config, const std::string& host, int port) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    auto cfg = config;
    if (!host.empty()) cfg.host = host;
    if (port >= 0) cfg.port = port;
    SystemClock clock;
    gateway::Daemon daemon(cfg, clock, self_executable());
    int bound = daemon.start();
    const auto& rec = daemon.recovery();
    if (!rec.empty()) {
        std::cerr << "recovered " << rec.tasks.size() << " interrupted task(s) in " << rec.groups.size()
                  << " group(s)\n";
    }
    std::cout << "semaclaw listening on " << cfg.host << ":" << bound << std::endl;
    int sig = 0;
    sigwait(&set, &sig);
    std::cerr << "shutting down\n";
    daemon.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semaclaw: agent harness runtime"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--data-root", g.data_root, "data directory (default $SEMACLAW_DATA_ROOT or ~/.semaclaw)");
    app.add_option("--config", g.config_file, "config file (default <data-root>/semaclaw.conf)");
    app.add_flag("--json", g.as_json, "machine-readable output");

    std::function<int()> action;

    // agent
    auto* agent = app.add_subcommand("agent", "manage agent identities");
    agent->require_subcommand(1);
    std::string a_folder, a_name, a_channel = "cli", a_workspace;
    auto* agent_add = agent->add_subcommand("add", "register an agent");
    agent_add->add_option("folder", a_folder, "agent folder id")->required();
    agent_add->add_option("--name", a_name, "display name");
    agent_add->add_option("--channel", a_channel, "channel");
    agent_add->add_option("--workspace", a_workspace, "default workspace");
    agent_add->callback([&] {
        action = [&] {
            auto config = config_of(g);
            context::AgentRegistry reg(config.data_root);
            context::AgentIdentity id;
            id.folder = a_folder;
            id.name = a_name.empty() ? a_folder : a_name;
            id.channel = a_channel;
            if (!a_workspace.empty()) id.default_workspace = fs::absolute(a_workspace);
            auto added = reg.add(id);
            if (g.as_json) {
                std::cout << gateway::to_json(added).dump() << "\n";
            } else {
                std::cout << added.folder << " " << added.data_dir.string() << "\n";
            }
            return 0;
        };
    });
    auto* agent_list = agent->add_subcommand("list", "list agents");
    agent_list->callback([&] {
        action = [&] {
            auto config = config_of(g);
            context::AgentRegistry reg(config.data_root);
            json out = json::array();
            for (const auto& a : reg.all()) {
                out.push_back(gateway::to_json(a));
                if (!g.as_json) std::cout << a.folder << "\t" << a.name << "\t" << a.channel << "\n";
            }
            if (g.as_json) std::cout << out.dump() << "\n";
            return 0;
        };
    });

    // turn
    std::string t_agent, t_text;
    bool t_local = false;
    auto* turn = app.add_subcommand("turn", "run one conversational turn");
    turn->add_option("agent", t_agent, "agent folder")->required();
    turn->add_option("text", t_text, "user message")->required();
    turn->add_flag("--local", t_local, "run in this process instead of the daemon");
    turn->callback([&] {
        action = [&] {
            auto config = config_of(g);
            json result;
            if (t_local) {
                SystemClock clock;
                gateway::Services svc(config, clock, self_executable());
                auto session = svc.primary_session(t_agent);
                result = gateway::to_json(svc.runtime().submit_turn(session, t_text), session);
            } else {
                result = gateway::Client::for_data_root(config).post("/sessions/" + t_agent + "/turns",
                                                                    {{"text", t_text}});
            }
            if (g.as_json) {
                std::cout << result.dump() << "\n";
            } else if (result.value("ok", false)) {
                std::cout << result.value("reply", "") << "\n";
            }
            if (!result.value("ok", false)) {
                std::cerr << "turn failed: " << result.value("error", "") << "\n";
                return 1;
            }
            return 0;
        };
    });

    // approvals
    auto* approvals = app.add_subcommand("approvals", "list and resolve pending requests");
    approvals->require_subcommand(1);
    std::string ap_id, ap_text, ap_args;
    auto resolve_with = [&](permbridge::Decision d) {
        auto config = config_of(g);
        gateway::Client::for_data_root(config).post("/approvals/" + ap_id + "/resolve", permbridge::to_json(d));
        std::cout << "resolved " << ap_id << "\n";
        return 0;
    };
    approvals->add_subcommand("list", "pending requests")->callback([&] {
        action = [&] {
            auto pending = gateway::Client::for_data_root(config_of(g)).get("/approvals");
            if (g.as_json) {
                std::cout << pending.dump() << "\n";
                return 0;
            }
            for (const auto& r : pending) {
                std::cout << r.value("request_id", "") << "\t" << r.value("agent", "") << "\t"
                          << r.value("kind", "") << "\t";
                if (r.value("kind", "") == "user_question") {
                    std::cout << r.value("question", "");
                } else {
                    std::cout << r.value("tool", "") << " " << r.value("args", json::object()).dump();
                }
                std::cout << "\n";
            }
            return 0;
        };
    });
    auto* ap_approve = approvals->add_subcommand("approve", "allow the tool call");
    ap_approve->add_option("id", ap_id)->required();
    ap_approve->callback([&] { action = [&] { return resolve_with(permbridge::Decision::approve()); }; });
    auto* ap_deny = approvals->add_subcommand("deny", "refuse the tool call");
    ap_deny->add_option("id", ap_id)->required();
    ap_deny->add_option("--reason", ap_text);
    ap_deny->callback([&] { action = [&] { return resolve_with(permbridge::Decision::deny(ap_text)); }; });
    auto* ap_modify = approvals->add_subcommand("modify", "allow with replaced arguments");
    ap_modify->add_option("id", ap_id)->required();
    ap_modify->add_option("--args", ap_args, "JSON object")->required();
    ap_modify->callback([&] {
        action = [&] {
            json args;
            try {
                args = json::parse(ap_args);
            } catch (const json::exception& e) {
                fail(Errc::argument, std::string("--args is not JSON: ") + e.what());
            }
            return resolve_with(permbridge::Decision::modify(args));
        };
    });
    auto* ap_answer = approvals->add_subcommand("answer", "answer a question");
    ap_answer->add_option("id", ap_id)->required();
    ap_answer->add_option("text", ap_text)->required();
    ap_answer->callback([&] { action = [&] { return resolve_with(permbridge::Decision::answer(ap_text)); }; });

    // wiki
    auto* wiki_cmd = app.add_subcommand("wiki", "agent wiki");
    wiki_cmd->require_subcommand(1);
    std::string w_agent, w_title, w_body, w_body_file, w_tags, w_category, w_source, w_query, w_path;
    int w_k = 10;
    SystemClock wiki_clock;
    auto wiki_store = [&]() -> wiki::WikiStore& {
        static std::optional<gateway::GatewayConfig> config;
        static std::unique_ptr<context::AgentRegistry> reg;
        static std::unique_ptr<wiki::WikiHub> hub;
        config = config_of(g);
        reg = std::make_unique<context::AgentRegistry>(config->data_root);
        std::shared_ptr<const text::StopwordList> stop =
            config->stopwords ? std::make_shared<const text::StopwordList>(text::StopwordList::from_file(*config->stopwords))
                              : std::make_shared<const text::StopwordList>();
        hub = std::make_unique<wiki::WikiHub>(*reg, stop, wiki_clock);
        return hub->store_for(w_agent);
    };
    auto* w_tree = wiki_cmd->add_subcommand("tree", "show categories and entries");
    w_tree->add_option("agent", w_agent)->required();
    w_tree->callback([&] {
        action = [&] {
            auto tree = wiki::to_json(wiki_store().inspect_tree());
            if (g.as_json) {
                std::cout << tree.dump() << "\n";
            } else {
                print_tree(tree, 0);
            }
            return 0;
        };
    });
    auto* w_save = wiki_cmd->add_subcommand("save", "save an entry (inbox/ without a category)");
    w_save->add_option("agent", w_agent)->required();
    w_save->add_option("--title", w_title)->required();
    auto* body_opt = w_save->add_option("--body", w_body);
    w_save->add_option("--body-file", w_body_file)->excludes(body_opt);
    w_save->add_option("--tags", w_tags, "comma separated");
    w_save->add_option("--category", w_category);
    w_save->callback([&] {
        action = [&] {
            auto body = w_body_file.empty() ? w_body : fsutil::read_file(w_body_file);
            std::optional<std::string> category;
            if (!w_category.empty()) category = w_category;
            std::cout << wiki_store().save_entry(w_title, body, split_tags(w_tags), category) << "\n";
            return 0;
        };
    });
    auto* w_org = wiki_cmd->add_subcommand("organize", "file a document into a category");
    w_org->add_option("agent", w_agent)->required();
    w_org->add_option("source", w_source)->required();
    w_org->add_option("category", w_category)->required();
    w_org->add_option("--tags", w_tags, "comma separated");
    w_org->callback([&] {
        action = [&] {
            auto src = fs::path(w_source);
            if (src.is_relative() && fs::exists(src)) src = fs::absolute(src);
            std::cout << wiki_store().organize_file(src.string(), w_category, split_tags(w_tags)) << "\n";
            return 0;
        };
    });
    auto* w_search = wiki_cmd->add_subcommand("search", "search the wiki");
    w_search->add_option("agent", w_agent)->required();
    w_search->add_option("--query,-q", w_query);
    w_search->add_option("--tags", w_tags, "comma separated; entries must carry all");
    w_search->add_option("-k", w_k);
    w_search->callback([&] {
        action = [&] {
            auto& store = wiki_store();
            store.index_sync();
            std::optional<std::string> q;
            if (!w_query.empty()) q = w_query;
            std::optional<std::vector<std::string>> tags;
            if (!w_tags.empty()) tags = split_tags(w_tags);
            json out = json::array();
            for (const auto& h : store.search(q, tags, w_k)) {
                out.push_back(wiki::to_json(h));
                if (!g.as_json) std::cout << h.path << "\t" << h.score << "\n";
            }
            if (g.as_json) std::cout << out.dump() << "\n";
            return 0;
        };
    });
    auto* w_mkdir = wiki_cmd->add_subcommand("mkdir", "create a category");
    w_mkdir->add_option("agent", w_agent)->required();
    w_mkdir->add_option("path", w_path)->required();
    w_mkdir->callback([&] {
        action = [&] {
            std::cout << wiki_store().create_category(w_path) << "\n";
            return 0;
        };
    });

    // skills
    auto* skills = app.add_subcommand("skills", "installed skills");
    skills->require_subcommand(1);
    std::string s_id;
    auto skill_registry = [&] {
        auto config = config_of(g);
        return extend::SkillRegistry(config.skills_dir(), config.skills_state());
    };
    skills->add_subcommand("list", "list skills")->callback([&] {
        action = [&] {
            json out = json::array();
            for (const auto& s : skill_registry().list_skills()) {
                out.push_back(gateway::to_json(s));
                if (!g.as_json) {
                    std::cout << (s.active ? "[on]  " : "[off] ") << s.skill_id << "\t" << s.description << "\n";
                }
            }
            if (g.as_json) std::cout << out.dump() << "\n";
            return 0;
        };
    });
    for (bool on : {true, false}) {
        auto* sub = skills->add_subcommand(on ? "enable" : "disable", on ? "activate a skill" : "deactivate a skill");
        sub->add_option("id", s_id)->required();
        sub->callback([&, on] {
            action = [&, on] {
                skill_registry().set_skill_active(s_id, on);
                std::cout << s_id << (on ? " enabled" : " disabled") << "\n";
                return 0;
            };
        });
    }

    // hooks
    auto* hooks = app.add_subcommand("hooks", "lifecycle hooks");
    hooks->require_subcommand(1);
    hooks->add_subcommand("list", "installed command hooks")->callback([&] {
        action = [&] {
            auto config = config_of(g);
            json out = json::array();
            for (const auto& h : extend::load_command_hooks(config.hooks_dir())) {
                out.push_back(gateway::to_json(h));
                if (!g.as_json) {
                    std::cout << h.hook_id << "\t" << extend::to_string(h.event) << "\t"
                              << extend::to_string(h.capability) << "\t" << h.order << "\n";
                }
            }
            if (g.as_json) std::cout << out.dump() << "\n";
            return 0;
        };
    });

    // task
    auto* task = app.add_subcommand("task", "scheduled tasks");
    task->require_subcommand(1);
    std::string j_spec, j_id;
    auto* task_add = task->add_subcommand("add", "register a job");
    task_add->add_option("job", j_spec, "job as JSON")->required();
    task_add->callback([&] {
        action = [&] {
            auto config = config_of(g);
            json spec;
            try {
                spec = json::parse(j_spec);
            } catch (const json::exception& e) {
                fail(Errc::argument, std::string("job is not JSON: ") + e.what());
            }
            schedtask::JobStore store(config.jobs_path());
            std::cout << store.register_job(schedtask::job_from_json(spec), std::chrono::system_clock::now()) << "\n";
            return 0;
        };
    });
    task->add_subcommand("list", "list jobs")->callback([&] {
        action = [&] {
            auto config = config_of(g);
            schedtask::JobStore store(config.jobs_path());
            json out = json::array();
            for (const auto& j : store.list_jobs()) {
                out.push_back(schedtask::to_json(j));
                if (!g.as_json) {
                    std::cout << j.job_id << "\t" << schedtask::to_string(j.mode) << "\t"
                              << (j.enabled ? "enabled" : "disabled") << "\t"
                              << (j.next_due ? format_iso8601(*j.next_due) : std::string("-")) << "\n";
                }
            }
            if (g.as_json) std::cout << out.dump() << "\n";
            return 0;
        };
    });
    auto* task_cancel = task->add_subcommand("cancel", "cancel a job");
    task_cancel->add_option("id", j_id)->required();
    task_cancel->callback([&] {
        action = [&] {
            auto config = config_of(g);
            schedtask::JobStore(config.jobs_path()).cancel_job(j_id);
            std::cout << "cancelled " << j_id << "\n";
            return 0;
        };
    });
    auto* task_run = task->add_subcommand("run-now", "fire a job through the daemon");
    task_run->add_option("id", j_id)->required();
    task_run->callback([&] {
        action = [&] {
            auto out = gateway::Client::for_data_root(config_of(g)).post("/tasks/" + j_id + "/run", json::object());
            std::cout << out.dump() << "\n";
            return 0;
        };
    });

    // serve
    std::string sv_host;
    int sv_port = -1;
    auto* srv = app.add_subcommand("serve", "run the daemon");
    srv->add_option("--host", sv_host);
    srv->add_option("--port", sv_port, "0 picks a free port");
    srv->callback([&] { action = [&] { return serve(config_of(g), sv_host, sv_port); }; });

    // events
    unsigned long long ev_since = 0;
    int ev_wait = 0;
    auto* ev = app.add_subcommand("events", "read the daemon event stream");
    ev->add_option("--since", ev_since);
    ev->add_option("--wait-ms", ev_wait);
    ev->callback([&] {
        action = [&] {
            std::cout << gateway::Client::for_data_root(config_of(g))
                             .get_text("/events?since=" + std::to_string(ev_since) +
                                       "&wait_ms=" + std::to_string(ev_wait));
            return 0;
        };
    });

    // dispatch-tool (internal: the tool subprocess)
    std::string dt_state;
    auto* dt = app.add_subcommand("dispatch-tool", "run one dispatch tool call read from stdin");
    dt->add_option("--state-file", dt_state)->required();
    dt->group("");
    dt->callback([&] {
        action = [&] {
            auto root = g.data_root.empty() ? default_data_root() : fs::path(g.data_root);
            return dispatch::run_dispatch_tool_process(root, dt_state, std::cin, std::cout, std::cerr);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!action) return 2;
    try {
        return action();
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
