#include "semaclaw/gateway/services.hpp"

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/gateway/http_adapter.hpp"
#include "semaclaw/memory/embedding.hpp"
#include "semaclaw/memory/memory_tool.hpp"
#include "semaclaw/wiki/wiki_tools.hpp"

namespace semaclaw::gateway {

namespace {

std::shared_ptr<const text::StopwordList> load_stopwords(const GatewayConfig& config) {
    if (config.stopwords) return std::make_shared<const text::StopwordList>(text::StopwordList::from_file(*config.stopwords));
    return std::make_shared<const text::StopwordList>();
}

memory::MemoryOptions memory_options(const GatewayConfig& config) {
    memory::MemoryOptions o;
    if (config.embeddings) o.embedder = std::make_shared<memory::HashingEmbedder>();
    o.stopwords = load_stopwords(config);
    return o;
}

}  // namespace

std::shared_ptr<kernel::ModelAdapter> make_adapter(const std::string& binding, const GatewayConfig& config) {
    if (binding.rfind("scripted:", 0) == 0) {
        fs::path program = binding.substr(9);
        if (program.is_relative()) program = config.data_root / program;
        return kernel::ScriptedAdapter::from_file(program);
    }
    if (binding.rfind("http://", 0) == 0) {
        return std::make_shared<HttpChatAdapter>(binding, config.model_name, config.api_key);
    }
    if (binding.empty()) fail(Errc::config, "no model adapter configured; set [model] adapter");
    fail(Errc::config, "unknown adapter binding '" + binding + "'");
}

Services::Services(GatewayConfig config, Clock& clock, std::optional<std::filesystem::path> executable,
                   kernel::AdapterFactory adapters)
    : config_(std::move(config)),
      clock_(clock),
      agents_(config_.data_root),
      memory_(memory_options(config_)),
      skills_(config_.skills_dir(), config_.skills_state()),
      bridge_(clock),
      wiki_(agents_, load_stopwords(config_), clock),
      state_(config_.state_path()),
      jobs_(config_.jobs_path()) {
    std::error_code ec;
    fs::create_directories(config_.data_root, ec);
    fs::create_directories(config_.skills_dir(), ec);
    fs::create_directories(config_.tools_dir(), ec);
    fs::create_directories(config_.hooks_dir(), ec);

    if (!adapters) {
        adapters = [this](const kernel::SessionConfig& sc, const context::AgentIdentity&) {
            return make_adapter(config_.adapter_for(sc.agent_id), config_);
        };
    }
    kernel::RuntimeDeps deps;
    deps.clock = &clock_;
    deps.bus = &bus_;
    deps.agents = &agents_;
    deps.memory = &memory_;
    deps.tools = &tools_;
    deps.hooks = &hooks_;
    deps.skills = &skills_;
    deps.bridge = &bridge_;
    deps.adapters = std::move(adapters);
    runtime_ = std::make_unique<kernel::AgentRuntime>(std::move(deps));

    dispatcher_ = std::make_unique<dispatch::DispatchBridge>(state_, agents_, *this, clock_);
    dispatch_tools_ = std::make_unique<dispatch::DispatchToolService>(config_.state_path(), config_.data_root, clock_);
    scheduler_ = std::make_unique<schedtask::Scheduler>(jobs_, *this, *this, clock_);

    runtime_->register_builtin_tools();
    memory::register_memory_tool(tools_, memory_, agents_);
    wiki::register_wiki_tools(tools_, wiki_);
    std::optional<dispatch::ToolProcess> process;
    if (executable && config_.tool_subprocess) {
        process = dispatch::ToolProcess{*executable, config_.data_root, config_.state_path()};
    }
    dispatch::register_dispatch_tools(tools_, *dispatch_tools_, process);
    dispatch::register_dispatch_wait_tool(tools_, *dispatcher_);
    schedtask::register_schedule_tools(tools_, jobs_, clock_);
    schedtask::register_send_message_tool(tools_, *this);
    for (auto& spec : extend::load_command_tools(config_.tools_dir())) tools_.install(std::move(spec));
    for (auto& hook : extend::load_command_hooks(config_.hooks_dir())) hooks_.register_hook(std::move(hook));

    event_sub_ = bus_.subscribe({}, [this](const kernel::RuntimeEvent& ev) {
        events_.append({{"type", "runtime"}, {"event", kernel::to_json(ev)}});
    });
    surface_id_ = bridge_.add_surface([this](const permbridge::PendingRequest& r) {
        events_.append({{"type", "permission:request"}, {"request", permbridge::to_json(r)}});
    });
}

Services::~Services() {
    bridge_.remove_surface(surface_id_);
    scheduler_->stop();
    dispatcher_->stop();
    deny_pending("daemon shutting down");
    drain();
    bus_.flush();
    event_sub_.reset();
    events_.close();
}

std::string Services::primary_session(const std::string& folder) {
    if (!agents_.find_folder(folder)) fail(Errc::not_found, "no agent with folder '" + folder + "'");
    std::lock_guard lock(primary_mu_);
    auto it = primary_.find(folder);
    if (it != primary_.end() && runtime_->is_open(it->second)) return it->second;
    kernel::SessionConfig sc;
    sc.agent_id = folder;
    sc.context_limit = config_.context_limit;
    sc.idle_timeout = config_.idle_timeout;
    sc.max_steps = config_.max_steps;
    auto id = runtime_->open_session(sc);
    primary_[folder] = id;
    return id;
}

kernel::TurnResult Services::run_agent_turn(const std::string& folder, const std::string& text) {
    return runtime_->submit_turn(primary_session(folder), text);
}

void Services::resolve(const std::string& request_id, const permbridge::Decision& decision) {
    bridge_.resolve(request_id, decision);
    events_.append({{"type", "permission:resolved"}, {"request_id", request_id}, {"decision", permbridge::to_json(decision)}});
}

void Services::deny_pending(const std::string& reason) {
    for (const auto& r : bridge_.list_pending()) {
        try {
            bridge_.resolve(r.request_id, permbridge::Decision::deny(reason));
        } catch (const Error&) {
            // resolved concurrently
        }
    }
}

void Services::maintain() {
    runtime_->reap_idle();
    auto now = clock_.now();
    for (const auto& identity : agents_.all()) memory_.store_for(identity).enforce_retention(now);
}

std::filesystem::path Services::workspace(const std::string& folder) {
    return runtime_->workspace(primary_session(folder));
}

void Services::set_workspace(const std::string& folder, const std::filesystem::path& path) {
    runtime_->switch_workspace(primary_session(folder), path);
}

void Services::submit(const std::string& folder, const std::string& task_ref, const std::string& prompt) {
    auto session = primary_session(folder);
    prune_workers();
    std::lock_guard lock(workers_mu_);
    workers_.push_back(std::async(std::launch::async, [this, folder, task_ref, prompt, session] {
        events_.append({{"type", "dispatch"}, {"task", task_ref}, {"worker", folder}, {"state", "submitted"}});
        try {
            auto result = runtime_->submit_turn(session, prompt);
            if (result.ok) {
                dispatcher_->notify_reply(folder, result.reply, task_ref);
            } else {
                dispatcher_->notify_error(folder, result.error, task_ref);
            }
        } catch (const std::exception& e) {
            try {
                dispatcher_->notify_error(folder, e.what(), task_ref);
            } catch (...) {
            }
        }
    }));
}

void Services::heartbeat(const std::string& admin_folder) { runtime_->touch_agent(admin_folder); }

std::string Services::run_turn(const std::string& agent_folder, const std::string& prompt) {
    auto result = run_agent_turn(agent_folder, prompt);
    if (!result.ok) fail(Errc::adapter, result.error);
    return result.reply;
}

void Services::deliver(const std::string& channel, const std::string& message, const std::string& origin) {
    nlohmann::json frame{{"channel", channel}, {"message", message}, {"origin", origin},
                         {"time", format_iso8601(clock_.now())}};
    {
        std::lock_guard lock(outbox_mu_);
        fsutil::append_file(config_.outbox_path(), frame.dump() + "\n");
    }
    frame["type"] = "message";
    events_.append(std::move(frame));
}

void Services::prune_workers() {
    std::lock_guard lock(workers_mu_);
    std::erase_if(workers_, [](std::future<void>& f) {
        return f.wait_for(std::chrono::seconds{0}) == std::future_status::ready;
    });
}

void Services::drain() {
    for (;;) {
        std::vector<std::future<void>> pending;
        {
            std::lock_guard lock(workers_mu_);
            pending.swap(workers_);
        }
        if (pending.empty()) return;
        for (auto& f : pending) f.wait();
    }
}

}  // namespace semaclaw::gateway
