#include "semaclaw/dispatch/state_store.hpp"

#include <sys/stat.h>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"

namespace semaclaw::dispatch {

namespace {

struct HeldFlag {
    std::atomic<bool>& flag;
    explicit HeldFlag(std::atomic<bool>& f) : flag(f) { flag = true; }
    ~HeldFlag() { flag = false; }
};

}  // namespace

StateStore::StateStore(std::filesystem::path state_file, ExclusiveLockFile::Options lock_options)
    : path_(std::move(state_file)), lock_options_(lock_options) {
    std::error_code ec;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
}

std::filesystem::path StateStore::lock_path() const {
    auto p = path_;
    p += ".lock";
    return p;
}

void StateStore::set_write_observer(WriteObserver observer) {
    std::lock_guard lock(mu_);
    observer_ = std::move(observer);
}

std::optional<StateStore::StatKey> StateStore::stat_file() const {
    struct stat st{};
    if (::stat(path_.c_str(), &st) != 0) return std::nullopt;
    return StatKey{static_cast<std::uintmax_t>(st.st_ino),
                   static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1000000000 + st.st_mtim.tv_nsec,
                   static_cast<std::int64_t>(st.st_size)};
}

DispatchState StateStore::load_locked() const {
    auto key = stat_file();
    if (!key) {
        cache_key_.reset();
        return DispatchState{};
    }
    if (cache_key_ && *cache_key_ == *key) return cache_;
    auto text = fsutil::read_file(path_);
    DispatchState state;
    try {
        state = state_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::validation, "dispatch state " + path_.string() + " is corrupt: " + e.what());
    }
    cache_key_ = key;
    cache_ = state;
    return state;
}

DispatchState StateStore::read() const {
    std::lock_guard lock(mu_);
    ExclusiveLockFile file_lock(lock_path(), lock_options_);
    file_lock.lock();
    HeldFlag held(held_);
    return load_locked();
}

DispatchState StateStore::transact(const std::function<bool(DispatchState&)>& mutate) {
    std::lock_guard lock(mu_);
    ExclusiveLockFile file_lock(lock_path(), lock_options_);
    file_lock.lock();
    HeldFlag held(held_);
    auto state = load_locked();
    if (!mutate(state)) return state;
    ++state.revision;
    fsutil::atomic_write(path_, to_json(state).dump(1));
    cache_key_ = stat_file();
    cache_ = state;
    if (observer_) observer_(state);
    return state;
}

}  // namespace semaclaw::dispatch
