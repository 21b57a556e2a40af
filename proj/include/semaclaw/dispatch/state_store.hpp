#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>

#include "semaclaw/common/lock.hpp"
#include "semaclaw/dispatch/types.hpp"

namespace semaclaw::dispatch {

/// The dispatch state file and its companion "<path>.lock". Every read and
/// write happens while holding the lock; each write bumps the revision.
/// Safe to use from several threads and several processes at once.
class StateStore {
public:
    using WriteObserver = std::function<void(const DispatchState& written)>;

    explicit StateStore(std::filesystem::path state_file, ExclusiveLockFile::Options lock_options = {});

    /// Consistent snapshot. A missing file reads as an empty state.
    DispatchState read() const;

    /// Loads, applies `mutate`, and writes back iff it returns true.
    /// Returns the resulting state.
    DispatchState transact(const std::function<bool(DispatchState&)>& mutate);

    /// Called under the lock after every write (tests use it to record the
    /// revision sequence and to check lock discipline).
    void set_write_observer(WriteObserver observer);

    bool lock_held() const noexcept { return held_.load(); }
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path lock_path() const;

private:
    struct StatKey {
        std::uintmax_t ino = 0;
        std::int64_t mtime_ns = 0;
        std::int64_t size = -1;
        bool operator==(const StatKey&) const = default;
    };

    DispatchState load_locked() const;
    std::optional<StatKey> stat_file() const;

    std::filesystem::path path_;
    ExclusiveLockFile::Options lock_options_;
    mutable std::mutex mu_;
    mutable std::atomic<bool> held_{false};
    mutable std::optional<StatKey> cache_key_;
    mutable DispatchState cache_;
    WriteObserver observer_;
};

}  // namespace semaclaw::dispatch
