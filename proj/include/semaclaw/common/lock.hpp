#pragma once

#include <chrono>
#include <filesystem>

namespace semaclaw {

/// Create-exclusive lock file. Acquired by creating `path` with O_EXCL; a lock
/// file whose mtime is older than `stale_after` is taken over. Works across
/// processes and across threads of one process.
class ExclusiveLockFile {
public:
    struct Options {
        std::chrono::milliseconds timeout{10000};
        std::chrono::milliseconds stale_after{30000};
        std::chrono::microseconds retry_interval{200};
    };

    explicit ExclusiveLockFile(std::filesystem::path path);
    ExclusiveLockFile(std::filesystem::path path, Options options);
    ~ExclusiveLockFile();

    ExclusiveLockFile(const ExclusiveLockFile&) = delete;
    ExclusiveLockFile& operator=(const ExclusiveLockFile&) = delete;

    /// Throws Errc::lock_contention when the timeout elapses.
    void lock();
    bool try_lock();
    void unlock();
    bool held() const noexcept { return held_; }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    bool take_over_if_stale();

    std::filesystem::path path_;
    Options options_;
    bool held_ = false;
};

/// flock(2)-based advisory lock held for an object's lifetime. Released by the
/// kernel if the process dies, so it never goes stale.
class AdvisoryLock {
public:
    /// Blocks until acquired.
    static AdvisoryLock acquire(const std::filesystem::path& path);
    /// Throws Errc::lock_contention if another holder exists.
    static AdvisoryLock acquire_nonblocking(const std::filesystem::path& path);

    AdvisoryLock(AdvisoryLock&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    AdvisoryLock& operator=(AdvisoryLock&& other) noexcept;
    AdvisoryLock(const AdvisoryLock&) = delete;
    AdvisoryLock& operator=(const AdvisoryLock&) = delete;
    ~AdvisoryLock();

private:
    explicit AdvisoryLock(int fd) : fd_(fd) {}
    int fd_ = -1;
};

}  // namespace semaclaw
