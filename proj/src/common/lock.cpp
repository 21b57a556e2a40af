#include "semaclaw/common/lock.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <string>
#include <thread>

#include "semaclaw/common/error.hpp"

namespace semaclaw {

ExclusiveLockFile::ExclusiveLockFile(std::filesystem::path path)
    : ExclusiveLockFile(std::move(path), Options{}) {}

ExclusiveLockFile::ExclusiveLockFile(std::filesystem::path path, Options options)
    : path_(std::move(path)), options_(options) {}

ExclusiveLockFile::~ExclusiveLockFile() {
    if (held_) unlock();
}

bool ExclusiveLockFile::try_lock() {
    if (held_) fail(Errc::invalid_state, "lock already held: " + path_.string());
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY | O_CLOEXEC, 0644);
    if (fd < 0) {
        if (errno != EEXIST) fail(Errc::io, "cannot create lock file " + path_.string());
        return false;
    }
    auto owner = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, owner.data(), owner.size());
    ::close(fd);
    held_ = true;
    return true;
}

void ExclusiveLockFile::lock() {
    auto deadline = std::chrono::steady_clock::now() + options_.timeout;
    for (;;) {
        if (try_lock()) return;
        if (take_over_if_stale()) continue;
        if (std::chrono::steady_clock::now() >= deadline) {
            fail(Errc::lock_contention, "timed out waiting for lock " + path_.string());
        }
        std::this_thread::sleep_for(options_.retry_interval);
    }
}

void ExclusiveLockFile::unlock() {
    if (!held_) return;
    ::unlink(path_.c_str());
    held_ = false;
}

bool ExclusiveLockFile::take_over_if_stale() {
    struct stat st {};
    if (::stat(path_.c_str(), &st) != 0) return errno == ENOENT;
    auto mtime = std::chrono::system_clock::from_time_t(st.st_mtim.tv_sec);
    if (std::chrono::system_clock::now() - mtime < options_.stale_after) return false;
    // Rename first so two contenders cannot both delete a fresh lock.
    auto grave = path_;
    grave += ".stale." + std::to_string(::getpid());
    if (::rename(path_.c_str(), grave.c_str()) != 0) return false;
    ::unlink(grave.c_str());
    return true;
}

AdvisoryLock AdvisoryLock::acquire(const std::filesystem::path& path) {
    int fd = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd < 0) fail(Errc::io, "cannot open lock " + path.string());
    if (::flock(fd, LOCK_EX) != 0) {
        ::close(fd);
        fail(Errc::io, "flock failed on " + path.string());
    }
    return AdvisoryLock(fd);
}

AdvisoryLock AdvisoryLock::acquire_nonblocking(const std::filesystem::path& path) {
    int fd = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd < 0) fail(Errc::io, "cannot open lock " + path.string());
    if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd);
        fail(Errc::lock_contention, "already locked by another process: " + path.string());
    }
    return AdvisoryLock(fd);
}

AdvisoryLock& AdvisoryLock::operator=(AdvisoryLock&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

AdvisoryLock::~AdvisoryLock() {
    if (fd_ >= 0) ::close(fd_);
}

}  // namespace semaclaw
