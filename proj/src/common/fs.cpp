#include "semaclaw/common/fs.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "semaclaw/common/error.hpp"

namespace semaclaw::fsutil {

std::string read_file(const fs::path& path) {
    auto content = try_read_file(path);
    if (!content) fail(Errc::io, "cannot read " + path.string());
    return *content;
}

std::optional<std::string> try_read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write(const fs::path& path, std::string_view content) {
    static std::atomic<unsigned long> counter{0};
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(Errc::io, "short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(Errc::io, "cannot rename into " + path.string());
    }
}

void append_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) fail(Errc::io, "cannot append to " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(Errc::io, "short write to " + path.string());
}

fs::path resolve_inside(const fs::path& root, const fs::path& rel) {
    if (rel.is_absolute()) fail(Errc::validation, "absolute path not allowed: " + rel.string());
    fs::path normal = rel.lexically_normal();
    for (const auto& part : normal) {
        if (part == "..") fail(Errc::validation, "path escapes root: " + rel.string());
    }
    auto full = (root / normal).lexically_normal();
    if (!is_inside(root, full)) fail(Errc::validation, "path escapes root: " + rel.string());
    return full;
}

bool is_inside(const fs::path& root, const fs::path& candidate) {
    auto r = root.lexically_normal();
    auto c = candidate.lexically_normal();
    auto rel = c.lexically_relative(r);
    if (rel.empty()) return false;
    auto first = *rel.begin();
    return first != "..";
}

}  // namespace semaclaw::fsutil
