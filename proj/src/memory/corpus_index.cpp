#include "semaclaw/memory/corpus_index.hpp"

#include <mutex>

#include <nlohmann/json.hpp>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/frontmatter.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/text.hpp"
#include "semaclaw/kernel/tokens.hpp"

namespace semaclaw::memory {

namespace {

std::uint64_t content_hash(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Source source_from_string(const std::string& s) {
    if (s == "session") return Source::session;
    if (s == "wiki") return Source::wiki;
    return Source::memory;
}

}  // namespace

std::string_view to_string(Source s) noexcept {
    switch (s) {
        case Source::memory: return "memory";
        case Source::session: return "session";
        case Source::wiki: return "wiki";
    }
    return "memory";
}

std::vector<std::string> chunk_text(std::string_view body, std::size_t max_tokens) {
    const std::size_t max_bytes = max_tokens * 4;
    std::vector<std::string> out;
    for (auto& para : text::paragraphs(body)) {
        if (kernel::count_tokens(para) <= max_tokens) {
            out.push_back(std::move(para));
            continue;
        }
        std::string_view rest = para;
        while (!rest.empty()) {
            if (rest.size() <= max_bytes) {
                out.emplace_back(rest);
                break;
            }
            auto cut = rest.substr(0, max_bytes).find_last_of(" \t\n");
            if (cut == std::string_view::npos || cut == 0) cut = max_bytes;
            out.push_back(text::trim(rest.substr(0, cut)));
            rest = rest.substr(cut);
            while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t' || rest.front() == '\n')) {
                rest.remove_prefix(1);
            }
        }
    }
    return out;
}

CorpusIndex::CorpusIndex(fs::path root, fs::path store_file, std::shared_ptr<EmbeddingProvider> embedder)
    : root_(std::move(root)), store_file_(std::move(store_file)), embedder_(std::move(embedder)) {
    load();
}

void CorpusIndex::load() {
    auto text = fsutil::try_read_file(store_file_);
    if (!text) return;
    try {
        auto doc = nlohmann::json::parse(*text);
        if (doc.at("schema_version").get<int>() != kSchemaVersion) {
            keyword_ok_ = false;
            return;
        }
        for (const auto& c : doc.at("chunks")) {
            Chunk chunk;
            chunk.doc_id = c.at("id");
            chunk.source = source_from_string(c.at("source"));
            chunk.file = c.at("file");
            if (c.contains("date") && c["date"].is_string()) chunk.date = c["date"].get<std::string>();
            chunk.text = c.at("text");
            bm25_.add(chunk.doc_id, text::tokenize(chunk.text));
            if (c.contains("embedding")) vectors_.upsert(chunk.doc_id, c["embedding"].get<Embedding>());
            chunks_[chunk.doc_id] = std::move(chunk);
        }
        for (const auto& [rel, f] : doc.at("files").items()) {
            files_[rel] = FileEntry{f.at("hash").get<std::uint64_t>(),
                                    f.at("chunks").get<std::vector<std::string>>()};
        }
    } catch (const nlohmann::json::exception&) {
        chunks_.clear();
        files_.clear();
        bm25_.clear();
        vectors_.clear();
        keyword_ok_ = false;
    }
}

void CorpusIndex::persist() const {
    nlohmann::json chunks = nlohmann::json::array();
    for (const auto& [id, c] : chunks_) {
        nlohmann::json j{{"id", id}, {"source", to_string(c.source)}, {"file", c.file}, {"text", c.text}};
        j["date"] = c.date ? nlohmann::json(*c.date) : nlohmann::json(nullptr);
        if (auto* v = vectors_.get(id)) j["embedding"] = *v;
        chunks.push_back(std::move(j));
    }
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [rel, f] : files_) files[rel] = {{"hash", f.hash}, {"chunks", f.chunk_ids}};
    fsutil::atomic_write(store_file_,
                         nlohmann::json{{"schema_version", kSchemaVersion}, {"files", files}, {"chunks", chunks}}
                             .dump());
}

void CorpusIndex::drop_file_locked(const std::string& rel) {
    auto it = files_.find(rel);
    if (it == files_.end()) return;
    for (const auto& id : it->second.chunk_ids) {
        bm25_.remove(id);
        vectors_.remove(id);
        chunks_.erase(id);
    }
    files_.erase(it);
}

SyncStats CorpusIndex::sync(const std::vector<CorpusFile>& files, const std::set<std::string>& forced) {
    std::unique_lock lock(mu_);
    SyncStats stats;
    bool changed = !keyword_ok_;
    keyword_ok_ = true;

    std::set<std::string> listed;
    for (const auto& f : files) {
        listed.insert(f.rel);
        auto content = fsutil::try_read_file(root_ / f.rel);
        if (!content) continue;
        auto hash = content_hash(*content);
        auto existing = files_.find(f.rel);
        bool stale = existing == files_.end() || existing->second.hash != hash;
        if (!stale && !forced.count(f.rel)) continue;

        drop_file_locked(f.rel);
        FileEntry entry{hash, {}};
        std::vector<Chunk> fresh;
        auto pieces = chunk_text(f.has_frontmatter ? parse_frontmatter(*content).body : *content);
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            fresh.push_back(Chunk{f.rel + "#" + std::to_string(i), f.source, f.rel, f.date, pieces[i]});
        }
        std::vector<Embedding> vecs;
        if (embedder_ && !fresh.empty()) {
            std::vector<std::string> texts;
            for (const auto& c : fresh) texts.push_back(c.text);
            try {
                vecs = embedder_->embed(texts);
                if (vecs.size() != fresh.size()) {
                    vecs.clear();
                    stats.embed_failures += fresh.size();
                }
            } catch (const std::exception&) {
                stats.embed_failures += fresh.size();
            }
        }
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            auto& c = fresh[i];
            bm25_.add(c.doc_id, text::tokenize(c.text));
            if (!vecs.empty()) vectors_.upsert(c.doc_id, std::move(vecs[i]));
            entry.chunk_ids.push_back(c.doc_id);
            chunks_[c.doc_id] = std::move(c);
        }
        stats.chunks += entry.chunk_ids.size();
        ++stats.files_indexed;
        files_[f.rel] = std::move(entry);
        changed = true;
    }

    std::vector<std::string> gone;
    for (const auto& [rel, entry] : files_) {
        if (!listed.count(rel) || !fs::exists(root_ / rel)) gone.push_back(rel);
    }
    for (const auto& rel : gone) {
        drop_file_locked(rel);
        ++stats.files_removed;
        changed = true;
    }
    if (changed) persist();
    return stats;
}

void CorpusIndex::purge(const std::vector<std::string>& rels) {
    std::unique_lock lock(mu_);
    bool changed = false;
    for (const auto& rel : rels) {
        if (files_.count(rel)) {
            drop_file_locked(rel);
            changed = true;
        }
    }
    if (changed) persist();
}

bool CorpusIndex::keyword_available() const {
    std::shared_lock lock(mu_);
    return keyword_ok_;
}

std::function<bool(const std::string&)> CorpusIndex::id_filter(
    const std::function<bool(const Chunk&)>& accept) const {
    if (!accept) return {};
    return [this, &accept](const std::string& id) {
        auto it = chunks_.find(id);
        return it != chunks_.end() && accept(it->second);
    };
}

std::vector<ScoredId> CorpusIndex::keyword_search(const std::vector<std::string>& terms,
                                                  const std::function<bool(const Chunk&)>& accept) const {
    std::shared_lock lock(mu_);
    if (!keyword_ok_) fail(Errc::invalid_state, "keyword index unavailable");
    return bm25_.search(terms, id_filter(accept));
}

std::vector<ScoredId> CorpusIndex::vector_search(const std::string& query_text, double min_similarity,
                                                 const std::function<bool(const Chunk&)>& accept) const {
    if (!embedder_) return {};
    auto q = embedder_->embed({query_text});
    if (q.size() != 1) fail(Errc::adapter, "embedding provider returned no vector");
    std::shared_lock lock(mu_);
    return vectors_.search(q[0], min_similarity, id_filter(accept));
}

std::optional<Chunk> CorpusIndex::chunk(const std::string& doc_id) const {
    std::shared_lock lock(mu_);
    auto it = chunks_.find(doc_id);
    if (it == chunks_.end()) return std::nullopt;
    return it->second;
}

std::vector<Chunk> CorpusIndex::chunks() const {
    std::shared_lock lock(mu_);
    std::vector<Chunk> out;
    for (const auto& [id, c] : chunks_) out.push_back(c);
    return out;
}

std::set<std::string> CorpusIndex::indexed_files() const {
    std::shared_lock lock(mu_);
    std::set<std::string> out;
    for (const auto& [rel, e] : files_) out.insert(rel);
    return out;
}

}  // namespace semaclaw::memory
