#include "semaclaw/wiki/wiki_store.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/frontmatter.hpp"
#include "semaclaw/common/fs.hpp"

namespace semaclaw::wiki {

namespace {

constexpr std::size_t kSnippetBytes = 200;

std::vector<std::string> header_tags(const std::optional<nlohmann::ordered_json>& header) {
    std::vector<std::string> out;
    if (!header || !header->contains("tags")) return out;
    const auto& t = (*header)["tags"];
    if (t.is_array()) {
        for (const auto& v : t) {
            if (v.is_string()) out.push_back(v.get<std::string>());
        }
    } else if (t.is_string() && !t.get<std::string>().empty()) {
        out.push_back(t.get<std::string>());
    }
    return out;
}

std::string rel_string(const fs::path& p) { return p.lexically_normal().generic_string(); }

bool hidden(const fs::path& p) {
    auto name = p.filename().string();
    return !name.empty() && name.front() == '.';
}

}  // namespace

nlohmann::json to_json(const TreeNode& n) {
    nlohmann::json j{{"name", n.name}, {"path", n.path}, {"type", n.is_dir ? "category" : "entry"}};
    if (n.is_dir) {
        nlohmann::json children = nlohmann::json::array();
        for (const auto& c : n.children) children.push_back(to_json(c));
        j["children"] = children;
    } else {
        j["tags"] = n.tags;
    }
    return j;
}

nlohmann::json to_json(const WikiHit& h) {
    return {{"path", h.path}, {"snippet", h.snippet}, {"tags", h.tags}, {"score", h.score}, {"source", "wiki"}};
}

WikiStore::WikiStore(fs::path root, fs::path index_file, std::shared_ptr<const text::StopwordList> stopwords,
                     Clock& clock)
    : root_(fs::absolute(root).lexically_normal()),
      stopwords_(stopwords ? std::move(stopwords) : std::make_shared<const text::StopwordList>()),
      clock_(clock),
      index_(root_, std::move(index_file), nullptr) {
    std::error_code ec;
    fs::create_directories(root_ / kInboxDir, ec);
    if (ec) fail(Errc::io, "cannot create wiki root " + root_.string());
}

std::vector<std::string> WikiStore::tags_of(const std::string& rel) const {
    auto text = fsutil::try_read_file(root_ / rel);
    if (!text) return {};
    return header_tags(parse_frontmatter(*text).header);
}

TreeNode WikiStore::inspect_tree() const {
    std::function<TreeNode(const fs::path&, const std::string&)> walk = [&](const fs::path& dir,
                                                                           const std::string& rel) {
        TreeNode node;
        node.name = rel.empty() ? "" : fs::path(rel).filename().string();
        node.path = rel;
        node.is_dir = true;
        std::vector<fs::directory_entry> entries;
        std::error_code ec;
        for (const auto& e : fs::directory_iterator(dir, ec)) {
            if (!hidden(e.path())) entries.push_back(e);
        }
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.path().filename() < b.path().filename(); });
        for (const auto& e : entries) {
            auto child_rel = rel.empty() ? e.path().filename().string() : rel + "/" + e.path().filename().string();
            if (e.is_directory()) {
                node.children.push_back(walk(e.path(), child_rel));
            } else if (e.path().extension() == ".md") {
                TreeNode leaf;
                leaf.name = e.path().filename().string();
                leaf.path = child_rel;
                leaf.tags = tags_of(child_rel);
                node.children.push_back(std::move(leaf));
            }
        }
        return node;
    };
    return walk(root_, "");
}

std::string WikiStore::create_category(const std::string& rel) {
    auto full = fsutil::resolve_inside(root_, rel);
    std::error_code ec;
    fs::create_directories(full, ec);
    if (ec) fail(Errc::io, "cannot create " + full.string() + ": " + ec.message());
    return rel_string(full.lexically_relative(root_));
}

std::string WikiStore::save_entry(const std::string& title, const std::string& body,
                                  const std::vector<std::string>& tags, const std::optional<std::string>& category) {
    if (body.empty()) fail(Errc::validation, "wiki entry body is empty");
    auto dir_rel = category && !category->empty() ? *category : std::string(kInboxDir);
    std::lock_guard lock(write_mu_);
    auto dir = fsutil::resolve_inside(root_, dir_rel);
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto slug = text::slugify(title);
    if (slug.empty()) slug = "entry";
    fs::path target;
    for (int attempt = 1; attempt <= kMaxSlugAttempts; ++attempt) {
        auto name = attempt == 1 ? slug + ".md" : slug + "-" + std::to_string(attempt) + ".md";
        if (!fs::exists(dir / name)) {
            target = dir / name;
            break;
        }
    }
    if (target.empty()) fail(Errc::validation, "no free file name for '" + slug + "' after 100 attempts");
    nlohmann::ordered_json header;
    header["title"] = title;
    header["tags"] = tags;
    header["source"] = "agent";
    header["created"] = format_iso8601(clock_.now());
    fsutil::atomic_write(target, render_frontmatter(header, body));
    return rel_string(target.lexically_relative(root_));
}

std::string WikiStore::organize_file(const std::string& source, const std::string& category,
                                     const std::vector<std::string>& tags) {
    fs::path src = fs::path(source).is_absolute() ? fs::path(source) : fsutil::resolve_inside(root_, source);
    auto content = fsutil::try_read_file(src);
    if (!content) fail(Errc::io, "cannot read " + src.string());
    auto doc = parse_frontmatter(*content);

    nlohmann::ordered_json header = doc.header.value_or(nlohmann::ordered_json::object());
    auto merged = header_tags(doc.header);
    for (const auto& t : tags) {
        if (std::find(merged.begin(), merged.end(), t) == merged.end()) merged.push_back(t);
    }
    header["tags"] = merged;
    if (!header.contains("source")) {
        header["source"] = "file:" + (fsutil::is_inside(root_, src) ? rel_string(src.lexically_relative(root_)) : src.string());
    }
    if (!header.contains("created")) header["created"] = format_iso8601(clock_.now());

    std::lock_guard lock(write_mu_);
    auto dir = fsutil::resolve_inside(root_, category);
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto stem = src.stem().string();
    auto ext = src.extension().string().empty() ? std::string(".md") : src.extension().string();
    fs::path target;
    for (int attempt = 1; attempt <= kMaxSlugAttempts; ++attempt) {
        auto name = attempt == 1 ? stem + ext : stem + "-" + std::to_string(attempt) + ext;
        auto candidate = dir / name;
        if (!fs::exists(candidate) || fs::equivalent(candidate, src, ec)) {
            target = candidate;
            break;
        }
    }
    if (target.empty()) fail(Errc::validation, "no free file name for '" + stem + "' after 100 attempts");
    fsutil::atomic_write(target, render_frontmatter(header, doc.body));
    return rel_string(target.lexically_relative(root_));
}

std::string WikiStore::read_entry(const std::string& rel) const {
    auto full = fsutil::resolve_inside(root_, rel);
    auto text = fsutil::try_read_file(full);
    if (!text || fs::is_directory(full)) fail(Errc::not_found, "no wiki entry " + rel);
    return *text;
}

void WikiStore::write_entry(const std::string& rel, const std::string& content) {
    auto full = fsutil::resolve_inside(root_, rel);
    if (fs::is_directory(full)) fail(Errc::validation, rel + " is a category");
    std::lock_guard lock(write_mu_);
    fsutil::atomic_write(full, content);
}

std::string WikiStore::move_entry(const std::string& from, const std::string& to) {
    auto src = fsutil::resolve_inside(root_, from);
    auto dst = fsutil::resolve_inside(root_, to);
    std::lock_guard lock(write_mu_);
    if (!fs::exists(src)) fail(Errc::not_found, "no wiki entry " + from);
    if (fs::exists(dst)) fail(Errc::invalid_state, to + " already exists");
    std::error_code ec;
    fs::create_directories(dst.parent_path(), ec);
    fs::rename(src, dst, ec);
    if (ec) fail(Errc::io, "cannot move " + from + " to " + to + ": " + ec.message());
    return rel_string(dst.lexically_relative(root_));
}

std::vector<std::string> WikiStore::entry_files() const {
    std::vector<std::string> out;
    std::error_code ec;
    fs::recursive_directory_iterator it(root_, ec), end;
    for (; it != end; it.increment(ec)) {
        if (ec) break;
        if (hidden(it->path())) {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file() && it->path().extension() == ".md") {
            out.push_back(rel_string(it->path().lexically_relative(root_)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

memory::SyncStats WikiStore::index_sync() {
    std::vector<memory::CorpusFile> files;
    for (auto& rel : entry_files()) files.push_back({rel, memory::Source::wiki, std::nullopt, true});
    return index_.sync(files, {});
}

std::vector<WikiHit> WikiStore::search(const std::optional<std::string>& query,
                                       const std::optional<std::vector<std::string>>& tags, int k) const {
    const bool has_query = query && !text::trim(*query).empty();
    const bool has_tags = tags && !tags->empty();
    if (!has_query && !has_tags) fail(Errc::argument, "wiki search needs a query or a tag filter");
    if (k < 1) fail(Errc::argument, "k must be at least 1");

    auto carries = [&](const std::vector<std::string>& have) {
        if (!has_tags) return true;
        return std::all_of(tags->begin(), tags->end(), [&](const std::string& t) {
            return std::find(have.begin(), have.end(), t) != have.end();
        });
    };

    std::vector<WikiHit> hits;
    if (!has_query) {
        for (const auto& rel : entry_files()) {
            auto t = tags_of(rel);
            if (!carries(t)) continue;
            auto text = fsutil::try_read_file(root_ / rel);
            auto body = text ? parse_frontmatter(*text).body : std::string();
            hits.push_back({rel, text::trim(body.substr(0, kSnippetBytes)), t, 1.0});
        }
    } else {
        auto terms = stopwords_->filter(text::tokenize(*query));
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        std::map<std::string, WikiHit> best;
        if (!terms.empty()) {
            for (const auto& scored : index_.keyword_search(terms)) {
                auto chunk = index_.chunk(scored.id);
                if (!chunk || !fs::exists(root_ / chunk->file)) continue;
                auto& hit = best[chunk->file];
                if (hit.path.empty() || scored.score > hit.score) {
                    hit.path = chunk->file;
                    hit.score = scored.score;
                    hit.snippet = chunk->text.substr(0, kSnippetBytes);
                }
            }
        }
        for (auto& [rel, hit] : best) {
            hit.tags = tags_of(rel);
            if (carries(hit.tags)) hits.push_back(std::move(hit));
        }
        std::sort(hits.begin(), hits.end(), [](const WikiHit& a, const WikiHit& b) {
            return a.score != b.score ? a.score > b.score : a.path < b.path;
        });
    }
    if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
    return hits;
}

WikiStore& WikiHub::store_for(const std::string& agent_folder) {
    std::lock_guard lock(mu_);
    auto it = stores_.find(agent_folder);
    if (it != stores_.end()) return *it->second;
    auto identity = agents_.find_folder(agent_folder);
    if (!identity) fail(Errc::not_found, "no agent with folder '" + agent_folder + "'");
    auto store = std::make_unique<WikiStore>(identity->wiki_root(), identity->index_dir() / "wiki.json", stopwords_,
                                             clock_);
    auto& ref = *store;
    stores_.emplace(agent_folder, std::move(store));
    return ref;
}

}  // namespace semaclaw::wiki
