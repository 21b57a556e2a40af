#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace semaclaw::text {

/// Lowercased word tokens. ASCII letters and digits form words, as do bytes
/// >= 0x80 so UTF-8 words survive intact; everything else separates.
std::vector<std::string> tokenize(std::string_view input);

/// Fixed query-side stopword list. Documents are never filtered with it.
class StopwordList {
public:
    StopwordList();  // built-in English list
    explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}

    static StopwordList from_file(const std::filesystem::path& path);

    bool contains(const std::string& token) const { return words_.count(token) != 0; }
    std::size_t size() const { return words_.size(); }
    const std::set<std::string>& words() const { return words_; }

    std::vector<std::string> filter(std::vector<std::string> tokens) const;

private:
    std::set<std::string> words_;
};

/// lowercase, spaces to hyphens, other non-alphanumerics dropped.
std::string slugify(std::string_view title);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Splits paragraphs on blank lines; paragraphs are trimmed and empty ones dropped.
std::vector<std::string> paragraphs(std::string_view body);

}  // namespace semaclaw::text
