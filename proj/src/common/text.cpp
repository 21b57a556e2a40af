#include "semaclaw/common/text.hpp"

#include <cctype>
#include <sstream>

#include "semaclaw/common/fs.hpp"

namespace semaclaw::text {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

const char* const kDefaultStopwords[] = {
    "a",    "an",   "and",  "are",   "as",    "at",    "be",    "but",   "by",    "for",
    "from", "had",  "has",  "have",  "he",    "her",   "his",   "i",     "if",    "in",
    "into", "is",   "it",   "its",   "me",    "my",    "no",    "not",   "of",    "on",
    "or",   "our",  "she",  "so",    "such",  "that",  "the",   "their", "then",  "there",
    "these", "they", "this", "to",   "was",   "we",    "were",  "what",  "when",  "which",
    "who",  "will", "with", "you",   "your",
};

}  // namespace

std::vector<std::string> tokenize(std::string_view input) {
    std::vector<std::string> out;
    std::string current;
    for (unsigned char c : input) {
        if (is_word_byte(c)) {
            current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

StopwordList::StopwordList() {
    for (const char* w : kDefaultStopwords) words_.insert(w);
}

StopwordList StopwordList::from_file(const std::filesystem::path& path) {
    std::istringstream in(fsutil::read_file(path));
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        auto w = trim(line);
        if (w.empty() || w[0] == '#') continue;
        words.insert(to_lower(w));
    }
    return StopwordList(std::move(words));
}

std::vector<std::string> StopwordList::filter(std::vector<std::string> tokens) const {
    std::erase_if(tokens, [this](const std::string& t) { return contains(t); });
    return tokens;
}

std::string slugify(std::string_view title) {
    std::string out;
    for (unsigned char c : title) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == ' ' || c == '-' || c == '_') {
            if (!out.empty() && out.back() != '-') out.push_back('-');
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> paragraphs(std::string_view body) {
    std::vector<std::string> out;
    std::string current;
    std::istringstream in{std::string(body)};
    std::string line;
    auto flush = [&] {
        auto p = trim(current);
        if (!p.empty()) out.push_back(std::move(p));
        current.clear();
    };
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            flush();
        } else {
            current += line;
            current += '\n';
        }
    }
    flush();
    return out;
}

}  // namespace semaclaw::text
