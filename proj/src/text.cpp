#include "toc/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "toc/error.hpp"

namespace toc {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::TargetNotFound: return "target-not-found";
        case ErrorCode::ScopeDestroying: return "scope-destroying";
        case ErrorCode::InvalidAction: return "invalid-action";
        case ErrorCode::AgentFailure: return "agent-failure";
        case ErrorCode::TransportFailure: return "transport-failure";
        case ErrorCode::NothingToEdit: return "nothing-to-edit";
        case ErrorCode::ExpansionFailure: return "expansion-failure";
        case ErrorCode::LoadError: return "load-error";
        case ErrorCode::ConfigError: return "config-error";
        case ErrorCode::InternalInvariant: return "internal-invariant";
    }
    return "unknown";
}

}  // namespace toc

namespace toc::text {

namespace {

// 50 English function words plus claim boilerplate connectives.
constexpr std::array<std::string_view, 50> kStopWords = {
    "a",       "an",       "the",        "and",        "or",        "but",    "of",
    "to",      "in",       "on",         "at",         "by",        "for",    "with",
    "from",    "into",     "onto",       "as",         "is",        "are",    "was",
    "were",    "be",       "been",       "being",      "it",        "its",    "this",
    "that",    "these",    "those",      "which",      "such",      "than",   "then",
    "each",    "any",      "all",        "not",        "only",      "said",   "wherein",
    "whereby", "comprising", "consisting", "including", "having",   "has",    "have",
    "further",
};

constexpr std::array<std::string_view, 12> kAbbreviations = {
    "fig", "figs", "e.g", "i.e", "etc", "no", "nos", "approx", "vs", "cf", "al", "ref",
};

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

const std::set<std::string, std::less<>>& stop_words() {
    static const std::set<std::string, std::less<>> words(kStopWords.begin(), kStopWords.end());
    return words;
}

bool is_stop_word(std::string_view token) { return stop_words().contains(token); }

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (is_word_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> content_tokens(std::string_view s) {
    auto tokens = word_tokens(s);
    std::erase_if(tokens, [](const std::string& t) { return is_stop_word(t); });
    return tokens;
}

std::set<std::string> content_token_set(std::string_view s) {
    auto tokens = content_tokens(s);
    return {tokens.begin(), tokens.end()};
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        auto piece = trim(s.substr(start, end - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        start = end;
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c != '.' && c != ';') continue;
        const bool at_end = i + 1 == s.size();
        if (!at_end && !std::isspace(static_cast<unsigned char>(s[i + 1]))) continue;
        if (c == '.') {
            // Walk back over the word preceding the period ("e.g" keeps its inner dot).
            std::size_t w = i;
            while (w > start && (is_word_char(static_cast<unsigned char>(s[w - 1])) || s[w - 1] == '.'))
                --w;
            const auto word = to_lower(s.substr(w, i - w));
            const bool abbrev =
                std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
            if (abbrev && !at_end) continue;
        }
        emit(i + 1);
    }
    if (start < s.size()) emit(s.size());
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

std::string format_2dp(double v) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.2f", v);
    return buf.data();
}

}  // namespace toc::text
