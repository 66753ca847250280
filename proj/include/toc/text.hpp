#pragma once

// Shared lexical utilities: tokenization, the stop-word resource, sentence
// splitting, stable hashing and number formatting.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace toc::text {

/// Version tag of the bundled stop-word list. Bump when the list changes.
inline constexpr std::string_view kStopWordsVersion = "toc-stopwords-v1";

const std::set<std::string, std::less<>>& stop_words();
bool is_stop_word(std::string_view token);

/// Lowercased alphanumeric runs, in order, duplicates kept.
std::vector<std::string> word_tokens(std::string_view s);

/// word_tokens minus stop words.
std::vector<std::string> content_tokens(std::string_view s);
std::set<std::string> content_token_set(std::string_view s);

/// Lowercased whitespace-delimited tokens (metric tokenization).
std::vector<std::string> whitespace_tokens(std::string_view s);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Splits on ". " and "; " (and at end of text), keeping the terminal
/// punctuation. Abbreviations such as "Fig." or "e.g." do not end a sentence.
/// Every returned sentence is a verbatim substring of the input.
std::vector<std::string> split_sentences(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// SplitMix64 finalizer, used to derive independent streams from a hash.
std::uint64_t mix64(std::uint64_t x);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Fixed two-decimal rendering ("0.80").
std::string format_2dp(double v);

}  // namespace toc::text
