#pragma once

// Exhaustive string pairs over a 3-token alphabet and a brute-force LCS by
// subsequence enumeration.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toc/metrics.hpp"

namespace lcs_oracle {

/// Every string over {x, y, z} of length 0..8, as token lists.
inline std::vector<std::vector<int>> all_strings() {
    std::vector<std::vector<int>> out{{}};
    for (int len = 1; len <= 8; ++len) {
        int n = 1;
        for (int i = 0; i < len; ++i) n *= 3;
        for (int code = 0; code < n; ++code) {
            std::vector<int> s;
            for (int i = 0, x = code; i < len; ++i, x /= 3) s.push_back(x % 3);
            out.push_back(s);
        }
    }
    return out;
}

inline std::string render(const std::vector<int>& s) {
    std::string out;
    for (int t : s) {
        if (!out.empty()) out += ' ';
        out += "xYz"[t];  // mixed case: tokens are compared lowercased
    }
    return out;
}

/// Brute force: mark every subsequence of each string, then the LCS of a pair
/// is the longest string marked for both.
class SubsequenceOracle {
public:
    explicit SubsequenceOracle(const std::vector<std::vector<int>>& strings) {
        // Index strings longest first so the first common bit is the longest.
        std::vector<std::size_t> order(strings.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](auto a, auto b) { return strings[a].size() > strings[b].size(); });
        std::map<std::vector<int>, std::size_t> slot;
        for (std::size_t k = 0; k < order.size(); ++k) {
            slot[strings[order[k]]] = k;
            length_of_.push_back(strings[order[k]].size());
        }
        words_ = (strings.size() + 63) / 64;
        bits_.assign(strings.size() * words_, 0);
        for (std::size_t i = 0; i < strings.size(); ++i) {
            const auto& s = strings[i];
            for (unsigned mask = 0; mask < (1u << s.size()); ++mask) {
                std::vector<int> sub;
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (mask & (1u << j)) sub.push_back(s[j]);
                const auto k = slot.at(sub);
                bits_[i * words_ + k / 64] |= std::uint64_t{1} << (k % 64);
            }
        }
    }

    std::size_t lcs(std::size_t a, std::size_t b) const {
        for (std::size_t w = 0; w < words_; ++w) {
            const auto common = bits_[a * words_ + w] & bits_[b * words_ + w];
            if (common) return length_of_[w * 64 + static_cast<std::size_t>(__builtin_ctzll(common))];
        }
        return 0;
    }

private:
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::size_t> length_of_;
};

/// Tokens renamed in order of first appearance are 0, 1, 2, ...
inline bool first_appearance_order(const std::vector<int>& s) {
    int next = 0;
    for (int t : s) {
        if (t > next) return false;
        if (t == next) ++next;
    }
    return true;
}

struct Sweep {
    long pairs = 0;
    long mismatches = 0;
};

/// rouge_l against the oracle for every candidate whose tokens first appear
/// in the order x, y, z and every reference. Any other candidate is one of
/// these under a consistent renaming of the alphabet, which leaves the score
/// unchanged because tokens are only ever compared for equality.
inline Sweep sweep_rouge_l() {
    const auto strings = all_strings();
    const SubsequenceOracle oracle(strings);
    std::vector<std::string> texts;
    for (const auto& s : strings) texts.push_back(render(s));
    Sweep out;
    for (std::size_t a = 0; a < strings.size(); ++a) {
        if (!first_appearance_order(strings[a])) continue;
        for (std::size_t b = 0; b < strings.size(); ++b) {
            const double l = static_cast<double>(oracle.lcs(a, b));
            double expected = 0.0;
            if (l > 0) {
                const double p = l / static_cast<double>(strings[a].size());
                const double r = l / static_cast<double>(strings[b].size());
                expected = 2 * p * r / (p + r);
            }
            if (toc::rouge_l(texts[a], texts[b]) != expected) ++out.mismatches;
            ++out.pairs;
        }
    }
    return out;
}

}  // namespace lcs_oracle
