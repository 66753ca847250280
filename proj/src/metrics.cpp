#include "toc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "toc/error.hpp"
#include "toc/text.hpp"

namespace toc {

double coverage_f1(const std::vector<DisclosureStatus>& predicted, const std::vector<bool>& gold) {
    if (predicted.size() != gold.size()) throw Error(ErrorCode::InvalidInput, "coverage_f1 needs equal lengths");
    int tp = 0;
    int fp = 0;
    int fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = is_disclosed(predicted[i]);
        if (p && gold[i]) ++tp;
        if (p && !gold[i]) ++fp;
        if (!p && gold[i]) ++fn;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / (tp + fp);
    const double recall = static_cast<double>(tp) / (tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

double delta_coverage(double before, double after) { return after - before; }

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference) {
    const auto c = text::whitespace_tokens(candidate);
    const auto r = text::whitespace_tokens(reference);
    if (c.empty() || r.empty()) return 0.0;
    const auto l = static_cast<double>(lcs_length(c, r));
    if (l == 0.0) return 0.0;
    const double p = l / static_cast<double>(c.size());
    const double rec = l / static_cast<double>(r.size());
    return 2.0 * p * rec / (p + rec);
}

double bleu(std::string_view candidate, std::string_view reference) {
    const auto c = text::whitespace_tokens(candidate);
    const auto r = text::whitespace_tokens(reference);
    if (c.empty() || r.empty()) return 0.0;

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::map<std::vector<std::string>, int> ref_counts;
        if (r.size() >= n)
            for (std::size_t i = 0; i + n <= r.size(); ++i) ++ref_counts[{r.begin() + static_cast<long>(i), r.begin() + static_cast<long>(i + n)}];
        std::map<std::vector<std::string>, int> cand_counts;
        if (c.size() >= n)
            for (std::size_t i = 0; i + n <= c.size(); ++i) ++cand_counts[{c.begin() + static_cast<long>(i), c.begin() + static_cast<long>(i + n)}];
        double matched = 0.0;
        double total = 0.0;
        for (const auto& [gram, count] : cand_counts) {
            total += count;
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matched += std::min(count, it->second);
        }
        double p;
        if (n == 1) {
            if (matched == 0.0) return 0.0;
            p = matched / total;
        } else {
            p = (matched + 1.0) / (total + 1.0);
        }
        log_sum += 0.25 * std::log(p);
    }
    const auto cl = static_cast<double>(c.size());
    const auto rl = static_cast<double>(r.size());
    const double bp = cl > rl ? 1.0 : std::exp(1.0 - rl / cl);
    return bp * std::exp(log_sum);
}

double json_completeness(const std::vector<std::string>& raw_responses, AgentSchema schema) {
    if (raw_responses.empty()) return 1.0;
    std::size_t ok = 0;
    for (const auto& r : raw_responses) ok += validate_agent_json(r, schema).ok() ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(raw_responses.size());
}

double chain_entropy(const std::vector<ReasoningChain>& chains) {
    if (chains.empty()) return 0.0;
    std::map<DisclosureStatus, int> counts;
    for (const auto& c : chains) ++counts[c.status];
    const auto n = static_cast<double>(chains.size());
    double h = 0.0;
    for (const auto& [_, k] : counts) {
        const double p = k / n;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace toc
