#include "toc/claim.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include "toc/error.hpp"
#include "toc/text.hpp"

namespace toc {

namespace {

constexpr std::array<std::string_view, 10> kOperationNames = {
    "AddNovelFeature", "ReplaceSynonym", "ReframeViaFigure", "DropElement",        "MergeElements",
    "SplitElement",    "AddLimitation",  "ModifyRelationship", "ChangeOrder",      "AddDependency",
};

struct Boundary {
    std::size_t preamble_end;  // exclusive, excludes the colon
    std::size_t body_begin;
};

// Locates "comprising:" / "consisting of:" at parenthesis depth 0.
std::optional<Boundary> find_preamble_boundary(std::string_view t) {
    static constexpr std::array<std::string_view, 2> kKeywords = {"comprising", "consisting of"};
    int depth = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const char c = t[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') depth = std::max(0, depth - 1);
        if (depth != 0) continue;
        for (auto kw : kKeywords) {
            if (!text::starts_with_ci(t.substr(i), kw)) continue;
            if (i > 0 && std::isalnum(static_cast<unsigned char>(t[i - 1]))) continue;
            std::size_t j = i + kw.size();
            while (j < t.size() && t[j] == ' ') ++j;
            if (j < t.size() && t[j] == ':') return Boundary{i + kw.size(), j + 1};
        }
    }
    return std::nullopt;
}

std::vector<std::string> split_top_level_semicolons(std::string_view t) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= t.size(); ++i) {
        if (i < t.size()) {
            const char c = t[i];
            if (c == '(' || c == '[') ++depth;
            if (c == ')' || c == ']') depth = std::max(0, depth - 1);
            if (c != ';' || depth != 0) continue;
        }
        auto piece = text::trim(t.substr(start, i - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        start = i + 1;
    }
    return out;
}

std::string body_element_type(std::string_view piece) {
    if (text::starts_with_ci(piece, "wherein")) return "limitation";
    if (text::starts_with_ci(piece, "further comprising") ||
        text::starts_with_ci(piece, "and further comprising"))
        return "additional element";
    return "element";
}

std::size_t index_of(const std::vector<ClaimElement>& elements, std::string_view id) {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].element_id == id) return i;
    return elements.size();
}

std::string fresh_id(const std::vector<ClaimElement>& elements, const std::string& base) {
    std::string id = base;
    while (index_of(elements, id) != elements.size()) id += "'";
    return id;
}

std::string require_text(std::string_view modified_text, EditOperationType op) {
    auto t = text::trim(modified_text);
    if (t.empty())
        throw Error(ErrorCode::InvalidAction, std::string(to_string(op)) + " requires non-empty modified_text");
    return t;
}

std::vector<std::string> raw_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

const ClaimElement* Claim::find(std::string_view element_id) const {
    for (const auto& e : elements)
        if (e.element_id == element_id) return &e;
    return nullptr;
}

std::string_view to_string(EditOperationType op) noexcept {
    return kOperationNames[static_cast<std::size_t>(op)];
}

std::optional<EditOperationType> parse_operation_type(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kOperationNames.size(); ++i)
        if (kOperationNames[i] == s) return static_cast<EditOperationType>(i);
    return std::nullopt;
}

std::vector<std::string> EditAction::targets() const {
    std::vector<std::string> out;
    for (auto& part : text::split(target_element_id, ',')) {
        auto t = text::trim(part);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::vector<PrecedenceRule> default_precedence_rules() {
    return {{EditOperationType::AddNovelFeature, EditOperationType::ReplaceSynonym}};
}

bool is_acyclic(const std::vector<PrecedenceRule>& rules) {
    std::map<EditOperationType, std::vector<EditOperationType>> edges;
    for (const auto& r : rules) edges[r.before].push_back(r.after);
    // 0 = unvisited, 1 = on stack, 2 = done
    std::map<EditOperationType, int> state;
    auto visit = [&](auto&& self, EditOperationType v) -> bool {
        state[v] = 1;
        for (auto w : edges[v]) {
            if (state[w] == 1) return false;
            if (state[w] == 0 && !self(self, w)) return false;
        }
        state[v] = 2;
        return true;
    };
    for (auto op : kAllOperationTypes)
        if (state[op] == 0 && !visit(visit, op)) return false;
    return true;
}

std::vector<ClaimElement> decompose_claim(std::string_view raw_text) {
    const auto t = text::trim(raw_text);
    if (t.empty()) throw Error(ErrorCode::InvalidInput, "claim text is empty");

    std::vector<ClaimElement> out;
    std::string_view body = t;
    if (auto b = find_preamble_boundary(t)) {
        out.push_back({"e1", std::string(kPreambleType), text::trim(std::string_view(t).substr(0, b->preamble_end))});
        body = std::string_view(t).substr(b->body_begin);
    }
    for (auto& piece : split_top_level_semicolons(body)) {
        auto type = body_element_type(piece);
        out.push_back({"e" + std::to_string(out.size() + 1), std::move(type), std::move(piece)});
    }
    if (out.empty()) throw Error(ErrorCode::InvalidInput, "claim text has no elements");
    return out;
}

Claim make_claim(std::string claim_id, std::string_view raw_text) {
    Claim c;
    c.claim_id = std::move(claim_id);
    c.elements = decompose_claim(raw_text);
    c.raw_text = render(c.elements);
    return c;
}

std::string render(const std::vector<ClaimElement>& elements) {
    std::string out;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (i > 0) out += elements[i - 1].element_type == kPreambleType ? ": " : "; ";
        out += elements[i].text;
    }
    return out;
}

Claim with_elements(const Claim& base, std::vector<ClaimElement> elements) {
    Claim c;
    c.claim_id = base.claim_id;
    c.elements = std::move(elements);
    c.raw_text = render(c.elements);
    return c;
}

std::pair<std::string, std::string> split_terminal(std::string_view t) {
    auto s = text::trim(t);
    if (!s.empty() && s.back() == '.') return {text::trim(std::string_view(s).substr(0, s.size() - 1)), "."};
    return {s, ""};
}

Claim apply_action(const Claim& claim, const EditAction& action) {
    const auto targets = action.targets();
    if (targets.empty()) throw Error(ErrorCode::InvalidAction, "action has no target element");
    for (const auto& id : targets)
        if (!claim.find(id)) throw Error(ErrorCode::TargetNotFound, "unknown element id '" + id + "'");

    auto elements = claim.elements;
    const auto first = index_of(elements, targets.front());
    const auto op = action.op_type;

    auto require_single = [&] {
        if (targets.size() != 1)
            throw Error(ErrorCode::InvalidAction, std::string(to_string(op)) + " takes exactly one target");
    };

    switch (op) {
        case EditOperationType::AddNovelFeature:
        case EditOperationType::ReplaceSynonym:
        case EditOperationType::ReframeViaFigure:
        case EditOperationType::AddLimitation:
        case EditOperationType::ModifyRelationship:
            require_single();
            elements[first].text = require_text(action.modified_text, op);
            break;

        case EditOperationType::DropElement:
            require_single();
            if (elements.size() == 1)
                throw Error(ErrorCode::ScopeDestroying, "cannot drop the last remaining element");
            elements.erase(elements.begin() + static_cast<std::ptrdiff_t>(first));
            break;

        case EditOperationType::MergeElements: {
            std::set<std::string> distinct(targets.begin(), targets.end());
            if (targets.size() < 2 || distinct.size() != targets.size())
                throw Error(ErrorCode::InvalidAction, "MergeElements needs at least two distinct targets");
            elements[first].text = require_text(action.modified_text, op);
            std::erase_if(elements, [&](const ClaimElement& e) {
                return e.element_id != targets.front() && distinct.contains(e.element_id);
            });
            break;
        }

        case EditOperationType::SplitElement: {
            require_single();
            if (action.modified_text.find(kSplitMarker) == std::string::npos)
                throw Error(ErrorCode::InvalidAction, "SplitElement payload lacks the '||' marker");
            std::vector<std::string> pieces;
            std::string_view rest = action.modified_text;
            for (;;) {
                auto pos = rest.find(kSplitMarker);
                pieces.push_back(text::trim(rest.substr(0, pos)));
                if (pos == std::string_view::npos) break;
                rest = rest.substr(pos + kSplitMarker.size());
            }
            if (pieces.size() < 2 || std::any_of(pieces.begin(), pieces.end(), [](auto& p) { return p.empty(); }))
                throw Error(ErrorCode::InvalidAction, "SplitElement produced an empty piece");
            const auto original = elements[first];
            elements.erase(elements.begin() + static_cast<std::ptrdiff_t>(first));
            std::vector<ClaimElement> replacement;
            for (std::size_t k = 0; k < pieces.size(); ++k) {
                ClaimElement e;
                e.element_id = original.element_id + "." + std::to_string(k + 1);
                e.element_type = k == 0 ? original.element_type : "element";
                e.text = std::move(pieces[k]);
                replacement.push_back(std::move(e));
            }
            for (auto& e : replacement) e.element_id = fresh_id(elements, e.element_id);
            elements.insert(elements.begin() + static_cast<std::ptrdiff_t>(first), replacement.begin(),
                            replacement.end());
            break;
        }

        case EditOperationType::ChangeOrder: {
            std::vector<std::string> ids;
            for (auto& part : text::split(action.modified_text, ',')) ids.push_back(text::trim(part));
            for (const auto& id : ids)
                if (index_of(elements, id) == elements.size())
                    throw Error(ErrorCode::TargetNotFound, "ChangeOrder references unknown id '" + id + "'");
            if (ids.size() == 2) {
                std::swap(elements[index_of(elements, ids[0])], elements[index_of(elements, ids[1])]);
                break;
            }
            std::set<std::string> distinct(ids.begin(), ids.end());
            if (ids.size() != elements.size() || distinct.size() != ids.size())
                throw Error(ErrorCode::InvalidAction, "ChangeOrder needs a two-id swap or a full permutation");
            std::vector<ClaimElement> reordered;
            for (const auto& id : ids) reordered.push_back(claim.elements[index_of(claim.elements, id)]);
            elements = std::move(reordered);
            break;
        }

        case EditOperationType::AddDependency: {
            require_single();
            auto clause = require_text(action.modified_text, op);
            auto [body, terminal] = split_terminal(elements[first].text);
            elements[first].text = body + ", " + clause + terminal;
            break;
        }
    }
    return with_elements(claim, std::move(elements));
}

std::vector<PrecedenceViolation> validate_sequence(const std::vector<EditAction>& history,
                                                   const std::vector<PrecedenceRule>& rules) {
    std::vector<PrecedenceViolation> out;
    for (const auto& rule : rules) {
        if (rule.before == rule.after) continue;
        for (std::size_t i = 0; i < history.size(); ++i) {
            if (history[i].op_type != rule.after) continue;
            const auto early_targets = history[i].targets();
            for (std::size_t j = i + 1; j < history.size(); ++j) {
                if (history[j].op_type != rule.before) continue;
                for (const auto& id : history[j].targets()) {
                    if (std::find(early_targets.begin(), early_targets.end(), id) != early_targets.end()) {
                        out.push_back({i, j, rule, id});
                        break;
                    }
                }
            }
        }
    }
    return out;
}

bool ClaimDiff::empty() const {
    if (!added.empty() || !removed.empty() || !modified.empty() || reordered) return false;
    return std::all_of(tokens.begin(), tokens.end(), [](const TokenEdit& t) { return t.kind == TokenEdit::Kind::Keep; });
}

std::vector<std::string> ClaimDiff::inserted_tokens() const {
    std::vector<std::string> out;
    for (const auto& t : tokens)
        if (t.kind == TokenEdit::Kind::Insert) out.push_back(t.token);
    return out;
}

std::vector<std::string> ClaimDiff::deleted_tokens() const {
    std::vector<std::string> out;
    for (const auto& t : tokens)
        if (t.kind == TokenEdit::Kind::Delete) out.push_back(t.token);
    return out;
}

ClaimDiff diff_claims(const Claim& a, const Claim& b) {
    ClaimDiff d;
    std::vector<std::string> common_a;
    for (const auto& e : a.elements) {
        const auto* other = b.find(e.element_id);
        if (!other) {
            d.removed.push_back(e.element_id);
            continue;
        }
        common_a.push_back(e.element_id);
        if (other->text != e.text || other->element_type != e.element_type) d.modified.push_back(e.element_id);
    }
    std::vector<std::string> common_b;
    for (const auto& e : b.elements) {
        if (!a.find(e.element_id))
            d.added.push_back(e.element_id);
        else
            common_b.push_back(e.element_id);
    }
    d.reordered = common_a != common_b;

    const auto ta = raw_tokens(a.raw_text);
    const auto tb = raw_tokens(b.raw_text);
    std::vector<std::vector<int>> lcs(ta.size() + 1, std::vector<int>(tb.size() + 1, 0));
    for (std::size_t i = ta.size(); i-- > 0;)
        for (std::size_t j = tb.size(); j-- > 0;)
            lcs[i][j] = ta[i] == tb[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    std::size_t i = 0, j = 0;
    while (i < ta.size() || j < tb.size()) {
        if (i < ta.size() && j < tb.size() && ta[i] == tb[j]) {
            d.tokens.push_back({TokenEdit::Kind::Keep, ta[i]});
            ++i, ++j;
        } else if (j < tb.size() && (i == ta.size() || lcs[i][j + 1] >= lcs[i + 1][j])) {
            d.tokens.push_back({TokenEdit::Kind::Insert, tb[j]});
            ++j;
        } else {
            d.tokens.push_back({TokenEdit::Kind::Delete, ta[i]});
            ++i;
        }
    }
    return d;
}

}  // namespace toc
