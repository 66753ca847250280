#pragma once

// JSON forms of the domain types shared by corpus files, results, audit
// trails and the HTTP API. Key order is fixed so output is byte-stable.

#include <string>

#include "json.hpp"

#include "toc/corpus.hpp"
#include "toc/search.hpp"

namespace toc {

using Json = nlohmann::ordered_json;

Json to_json(const ClaimElement& e);
Json to_json(const Claim& c);
Json to_json(const PriorArtDocument& d);
Json to_json(const EditAction& a);
Json to_json(const ReasoningChain& c);
Json to_json(const RewardComponents& c);
Json to_json(const RewardWeights& w);
Json to_json(const AuditRecord& r);
Json to_json(const SearchResult& r);
Json to_json(const NodeView& n);
Json to_json(const TreeSnapshot& s);
Json to_json(const InterventionItem& i);

ClaimElement element_from_json(const Json& j);
Claim claim_from_json(const Json& j);
EditAction action_from_json(const Json& j);
ReasoningChain chain_from_json(const Json& j);
RewardComponents components_from_json(const Json& j);
AuditRecord audit_from_json(const Json& j);

/// One compact JSON line (no trailing newline).
std::string audit_line(const AuditRecord& r);

}  // namespace toc
