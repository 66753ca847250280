#include "toc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "toc/error.hpp"
#include "toc/mock_backend.hpp"
#include "toc/serialize.hpp"
#include "toc/text.hpp"

namespace toc {

namespace {

class RecordReader {
public:
    RecordReader(std::size_t index, const LoadOptions& opts) : index_(index), opts_(opts) {}

    [[noreturn]] void fail(const std::string& field, const std::string& message) const {
        throw Error(ErrorCode::LoadError,
                    "record " + std::to_string(index_) + ", field '" + field + "': " + message);
    }

    void check_keys(const Json& obj, const std::string& ctx, std::initializer_list<std::string_view> allowed,
                    std::initializer_list<std::string_view> required) const {
        if (!obj.is_object()) fail(ctx, "expected an object");
        for (auto key : required)
            if (!obj.contains(std::string(key))) fail(join(ctx, key), "missing");
        for (const auto& [key, _] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
            if (opts_.strict) fail(join(ctx, key), "unknown key");
            if (opts_.warnings)
                opts_.warnings->push_back("record " + std::to_string(index_) + ": ignoring unknown key '" +
                                          join(ctx, key) + "'");
        }
    }

    std::string str(const Json& obj, const std::string& ctx, std::string_view key) const {
        const auto& v = obj.at(std::string(key));
        if (!v.is_string()) fail(join(ctx, key), "expected a string");
        return v.get<std::string>();
    }

    static std::string join(const std::string& ctx, std::string_view key) {
        return ctx.empty() ? std::string(key) : ctx + "." + std::string(key);
    }

private:
    std::size_t index_;
    const LoadOptions& opts_;
};

CorpusRecord read_record(const Json& j, std::size_t index, const LoadOptions& opts) {
    RecordReader rd(index, opts);
    rd.check_keys(j, "", {"claim", "prior_art", "gold_labels"}, {"claim", "prior_art"});
    CorpusRecord rec;

    const auto& cj = j.at("claim");
    rd.check_keys(cj, "claim", {"claim_id", "raw_text", "elements"}, {"claim_id", "raw_text", "elements"});
    rec.claim.claim_id = rd.str(cj, "claim", "claim_id");
    rec.claim.raw_text = rd.str(cj, "claim", "raw_text");
    if (rec.claim.claim_id.empty()) rd.fail("claim.claim_id", "must not be empty");
    if (!cj.at("elements").is_array()) rd.fail("claim.elements", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < cj.at("elements").size(); ++i) {
        const auto ctx = "claim.elements[" + std::to_string(i) + "]";
        const auto& ej = cj.at("elements")[i];
        rd.check_keys(ej, ctx, {"element_id", "element_type", "text"}, {"element_id", "element_type", "text"});
        ClaimElement e{rd.str(ej, ctx, "element_id"), rd.str(ej, ctx, "element_type"), rd.str(ej, ctx, "text")};
        if (e.element_id.empty()) rd.fail(ctx + ".element_id", "must not be empty");
        if (text::trim(e.text).empty()) rd.fail(ctx + ".text", "must not be empty");
        if (!ids.insert(e.element_id).second) rd.fail(ctx + ".element_id", "duplicate id " + e.element_id);
        rec.claim.elements.push_back(std::move(e));
    }
    if (rec.claim.elements.empty()) {
        rec.claim.elements = decompose_claim(rec.claim.raw_text);
        if (rec.claim.elements.empty()) rd.fail("claim.raw_text", "claim has no elements");
        for (const auto& e : rec.claim.elements) ids.insert(e.element_id);
    }

    const auto& pj = j.at("prior_art");
    if (!pj.is_array()) rd.fail("prior_art", "expected an array");
    std::set<std::string> doc_ids;
    for (std::size_t i = 0; i < pj.size(); ++i) {
        const auto ctx = "prior_art[" + std::to_string(i) + "]";
        const auto& dj = pj[i];
        rd.check_keys(dj, ctx, {"doc_id", "title", "description", "figure_refs"}, {"doc_id", "description"});
        PriorArtDocument d;
        d.doc_id = rd.str(dj, ctx, "doc_id");
        if (dj.contains("title")) d.title = rd.str(dj, ctx, "title");
        d.description = rd.str(dj, ctx, "description");
        if (dj.contains("figure_refs")) {
            if (!dj.at("figure_refs").is_array()) rd.fail(ctx + ".figure_refs", "expected an array");
            for (const auto& f : dj.at("figure_refs")) {
                if (!f.is_string()) rd.fail(ctx + ".figure_refs", "expected strings");
                d.figure_refs.push_back(f.get<std::string>());
            }
        }
        if (d.doc_id.empty()) rd.fail(ctx + ".doc_id", "must not be empty");
        if (!doc_ids.insert(d.doc_id).second) rd.fail(ctx + ".doc_id", "duplicate id " + d.doc_id);
        rec.prior_art.push_back(std::move(d));
    }

    if (j.contains("gold_labels")) {
        const auto& gj = j.at("gold_labels");
        if (!gj.is_array()) rd.fail("gold_labels", "expected an array");
        std::vector<LabeledInstance> labels;
        for (std::size_t i = 0; i < gj.size(); ++i) {
            const auto ctx = "gold_labels[" + std::to_string(i) + "]";
            const auto& lj = gj[i];
            rd.check_keys(lj, ctx, {"element_id", "disclosed", "evidence", "justification"},
                          {"element_id", "disclosed"});
            const auto id = rd.str(lj, ctx, "element_id");
            const auto* el = rec.claim.find(id);
            if (!el) rd.fail(ctx + ".element_id", "unknown element " + id);
            if (!lj.at("disclosed").is_boolean()) rd.fail(ctx + ".disclosed", "expected a boolean");
            LabeledInstance li;
            li.element = *el;
            li.disclosed = lj.at("disclosed").get<bool>();
            if (lj.contains("evidence")) li.evidence = rd.str(lj, ctx, "evidence");
            if (lj.contains("justification")) li.justification = rd.str(lj, ctx, "justification");
            labels.push_back(std::move(li));
        }
        rec.gold_labels = std::move(labels);
    }
    return rec;
}

}  // namespace

std::vector<CorpusRecord> parse_corpus(std::string_view json_text, const LoadOptions& opts) {
    Json root;
    try {
        root = Json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::LoadError, std::string("corpus is not valid JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("records") || !root.at("records").is_array())
        throw Error(ErrorCode::LoadError, "corpus must be an object with a \"records\" array");
    for (const auto& [key, _] : root.items()) {
        if (key == "records") continue;
        if (opts.strict) throw Error(ErrorCode::LoadError, "unknown top-level key '" + key + "'");
        if (opts.warnings) opts.warnings->push_back("ignoring unknown top-level key '" + key + "'");
    }
    std::vector<CorpusRecord> out;
    std::set<std::string> claim_ids;
    const auto& records = root.at("records");
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto rec = read_record(records[i], i, opts);
        if (!claim_ids.insert(rec.claim.claim_id).second)
            throw Error(ErrorCode::LoadError, "record " + std::to_string(i) + ", field 'claim.claim_id': duplicate id " +
                                                  rec.claim.claim_id);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path, const LoadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::LoadError, "cannot open corpus " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_corpus(ss.str(), opts);
}

std::string dump_corpus(const std::vector<CorpusRecord>& records) {
    Json arr = Json::array();
    for (const auto& r : records) {
        Json docs = Json::array();
        for (const auto& d : r.prior_art) docs.push_back(to_json(d));
        Json rec{{"claim", to_json(r.claim)}, {"prior_art", std::move(docs)}};
        if (r.gold_labels) {
            Json labels = Json::array();
            for (const auto& l : *r.gold_labels)
                labels.push_back(Json{{"element_id", l.element.element_id},
                                      {"disclosed", l.disclosed},
                                      {"evidence", l.evidence},
                                      {"justification", l.justification}});
            rec["gold_labels"] = std::move(labels);
        }
        arr.push_back(std::move(rec));
    }
    return Json{{"records", std::move(arr)}}.dump(2) + "\n";
}

void save_corpus(const std::filesystem::path& path, const std::vector<CorpusRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::LoadError, "cannot write corpus " + path.string());
    out << dump_corpus(records);
}

double tf_cosine(std::string_view a, std::string_view b) {
    std::map<std::string, double> va;
    std::map<std::string, double> vb;
    for (const auto& t : text::content_tokens(a)) va[t] += 1.0;
    for (const auto& t : text::content_tokens(b)) vb[t] += 1.0;
    if (va.empty() || vb.empty()) return 0.0;
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [t, x] : va) {
        na += x * x;
        if (auto it = vb.find(t); it != vb.end()) dot += x * it->second;
    }
    for (const auto& [_, y] : vb) nb += y * y;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::vector<EvidencePassage> filter_evidence(const ClaimElement& element, const PriorArtDocument& doc, int top_k,
                                             const SimilarityBackend& backend) {
    if (top_k < 1) throw Error(ErrorCode::InvalidInput, "top_k must be at least 1");
    std::vector<EvidencePassage> scored;
    for (auto& s : text::split_sentences(doc.description)) {
        const double score = backend.similarity(element.text, s);
        scored.push_back({doc.doc_id, std::move(s), score});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const EvidencePassage& a, const EvidencePassage& b) { return a.score > b.score; });
    if (scored.size() > static_cast<std::size_t>(top_k)) scored.resize(static_cast<std::size_t>(top_k));
    return scored;
}

// ---------------------------------------------------------------------------

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    int uniform(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }

private:
    std::mt19937_64 eng_;
};

// Invented words from a syllable inventory; never English function words and
// never terms used by the mock editor banks.
class WordSource {
public:
    explicit WordSource(Rng& rng) : rng_(rng) {
        for (const auto& s : novel_feature_bank())
            for (const auto& t : text::word_tokens(s)) reserved_.insert(t);
        for (const auto& s : limitation_bank())
            for (const auto& t : text::word_tokens(s)) reserved_.insert(t);
        for (const auto& [from, to] : synonym_table()) {
            for (const auto& t : text::word_tokens(from)) reserved_.insert(t);
            for (const auto& t : text::word_tokens(to)) reserved_.insert(t);
        }
    }

    std::string fresh() {
        static const char* const kSyllables[] = {"ka", "lo", "mi", "ren", "tus", "vor", "zel", "dar", "pio",
                                                 "qua", "sen", "bri", "tol", "nex", "fal", "gor", "hin", "jus",
                                                 "wen", "cyr", "mol", "dex", "rah", "sol"};
        constexpr int n = static_cast<int>(std::size(kSyllables));
        while (true) {
            std::string w;
            const int parts = rng_.uniform(2, 3);
            for (int i = 0; i < parts; ++i) w += kSyllables[rng_.uniform(0, n - 1)];
            if (text::is_stop_word(w) || reserved_.contains(w) || used_.contains(w)) continue;
            used_.insert(w);
            return w;
        }
    }

    std::vector<std::string> fresh(int n) {
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i) out.push_back(fresh());
        return out;
    }

private:
    Rng& rng_;
    std::set<std::string> reserved_;
    std::set<std::string> used_;
};

std::string join_words(const std::vector<std::string>& w, std::size_t from = 0, std::size_t to = std::string::npos) {
    std::string out;
    for (std::size_t i = from; i < std::min(to, w.size()); ++i) out += (out.empty() ? "" : " ") + w[i];
    return out;
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

enum class Planned { Full, Borderline, Partial, None };

}  // namespace

std::vector<CorpusRecord> generate_synthetic(std::uint64_t seed, int n_records, const SyntheticSpec& spec) {
    if (n_records < 1) throw Error(ErrorCode::InvalidInput, "n_records must be at least 1");
    if (spec.min_elements < 2 || spec.max_elements < spec.min_elements || spec.min_docs < 1 ||
        spec.max_docs < spec.min_docs)
        throw Error(ErrorCode::InvalidInput, "invalid synthetic size parameters");
    if (spec.min_disclosed < 0 || spec.min_disclosed > spec.min_elements - 1 ||
        (spec.max_disclosed > 0 && spec.min_disclosed > spec.max_disclosed))
        throw Error(ErrorCode::InvalidInput, "min_disclosed must fit the smallest claim and max_disclosed");

    std::vector<CorpusRecord> out;
    for (int r = 0; r < n_records; ++r) {
        Rng rng(text::mix64(seed ^ text::mix64(static_cast<std::uint64_t>(r) + 1)));
        WordSource words(rng);
        CorpusRecord rec;
        rec.claim.claim_id = "syn-" + std::to_string(seed) + "-" + std::to_string(r + 1);

        const int n_elements = rng.uniform(spec.min_elements, spec.max_elements);
        const int n_docs = rng.uniform(spec.min_docs, spec.max_docs);

        std::vector<ClaimElement> elements;
        elements.push_back({"e1", std::string(kPreambleType), "An apparatus for " + join_words(words.fresh(2)) +
                                                                   ", comprising"});
        std::vector<std::vector<std::string>> body_words;
        std::vector<Planned> plan;
        int disclosed = 0;
        for (int i = 1; i < n_elements; ++i) {
            auto w = words.fresh(rng.uniform(4, 5));
            Planned p = Planned::None;
            const bool allow = spec.max_disclosed <= 0 || disclosed < spec.max_disclosed;
            const bool force = disclosed + (n_elements - i) <= spec.min_disclosed;
            const bool roll = rng.chance(spec.disclosed_rate);
            if (allow && (force || roll)) {
                ++disclosed;
                if (rng.chance(spec.partial_rate))
                    p = Planned::Partial;
                else if (rng.chance(spec.borderline_rate))
                    p = Planned::Borderline;
                else
                    p = Planned::Full;
            }
            if (p == Planned::Borderline && w.size() != 5) w.push_back(words.fresh());
            std::string t = "a " + join_words(w, 0, 2) + " for " + join_words(w, 2);
            if (i + 1 == n_elements) t += ".";
            elements.push_back({"e" + std::to_string(i + 1), "element", t});
            body_words.push_back(std::move(w));
            plan.push_back(p);
        }
        rec.claim.elements = elements;
        rec.claim.raw_text = render(elements);

        // Sentences per document: designed evidence plus unrelated filler.
        std::vector<std::vector<std::string>> doc_sentences(static_cast<std::size_t>(n_docs));
        std::vector<std::string> evidence(body_words.size());
        for (std::size_t i = 0; i < body_words.size(); ++i) {
            const auto& w = body_words[i];
            std::vector<std::string> shown;
            switch (plan[i]) {
                case Planned::Full: shown = w; break;
                case Planned::Borderline: shown.assign(w.begin(), w.begin() + 4); break;
                case Planned::Partial:
                    // 2 of 4 or 3 of 5 terms: inside [0.4, 0.8).
                    shown.assign(w.begin(), w.begin() + (w.size() == 4 ? 2 : 3));
                    break;
                case Planned::None: break;
            }
            if (shown.empty()) continue;
            const auto extra = words.fresh(2);
            std::string sentence = "The " + join_words(shown) + " unit uses " + join_words(extra) + ".";
            evidence[i] = sentence;
            doc_sentences[static_cast<std::size_t>(rng.uniform(0, n_docs - 1))].push_back(sentence);
        }
        for (auto& sentences : doc_sentences) {
            const int fillers = rng.uniform(1, 2);
            for (int f = 0; f < fillers; ++f) {
                auto s = capitalize(join_words(words.fresh(3))) + " is described in detail.";
                const auto at = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(sentences.size())));
                sentences.insert(sentences.begin() + static_cast<long>(at), std::move(s));
            }
        }
        for (int d = 0; d < n_docs; ++d) {
            PriorArtDocument doc;
            doc.doc_id = "D" + std::to_string(d + 1);
            doc.title = capitalize(join_words(words.fresh(2)));
            std::string desc;
            for (const auto& s : doc_sentences[static_cast<std::size_t>(d)]) desc += (desc.empty() ? "" : " ") + s;
            doc.description = desc;
            doc.figure_refs = {"FIG. 1"};
            rec.prior_art.push_back(std::move(doc));
        }

        std::vector<LabeledInstance> labels;
        labels.push_back({elements[0], false, "", "Preamble terms absent from every document."});
        for (std::size_t i = 0; i < body_words.size(); ++i) {
            LabeledInstance li;
            li.element = elements[i + 1];
            li.disclosed = plan[i] != Planned::None;
            li.evidence = evidence[i];
            switch (plan[i]) {
                case Planned::Full: li.justification = "All terms appear in one sentence."; break;
                case Planned::Borderline: li.justification = "Four of five terms appear in one sentence."; break;
                case Planned::Partial: li.justification = "Some terms appear in one sentence."; break;
                case Planned::None: li.justification = "No document mentions these terms."; break;
            }
            labels.push_back(std::move(li));
        }
        rec.gold_labels = std::move(labels);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace toc
