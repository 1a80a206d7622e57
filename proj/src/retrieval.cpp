#include "pathnat/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pathnat {

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words{
        "a",     "about", "above", "after", "again", "against", "all",    "am",    "an",    "and",   "any",
        "are",   "as",    "at",    "be",    "because", "been",  "before", "being", "below", "between", "both",
        "but",   "by",    "can",   "could", "did",   "do",      "does",  "doing", "down",  "during", "each",
        "few",   "for",   "from",  "further", "had", "has",     "have",  "having", "he",   "her",   "here",
        "hers",  "herself", "him", "himself", "his", "how",     "i",     "if",    "in",    "into",  "is",
        "it",    "its",   "itself", "just", "me",    "more",    "most",  "my",    "myself", "no",   "nor",
        "not",   "now",   "of",    "off",   "on",    "once",    "only",  "or",    "other", "our",   "ours",
        "ourselves", "out", "over", "own",  "same",  "she",     "should", "so",   "some",  "such",  "than",
        "that",  "the",   "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
        "those", "through", "to",  "too",   "under", "until",   "up",    "very",  "was",   "we",    "were",
        "what",  "when",  "where", "which", "while", "who",     "whom",  "why",   "will",  "with",  "would",
        "you",   "your",  "yours", "yourself", "yourselves"};
    return words;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stopwords().contains(cur)) out.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') {
            cur += static_cast<char>(c - 'A' + 'a');
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            cur += static_cast<char>(c);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

// ---------------------------------------------------------------------------
// Index

TfidfIndex::TfidfIndex(std::vector<Document> docs) {
    if (docs.empty()) throw Error("empty index");
    std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < docs.size(); ++i) {
        if (docs[i].id == docs[i - 1].id) throw Error("duplicate document id " + docs[i].id);
    }
    std::vector<std::map<std::uint32_t, std::size_t>> tfs(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        ids_.push_back(docs[d].id);
        for (auto& tok : tokenize(docs[d].text)) {
            auto [it, fresh] = term_ids_.emplace(tok, static_cast<std::uint32_t>(df_.size()));
            if (fresh) df_.push_back(0);
            if (tfs[d][it->second]++ == 0) ++df_[it->second];
        }
    }
    const double n = static_cast<double>(docs.size());
    postings_.resize(df_.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        Sparse v;
        double sq = 0.0;
        for (const auto& [t, tf] : tfs[d]) {
            const double w = static_cast<double>(tf) * std::log(n / static_cast<double>(df_[t]));
            v.emplace_back(t, w);
            sq += w * w;
            postings_[t].emplace_back(static_cast<std::uint32_t>(d), w);
        }
        vectors_.push_back(std::move(v));
        norms_.push_back(std::sqrt(sq));
    }
}

std::size_t TfidfIndex::document_frequency(const std::string& term) const {
    auto it = term_ids_.find(term);
    return it == term_ids_.end() ? 0 : df_[it->second];
}

double TfidfIndex::idf(const std::string& term) const {
    const auto df = document_frequency(term);
    return df == 0 ? 0.0 : std::log(static_cast<double>(ids_.size()) / static_cast<double>(df));
}

std::vector<SearchHit> TfidfIndex::search(std::span<const std::string> query_terms, std::size_t k) const {
    std::map<std::uint32_t, std::size_t> qtf;
    for (const auto& term : query_terms) {
        for (const auto& tok : tokenize(term)) {
            if (auto it = term_ids_.find(tok); it != term_ids_.end()) ++qtf[it->second];
        }
    }
    const double n = static_cast<double>(ids_.size());
    std::vector<double> dots(ids_.size(), 0.0);
    double qsq = 0.0;
    for (const auto& [t, tf] : qtf) {
        const double w = static_cast<double>(tf) * std::log(n / static_cast<double>(df_[t]));
        qsq += w * w;
        for (const auto& [d, dw] : postings_[t]) dots[d] += w * dw;
    }
    std::vector<SearchHit> hits;
    if (qsq <= 0.0) return hits;
    const double qn = std::sqrt(qsq);
    std::vector<std::pair<double, std::uint32_t>> scored;
    for (std::uint32_t d = 0; d < dots.size(); ++d) {
        if (dots[d] > 0.0 && norms_[d] > 0.0) scored.emplace_back(dots[d] / (qn * norms_[d]), d);
    }
    // Documents are stored in id order, so the index breaks ties by id.
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    if (k != 0 && scored.size() > k) scored.resize(k);
    for (const auto& [s, d] : scored) hits.push_back({ids_[d], s});
    return hits;
}

// ---------------------------------------------------------------------------
// Metrics

double precision_at_k(std::span<const SearchHit> ranked, const std::set<std::string>& relevant, std::size_t k) {
    if (k == 0) throw Error("precision_at_k: k must be at least 1");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) hits += relevant.contains(ranked[i].doc) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(std::span<const SearchHit> ranked, const std::set<std::string>& relevant) {
    if (relevant.empty()) return 0.0;
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (relevant.contains(ranked[i].doc)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double mean_average_precision(std::span<const double> per_query_ap) {
    if (per_query_ap.empty()) throw Error("MAP: no queries");
    double s = 0.0;
    for (double ap : per_query_ap) s += ap;
    return s / static_cast<double>(per_query_ap.size());
}

// ---------------------------------------------------------------------------
// Files

std::vector<Document> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
    std::vector<Document> docs;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path());
        if (!in) throw Error("cannot open " + entry.path().string());
        std::ostringstream ss;
        ss << in.rdbuf();
        docs.push_back({entry.path().stem().string(), ss.str()});
    }
    std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return docs;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
        auto end = line.find('\t', begin);
        out.push_back(line.substr(begin, end == std::string::npos ? std::string::npos : end - begin));
        if (end == std::string::npos) break;
        begin = end + 1;
    }
    return out;
}

template <typename F>
void for_each_line(const std::filesystem::path& file, F&& f) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        f(split_tabs(line), lineno);
    }
}

}  // namespace

std::map<std::string, std::string> load_queries(const std::filesystem::path& file) {
    std::map<std::string, std::string> out;
    for_each_line(file, [&](const std::vector<std::string>& cols, std::size_t lineno) {
        if (cols.size() != 2) throw ParseError(file.string(), lineno, "expected query_id<TAB>terms");
        if (!out.emplace(cols[0], cols[1]).second) throw ParseError(file.string(), lineno, "duplicate query id");
    });
    return out;
}

Relevance load_relevance(const std::filesystem::path& file) {
    Relevance out;
    for_each_line(file, [&](const std::vector<std::string>& cols, std::size_t lineno) {
        if (cols.size() != 3 || (cols[2] != "0" && cols[2] != "1")) {
            throw ParseError(file.string(), lineno, "expected query_id<TAB>doc_id<TAB>0|1");
        }
        auto& rel = out[cols[0]];
        if (cols[2] == "1") rel.insert(cols[1]);
    });
    return out;
}

RetrievalScores evaluate_queries(const TfidfIndex& index, const std::map<std::string, std::string>& queries,
                                 const Relevance& relevance) {
    RetrievalScores out;
    std::vector<double> aps;
    double p10 = 0.0;
    for (const auto& [qid, text] : queries) {
        auto rel = relevance.find(qid);
        if (rel == relevance.end()) continue;
        const std::vector<std::string> terms{text};
        const auto ranked = index.search(terms);
        const double ap = average_precision(ranked, rel->second);
        const double p = precision_at_k(ranked, rel->second, 10);
        out.ap[qid] = ap;
        out.p10[qid] = p;
        aps.push_back(ap);
        p10 += p;
    }
    if (aps.empty()) throw Error("no judged queries");
    out.map = mean_average_precision(aps);
    out.precision_at_10 = p10 / static_cast<double>(aps.size());
    return out;
}

std::vector<std::string> hard_queries(const TfidfIndex& index, const std::map<std::string, std::string>& queries,
                                      const Relevance& relevance) {
    std::vector<std::string> out;
    for (const auto& [qid, text] : queries) {
        auto rel = relevance.find(qid);
        if (rel == relevance.end()) continue;
        const std::vector<std::string> terms{text};
        if (precision_at_k(index.search(terms, 10), rel->second, 10) == 0.0) out.push_back(qid);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expansion

std::string_view to_string(ExpansionStrategy s) {
    switch (s) {
        case ExpansionStrategy::naturalness: return "naturalness";
        case ExpansionStrategy::pairwise: return "pairwise";
        case ExpansionStrategy::length: return "length";
        case ExpansionStrategy::random: return "random";
        case ExpansionStrategy::naturalness_length: return "naturalness+length";
    }
    return "?";
}

std::optional<ExpansionStrategy> parse_expansion_strategy(std::string_view s) {
    for (auto st : {ExpansionStrategy::naturalness, ExpansionStrategy::pairwise, ExpansionStrategy::length,
                    ExpansionStrategy::random, ExpansionStrategy::naturalness_length}) {
        if (to_string(st) == s) return st;
    }
    return std::nullopt;
}

std::vector<std::string> ExpandedQuery::terms() const {
    auto out = original;
    out.insert(out.end(), added.begin(), added.end());
    return out;
}

ExpandedQuery expand_query(std::span<const std::string> query, ExpansionStrategy strategy, std::size_t word_budget,
                           const ExpansionInputs& in) {
    ExpandedQuery out;
    out.original.assign(query.begin(), query.end());
    if (word_budget == 0) return out;
    if (!in.graph) throw Error("expand_query: graph required");
    const Graph& g = *in.graph;
    const bool needs_model =
        strategy == ExpansionStrategy::naturalness || strategy == ExpansionStrategy::naturalness_length;
    if (needs_model && !in.naturalness) throw Error("expand_query: strategy needs a naturalness model");
    if (strategy == ExpansionStrategy::pairwise && !in.table) throw Error("expand_query: strategy needs word vectors");

    std::set<std::string> seen;
    std::set<ConceptId> terms;
    for (const auto& q : query) {
        for (const auto& tok : tokenize(q)) seen.insert(tok);
        const auto label = normalize_concept(q);
        seen.insert(label);
        if (auto id = g.find(label)) terms.insert(*id);
    }
    // Sort endpoints by label so the candidate order does not depend on query order.
    std::vector<ConceptId> ordered(terms.begin(), terms.end());
    std::sort(ordered.begin(), ordered.end(), [&](auto a, auto b) { return g.label(a) < g.label(b); });

    struct Candidate {
        Path path;
        double key1 = 0.0;
        double key2 = 0.0;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        for (std::size_t j = i + 1; j < ordered.size(); ++j) {
            for (auto& p : enumerate_paths(g, ordered[i], ordered[j], in.max_nodes)) {
                Candidate c;
                switch (strategy) {
                    case ExpansionStrategy::naturalness: c.key1 = (*in.naturalness)(p); break;
                    case ExpansionStrategy::pairwise: c.key1 = pair_score(g, p, *in.table); break;
                    case ExpansionStrategy::length: c.key1 = length_score(g, p, in.seed); break;
                    case ExpansionStrategy::random: {
                        std::uint64_t h = mix64(in.seed ^ 0x9e3779b97f4a7c15ULL);
                        h = fnv1a(format_path(g, p), h);
                        c.key1 = static_cast<double>(mix64(h) >> 11);
                        break;
                    }
                    case ExpansionStrategy::naturalness_length:
                        c.key1 = -static_cast<double>(p.vertices.size());
                        c.key2 = (*in.naturalness)(p);
                        break;
                }
                c.path = std::move(p);
                cands.push_back(std::move(c));
            }
        }
    }
    if (cands.empty()) {
        out.no_paths = true;
        return out;
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.key1 != b.key1 ? a.key1 > b.key1 : a.key2 > b.key2;
    });
    for (const auto& c : cands) {
        for (std::size_t k = 1; k + 1 < c.path.vertices.size(); ++k) {
            if (out.added.size() >= word_budget) return out;
            const auto& w = g.label(c.path.vertices[k]);
            if (seen.insert(w).second) out.added.push_back(w);
        }
    }
    return out;
}

}  // namespace pathnat
