#include "cqalog/index.hpp"

#include <algorithm>
#include <cmath>

#include "cqalog/errors.hpp"
#include "cqalog/io.hpp"

namespace cqalog {

IndexVariant parse_index_variant(std::string_view name) {
    if (name == "raw") return IndexVariant::raw;
    if (name == "q2a") return IndexVariant::q2a;
    throw ConfigError("unknown index variant: " + std::string(name));
}

std::string_view index_variant_name(IndexVariant variant) {
    return variant == IndexVariant::raw ? "raw" : "q2a";
}

std::size_t InvertedIndex::doc_pos(std::uint64_t doc) const {
    auto it = std::lower_bound(doc_ids.begin(), doc_ids.end(), doc);
    if (it == doc_ids.end() || *it != doc) return npos;
    return static_cast<std::size_t>(it - doc_ids.begin());
}

std::uint32_t InvertedIndex::doc_len(std::uint64_t doc) const {
    std::size_t pos = doc_pos(doc);
    if (pos == npos) throw DanglingReference(static_cast<std::int64_t>(doc));
    return doc_lens[pos];
}

std::uint64_t InvertedIndex::ctf(const std::string& stem) const {
    auto it = collection_tf.find(stem);
    return it == collection_tf.end() ? 0 : it->second;
}

std::vector<IndexDoc> collect_documents(const Corpus& corpus,
                                        const std::vector<std::uint64_t>& questions,
                                        IndexVariant variant, const Lexicon& lexicon) {
    std::vector<IndexDoc> docs;
    std::vector<std::uint64_t> distinct = questions;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::uint64_t q : distinct) {
        auto it = corpus.answers_of.find(q);
        if (it == corpus.answers_of.end()) continue;
        const Post& question = corpus.post(q);
        std::string q_text;
        if (variant == IndexVariant::q2a) {
            q_text = strip_html(question.title);
            std::string q_body = strip_html(question.body);
            if (!q_text.empty() && !q_body.empty()) q_text += ' ';
            q_text += q_body;
        }
        for (std::uint64_t a : it->second) {
            std::string text = strip_html(corpus.post(a).body);
            if (variant == IndexVariant::q2a && !q_text.empty()) {
                if (!text.empty()) text += ' ';
                text += q_text;
            }
            docs.push_back({a, tokenize(text, lexicon)});
        }
    }
    return docs;
}

InvertedIndex build_index(const std::vector<IndexDoc>& docs, IndexVariant variant, double mu) {
    std::vector<const IndexDoc*> ordered;
    ordered.reserve(docs.size());
    for (const IndexDoc& doc : docs) ordered.push_back(&doc);
    std::sort(ordered.begin(), ordered.end(),
              [](const IndexDoc* a, const IndexDoc* b) { return a->doc_key < b->doc_key; });

    InvertedIndex index;
    index.variant = variant;
    index.mu = mu;
    index.doc_ids.reserve(docs.size());
    index.doc_lens.reserve(docs.size());
    for (const IndexDoc* doc : ordered) {
        if (!index.doc_ids.empty() && index.doc_ids.back() == doc->doc_key)
            throw DuplicateDocId(static_cast<std::int64_t>(doc->doc_key));
        std::map<std::string, std::uint32_t> counts;
        std::uint32_t len = 0;
        for (const Token& token : doc->text.tokens) {
            if (token.is_stopword) continue;
            ++counts[token.stem];
            ++len;
        }
        index.doc_ids.push_back(doc->doc_key);
        index.doc_lens.push_back(len);
        index.collection_len += len;
        for (const auto& [stem, count] : counts) {
            index.postings[stem].push_back({doc->doc_key, count});
            index.collection_tf[stem] += count;
        }
    }
    return index;
}

double score(const InvertedIndex& index, const std::vector<std::string>& terms,
             std::uint64_t doc) {
    double len = static_cast<double>(index.doc_len(doc));
    double total = 0;
    std::map<std::string, std::uint32_t> qtf;
    for (const std::string& term : terms) ++qtf[term];
    for (const auto& [term, count] : qtf) {
        std::uint64_t ctf = index.ctf(term);
        if (ctf == 0) continue;
        double p_c = static_cast<double>(ctf) / static_cast<double>(index.collection_len);
        double c_td = 0;
        auto it = index.postings.find(term);
        if (it != index.postings.end()) {
            auto pit = std::lower_bound(it->second.begin(), it->second.end(), doc,
                                        [](const Posting& p, std::uint64_t d) { return p.doc < d; });
            if (pit != it->second.end() && pit->doc == doc) c_td = pit->count;
        }
        total += count * std::log((c_td + index.mu * p_c) / (len + index.mu));
    }
    return total;
}

SearchResult search(const InvertedIndex& index, const std::vector<std::string>& terms,
                    std::size_t k, std::uint64_t query_id, const std::string& tag) {
    SearchResult result;
    if (k == 0) return result;

    // distinct query terms with multiplicities; zero-ctf terms dropped
    std::map<std::string, std::uint32_t> qtf;
    for (const std::string& term : terms) ++qtf[term];
    struct QueryTerm {
        double count;
        double p_c;
        const std::vector<Posting>* postings;
        std::size_t cursor = 0;
    };
    std::vector<QueryTerm> query;
    for (const auto& [term, count] : qtf) {
        std::uint64_t ctf = index.ctf(term);
        if (ctf == 0) {
            ++result.dropped_terms;
            continue;
        }
        auto it = index.postings.find(term);
        query.push_back({static_cast<double>(count),
                         static_cast<double>(ctf) / static_cast<double>(index.collection_len),
                         it == index.postings.end() ? nullptr : &it->second});
    }
    if (query.empty()) {
        result.empty_query = true;
        return result;
    }

    // document-at-a-time over the union of postings; a bounded "heap" kept
    // as a sorted top-k vector (k is small) ordered best-first
    std::vector<std::pair<double, std::uint64_t>> top;  // (score, doc)
    auto better = [](const std::pair<double, std::uint64_t>& a,
                     const std::pair<double, std::uint64_t>& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    };
    for (;;) {
        std::uint64_t doc = UINT64_MAX;
        for (const QueryTerm& qt : query)
            if (qt.postings && qt.cursor < qt.postings->size())
                doc = std::min(doc, (*qt.postings)[qt.cursor].doc);
        if (doc == UINT64_MAX) break;

        double len = static_cast<double>(index.doc_lens[index.doc_pos(doc)]);
        double s = 0;
        for (QueryTerm& qt : query) {
            double c_td = 0;
            if (qt.postings && qt.cursor < qt.postings->size() &&
                (*qt.postings)[qt.cursor].doc == doc) {
                c_td = (*qt.postings)[qt.cursor].count;
                ++qt.cursor;
            }
            s += qt.count * std::log((c_td + index.mu * qt.p_c) / (len + index.mu));
        }
        std::pair<double, std::uint64_t> entry{s, doc};
        if (top.size() < k) {
            top.insert(std::upper_bound(top.begin(), top.end(), entry, better), entry);
        } else if (better(entry, top.back())) {
            top.pop_back();
            top.insert(std::upper_bound(top.begin(), top.end(), entry, better), entry);
        }
    }

    result.entries.reserve(top.size());
    for (std::size_t i = 0; i < top.size(); ++i)
        result.entries.push_back(
            {query_id, top[i].second, static_cast<std::uint32_t>(i + 1), top[i].first, tag});
    return result;
}

namespace {
constexpr char kMagic[4] = {'C', 'Q', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string serialize_index(const InvertedIndex& index) {
    ByteWriter w;
    w.buf.append(kMagic, 4);
    w.u32(kVersion);
    w.buf.push_back(static_cast<char>(index.variant));
    w.f64(index.mu);
    w.varint(index.doc_ids.size());
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < index.doc_ids.size(); ++i) {
        w.varint(index.doc_ids[i] - prev);
        prev = index.doc_ids[i];
        w.varint(index.doc_lens[i]);
    }
    w.varint(index.postings.size());
    for (const auto& [stem, postings] : index.postings) {
        w.str(stem);
        w.varint(postings.size());
        std::uint64_t prev_doc = 0;
        for (const Posting& p : postings) {
            w.varint(p.doc - prev_doc);
            prev_doc = p.doc;
            w.varint(p.count);
        }
    }
    return w.buf;
}

InvertedIndex deserialize_index(const std::string& bytes) {
    ByteReader r(bytes.data(), bytes.size());
    if (bytes.size() < 8 || r.str_bytes(4) != std::string_view(kMagic, 4))
        throw FormatError("not an index file");
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw FormatError("unsupported index version " + std::to_string(version));

    InvertedIndex index;
    index.variant = static_cast<IndexVariant>(r.str_bytes(1)[0]);
    if (index.variant != IndexVariant::raw && index.variant != IndexVariant::q2a)
        throw FormatError("bad index variant byte");
    index.mu = r.f64();
    std::uint64_t n_docs = r.varint();
    index.doc_ids.reserve(n_docs);
    index.doc_lens.reserve(n_docs);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        prev += r.varint();
        index.doc_ids.push_back(prev);
        std::uint32_t len = static_cast<std::uint32_t>(r.varint());
        index.doc_lens.push_back(len);
        index.collection_len += len;
    }
    std::uint64_t n_terms = r.varint();
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        std::string stem = r.str();
        std::uint64_t n_postings = r.varint();
        std::vector<Posting>& postings = index.postings[stem];
        postings.reserve(n_postings);
        std::uint64_t prev_doc = 0;
        std::uint64_t ctf = 0;
        for (std::uint64_t j = 0; j < n_postings; ++j) {
            prev_doc += r.varint();
            std::uint32_t count = static_cast<std::uint32_t>(r.varint());
            postings.push_back({prev_doc, count});
            ctf += count;
        }
        index.collection_tf[stem] = ctf;
    }
    if (!r.done()) throw FormatError("trailing bytes in index file");
    return index;
}

void save_index(const InvertedIndex& index, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "index.bin", serialize_index(index));
}

InvertedIndex load_index(const std::filesystem::path& dir) {
    auto file = std::filesystem::is_directory(dir) ? dir / "index.bin" : dir;
    return deserialize_index(read_file(file));
}

}  // namespace cqalog
