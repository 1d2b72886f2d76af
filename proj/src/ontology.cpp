#include "weaver/ontology.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weaver::ontology {
namespace {

std::string last_word(std::string_view phrase) {
    std::size_t sp = phrase.rfind(' ');
    return std::string(sp == std::string_view::npos ? phrase : phrase.substr(sp + 1));
}

void merge_service(ConceptGraph& g, const std::string& serviceId, const keywords::Occurrences& occ) {
    for (const std::string& v : occ.verbs) {
        g.concepts.insert(v);
        g.providedBy[v].insert(serviceId);
        g.freq[v] += 1;
    }
    for (const keywords::Phrase& p : occ.phrases) {
        g.concepts.insert(p.text);
        g.providedBy[p.text].insert(serviceId);
        g.freq[p.text] += 1;
        g.domainConcepts.insert(p.text);

        std::string head = last_word(p.text);
        g.concepts.insert(head);
        g.freq.try_emplace(head, 0);
        g.domainConcepts.insert(head);
        if (head != p.text) g.isA[p.text].insert(head);
    }
}

}  // namespace

ConceptGraph build_service_ontology_serial(const registry::Registry& reg, const keywords::Lexicon& lex,
                                           const keywords::ChunkPattern& pattern) {
    if (reg.records.empty()) throw Error("EmptyRegistry", "cannot build an ontology from an empty registry");
    ConceptGraph g;
    for (const auto& [id, rec] : reg.records)
        merge_service(g, id, keywords::extract_occurrences(rec.description, lex, pattern));
    return g;
}

ConceptGraph build_service_ontology(const registry::Registry& reg, const keywords::Lexicon& lex,
                                    const keywords::ChunkPattern& pattern, int threads) {
    if (reg.records.empty()) throw Error("EmptyRegistry", "cannot build an ontology from an empty registry");

    // Extraction dominates the cost and is independent per service, so it
    // runs in parallel into indexed slots; the merge stays serial in
    // sorted-id order, which keeps the result identical to the serial build.
    std::vector<const registry::ServiceRecord*> records;
    records.reserve(reg.records.size());
    for (const auto& kv : reg.records) records.push_back(&kv.second);

    std::vector<keywords::Occurrences> extracted(records.size());
#ifdef _OPENMP
    int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(records.size()); ++i)
        extracted[i] = keywords::extract_occurrences(records[i]->description, lex, pattern);
#else
    (void)threads;
    for (std::size_t i = 0; i < records.size(); ++i)
        extracted[i] = keywords::extract_occurrences(records[i]->description, lex, pattern);
#endif

    ConceptGraph g;
    for (std::size_t i = 0; i < records.size(); ++i) merge_service(g, records[i]->id, extracted[i]);
    return g;
}

ConceptGraph prune_baseline(const ConceptGraph& g) {
    if (g.concepts.empty()) return g;

    long long total = 0;
    for (const auto& kv : g.freq) total += kv.second;
    const long long conceptCount = static_cast<long long>(g.concepts.size());

    // freq >= mean without division: freq * |concepts| >= total.
    auto at_or_above_mean = [&](const std::string& c) {
        auto it = g.freq.find(c);
        long long f = it == g.freq.end() ? 0 : it->second;
        return f * conceptCount >= total;
    };

    std::set<std::string> kept;
    for (const std::string& c : g.concepts)
        if (at_or_above_mean(c)) kept.insert(c);

    // Parents of surviving children survive as well, so the hierarchy never
    // dangles. Parents are single words and never children themselves, so a
    // single pass settles this.
    for (const auto& [child, parents] : g.isA) {
        if (!kept.count(child)) continue;
        for (const std::string& parent : parents) kept.insert(parent);
    }

    ConceptGraph pruned;
    pruned.concepts = kept;
    for (const std::string& c : kept) {
        auto f = g.freq.find(c);
        pruned.freq[c] = f == g.freq.end() ? 0 : f->second;
        if (auto p = g.providedBy.find(c); p != g.providedBy.end() && !p->second.empty()) pruned.providedBy[c] = p->second;
        if (g.domainConcepts.count(c)) pruned.domainConcepts.insert(c);
        if (auto e = g.isA.find(c); e != g.isA.end()) {
            std::set<std::string> parents;
            for (const std::string& parent : e->second)
                if (kept.count(parent)) parents.insert(parent);
            if (!parents.empty()) pruned.isA[c] = parents;
        }
    }
    return pruned;
}

std::string save_triples(const ConceptGraph& g) {
    // (subject, predicate, object) tuples, sorted. Predicate names happen to
    // sort as freq < isA < isDomain < providedBy.
    std::vector<std::array<std::string, 3>> triples;
    for (const std::string& c : g.concepts) {
        auto f = g.freq.find(c);
        triples.push_back({c, "freq", std::to_string(f == g.freq.end() ? 0 : f->second)});
    }
    for (const auto& [child, parents] : g.isA)
        for (const std::string& parent : parents) triples.push_back({child, "isA", parent});
    for (const std::string& c : g.domainConcepts) triples.push_back({c, "isDomain", "true"});
    for (const auto& [name, services] : g.providedBy)
        for (const std::string& svc : services) triples.push_back({name, "providedBy", svc});

    std::sort(triples.begin(), triples.end());
    std::string out;
    for (const auto& [s, p, o] : triples) {
        out += s;
        out += '\t';
        out += p;
        out += '\t';
        out += o;
        out += '\n';
    }
    return out;
}

ConceptGraph load_triples(std::string_view text) {
    ConceptGraph g;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string_view::npos ? std::string_view::npos : line.find('\t', t1 + 1);
        if (t1 == std::string_view::npos || t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos)
            throw TripleError(lineNo, "expected subject<TAB>predicate<TAB>object");
        std::string subject(line.substr(0, t1));
        std::string_view predicate = line.substr(t1 + 1, t2 - t1 - 1);
        std::string object(line.substr(t2 + 1));
        if (subject.empty() || object.empty()) throw TripleError(lineNo, "empty subject or object");

        g.concepts.insert(subject);
        if (predicate == "freq") {
            long long f = 0;
            auto [ptr, ec] = std::from_chars(object.data(), object.data() + object.size(), f);
            if (ec != std::errc{} || ptr != object.data() + object.size() || f < 0)
                throw TripleError(lineNo, "bad freq value '" + object + "'");
            g.freq[subject] = f;
        } else if (predicate == "isA") {
            g.isA[subject].insert(object);
            g.concepts.insert(object);
        } else if (predicate == "isDomain") {
            if (object != "true") throw TripleError(lineNo, "isDomain object must be 'true'");
            g.domainConcepts.insert(subject);
        } else if (predicate == "providedBy") {
            g.providedBy[subject].insert(object);
        } else {
            throw TripleError(lineNo, "unknown predicate '" + std::string(predicate) + "'");
        }
    }
    for (const std::string& c : g.concepts) g.freq.try_emplace(c, 0);
    return g;
}

std::optional<std::vector<std::string>> memo_lookup(const ProcessMemo& memo, const keywords::KeywordSet& k) {
    auto it = memo.entries.find(k.canonical_key());
    if (it == memo.entries.end()) return std::nullopt;
    return it->second;
}

void memo_record(ProcessMemo& memo, const keywords::KeywordSet& k, const std::vector<std::string>& services) {
    memo.entries[k.canonical_key()] = services;
}

std::string save_memo(const ProcessMemo& memo) {
    std::string out;
    for (const auto& [key, services] : memo.entries) {
        out += key;
        out += '\t';
        for (std::size_t i = 0; i < services.size(); ++i) {
            if (i > 0) out += ',';
            out += services[i];
        }
        out += '\n';
    }
    return out;
}

ProcessMemo load_memo(std::string_view text) {
    ProcessMemo memo;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size())
            throw TripleError(lineNo, "expected key<TAB>serviceList");
        std::string key(line.substr(0, tab));
        std::vector<std::string> services;
        std::size_t p = tab + 1;
        while (p <= line.size()) {
            std::size_t comma = line.find(',', p);
            std::string_view part = line.substr(p, comma == std::string_view::npos ? line.size() - p : comma - p);
            p = comma == std::string_view::npos ? line.size() + 1 : comma + 1;
            if (part.empty()) throw TripleError(lineNo, "empty service id in memo entry");
            services.emplace_back(part);
        }
        memo.entries[key] = std::move(services);
    }
    return memo;
}

}  // namespace weaver::ontology
