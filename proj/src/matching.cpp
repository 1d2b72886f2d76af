#include "weaver/matching.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weaver::matching {

namespace {

std::vector<std::string> sorted_keyword_union(const keywords::KeywordSet& k) {
    std::vector<std::string> all;
    all.reserve(k.verbs.size() + k.nounPhrases.size());
    std::set_union(k.verbs.begin(), k.verbs.end(),
                   k.nounPhrases.begin(), k.nounPhrases.end(),
                   std::back_inserter(all));
    return all;
}

bool provides(const ontology::ConceptGraph& g, const std::string& conceptName,
              const std::string& serviceId) {
    auto it = g.providedBy.find(conceptName);
    return it != g.providedBy.end() && it->second.count(serviceId) > 0;
}

// Walks one keyword up the isA hierarchy until a concept providing the
// service is found or maxHops is exhausted. Exact providers win at hop 0;
// otherwise the first providing level wins and, within a level, the
// lexicographically smallest concept.
KeywordTrace trace_keyword(const std::string& keyword,
                           const ontology::ConceptGraph& g,
                           const std::string& serviceId,
                           const MatchConfig& cfg) {
    KeywordTrace t;
    t.keyword = keyword;
    if (g.concepts.count(keyword) == 0) return t;

    if (provides(g, keyword, serviceId)) {
        t.matched = true;
        t.viaConcept = keyword;
        t.hops = 0;
        t.contribution = 1.0;
        t.path = {keyword};
        return t;
    }

    std::set<std::string> frontier{keyword};
    std::set<std::string> visited{keyword};
    std::map<std::string, std::string> cameFrom;
    for (int hop = 1; hop <= cfg.maxHops && !frontier.empty(); ++hop) {
        std::set<std::string> next;
        for (const std::string& child : frontier) {
            auto it = g.isA.find(child);
            if (it == g.isA.end()) continue;
            for (const std::string& parent : it->second) {
                if (!visited.insert(parent).second) continue;
                next.insert(parent);
                cameFrom.try_emplace(parent, child);
            }
        }
        for (const std::string& parent : next) {
            if (!provides(g, parent, serviceId)) continue;
            t.matched = true;
            t.viaConcept = parent;
            t.hops = hop;
            t.contribution = 1.0;
            for (int i = 0; i < hop; ++i) t.contribution *= cfg.decay;
            for (std::string node = parent; !node.empty();) {
                t.path.push_back(node);
                auto from = cameFrom.find(node);
                node = from == cameFrom.end() ? std::string() : from->second;
            }
            std::reverse(t.path.begin(), t.path.end());
            return t;
        }
        frontier = std::move(next);
    }
    return t;
}

// Score of one service: sum of per-keyword contributions in sorted keyword
// order, divided by the keyword count. The fixed order keeps the floating
// point sum identical no matter how services are distributed over threads.
Candidate score_service(const std::vector<std::string>& keywordList,
                        const ontology::ConceptGraph& g,
                        const std::string& serviceId,
                        const MatchConfig& cfg) {
    Candidate c;
    c.serviceId = serviceId;
    double total = 0.0;
    std::set<std::string> concepts;
    for (const std::string& kw : keywordList) {
        KeywordTrace t = trace_keyword(kw, g, serviceId, cfg);
        if (!t.matched) continue;
        total += t.contribution;
        concepts.insert(t.viaConcept);
        c.hopProfile[kw] = t.hops;
    }
    c.score = keywordList.empty() ? 0.0 : total / static_cast<double>(keywordList.size());
    c.matchedConcepts.assign(concepts.begin(), concepts.end());
    return c;
}

std::vector<Candidate> collect(std::vector<Candidate> scored, const MatchConfig& cfg) {
    std::vector<Candidate> out;
    for (Candidate& c : scored) {
        if (c.score > 0.0 && c.score >= cfg.theta) out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.serviceId < b.serviceId;
    });
    return out;
}

}  // namespace

std::vector<Candidate> match_task(const keywords::KeywordSet& keywords,
                                  const ontology::ConceptGraph& graph,
                                  const registry::Registry& reg,
                                  const MatchConfig& cfg,
                                  int threads) {
    std::vector<std::string> keywordList = sorted_keyword_union(keywords);
    if (keywordList.empty()) return {};

    std::vector<const std::string*> ids;
    ids.reserve(reg.records.size());
    for (const auto& kv : reg.records) ids.push_back(&kv.first);

    std::vector<Candidate> scored(ids.size());
#ifdef _OPENMP
    int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#else
    (void)threads;
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ids.size()); ++i) {
        auto idx = static_cast<std::size_t>(i);
        scored[idx] = score_service(keywordList, graph, *ids[idx], cfg);
    }
    return collect(std::move(scored), cfg);
}

std::vector<Candidate> match_task_serial(const keywords::KeywordSet& keywords,
                                         const ontology::ConceptGraph& graph,
                                         const registry::Registry& reg,
                                         const MatchConfig& cfg) {
    std::vector<std::string> keywordList = sorted_keyword_union(keywords);
    if (keywordList.empty()) return {};

    std::vector<Candidate> scored;
    scored.reserve(reg.records.size());
    for (const auto& kv : reg.records) {
        scored.push_back(score_service(keywordList, graph, kv.first, cfg));
    }
    return collect(std::move(scored), cfg);
}

MatchExplanation explain_match(const keywords::KeywordSet& keywords,
                               const ontology::ConceptGraph& graph,
                               const registry::Registry& reg,
                               const std::string& serviceId,
                               const MatchConfig& cfg) {
    if (reg.records.count(serviceId) == 0) {
        throw Error("UnknownServiceId", "unknown service id '" + serviceId + "'");
    }
    MatchExplanation ex;
    ex.serviceId = serviceId;
    std::vector<std::string> keywordList = sorted_keyword_union(keywords);
    double total = 0.0;
    for (const std::string& kw : keywordList) {
        KeywordTrace t = trace_keyword(kw, graph, serviceId, cfg);
        total += t.contribution;
        ex.traces.push_back(std::move(t));
    }
    ex.score = keywordList.empty() ? 0.0 : total / static_cast<double>(keywordList.size());
    return ex;
}

}  // namespace weaver::matching
