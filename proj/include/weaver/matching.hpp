#pragma once

#include <map>
#include <string>
#include <vector>

#include "weaver/errors.hpp"
#include "weaver/keywords.hpp"
#include "weaver/ontology.hpp"
#include "weaver/registry.hpp"

namespace weaver::matching {

struct MatchConfig {
    double theta = 0.5;
    double decay = 0.5;
    int maxHops = 2;
};

// One service that cleared the acceptance threshold for a task.
struct Candidate {
    std::string serviceId;
    double score = 0.0;
    // Concepts through which keywords connected to this service, sorted.
    std::vector<std::string> matchedConcepts;
    // keyword -> hop count (0 = exact provider, k = matched k levels up).
    std::map<std::string, int> hopProfile;
};

// Scores every registry service against the task keywords and returns the
// ones with score > 0 and score >= theta, ordered by score descending then
// service id ascending.
std::vector<Candidate> match_task(const keywords::KeywordSet& keywords,
                                  const ontology::ConceptGraph& graph,
                                  const registry::Registry& reg,
                                  const MatchConfig& cfg,
                                  int threads = 0);

// Single-threaded reference with identical results.
std::vector<Candidate> match_task_serial(const keywords::KeywordSet& keywords,
                                         const ontology::ConceptGraph& graph,
                                         const registry::Registry& reg,
                                         const MatchConfig& cfg);

// Per-keyword trace of how (or why not) one keyword reached one service.
struct KeywordTrace {
    std::string keyword;
    bool matched = false;
    std::string viaConcept;         // concept that provided the service
    int hops = 0;                   // 0 = exact
    double contribution = 0.0;      // decay^hops, pre-division
    std::vector<std::string> path;  // keyword .. providing concept
};

struct MatchExplanation {
    std::string serviceId;
    double score = 0.0;
    std::vector<KeywordTrace> traces;  // one per keyword, sorted by keyword
};

// Explains the score of a single service. Throws Error("UnknownServiceId")
// when the service is not in the registry.
MatchExplanation explain_match(const keywords::KeywordSet& keywords,
                               const ontology::ConceptGraph& graph,
                               const registry::Registry& reg,
                               const std::string& serviceId,
                               const MatchConfig& cfg);

}  // namespace weaver::matching
