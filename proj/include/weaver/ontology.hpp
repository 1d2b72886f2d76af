#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/errors.hpp"
#include "weaver/keywords.hpp"
#include "weaver/registry.hpp"

// Concept graph learned from service descriptions, baseline frequency
// pruning, triple-file persistence, and the memo of previously validated
// composition chains.
namespace weaver::ontology {

class TripleError : public Error {
public:
    TripleError(std::size_t lineNo, const std::string& message)
        : Error("MalformedTriple", "triple line " + std::to_string(lineNo) + ": " + message), lineNo_(lineNo) {}

    std::size_t line() const noexcept { return lineNo_; }

private:
    std::size_t lineNo_;
};

struct ConceptGraph {
    std::set<std::string> concepts;
    std::map<std::string, std::set<std::string>> isA;         // child -> parents
    std::map<std::string, std::set<std::string>> providedBy;  // concept -> service ids
    std::map<std::string, long long> freq;                    // one entry per concept (0 allowed)
    std::set<std::string> domainConcepts;                     // noun-derived concepts

    bool operator==(const ConceptGraph&) const = default;
};

// One concept per extracted verb and noun phrase; providedBy links each
// concept to every service whose description produced it; freq counts
// occurrences (per occurrence per description). Multiword phrases get an
// isA edge to their head noun, which is added as a concept of its own.
// Record order never matters: services are merged in sorted-id order.
// `threads` 0 means library default; the parallel and serial variants return
// identical graphs.
ConceptGraph build_service_ontology(const registry::Registry& reg, const keywords::Lexicon& lex,
                                    const keywords::ChunkPattern& pattern, int threads = 0);
ConceptGraph build_service_ontology_serial(const registry::Registry& reg, const keywords::Lexicon& lex,
                                           const keywords::ChunkPattern& pattern);

// Removes concepts with freq < mean (mean = total/count, compared exactly in
// integers), except that the parent of a surviving isA child survives too.
// Single pass, not iterated.
ConceptGraph prune_baseline(const ConceptGraph& g);

// TAB-separated triples, one per line, sorted by (subject, predicate,
// object). Predicates: freq (every concept gets one, so the round trip is
// lossless), isA, isDomain (object "true"), providedBy.
std::string save_triples(const ConceptGraph& g);
ConceptGraph load_triples(std::string_view text);

// Memo of validated composition chains, keyed by KeywordSet::canonical_key().
struct ProcessMemo {
    std::map<std::string, std::vector<std::string>> entries;
};

std::optional<std::vector<std::string>> memo_lookup(const ProcessMemo& memo, const keywords::KeywordSet& k);
void memo_record(ProcessMemo& memo, const keywords::KeywordSet& k, const std::vector<std::string>& services);

// One `key<TAB>svc1,svc2,...` line per entry, sorted by key.
std::string save_memo(const ProcessMemo& memo);
ProcessMemo load_memo(std::string_view text);

}  // namespace weaver::ontology
