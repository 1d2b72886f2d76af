#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaver/bpmn.hpp"
#include "weaver/compose.hpp"
#include "weaver/config.hpp"
#include "weaver/errors.hpp"
#include "weaver/keywords.hpp"
#include "weaver/matching.hpp"
#include "weaver/ontology.hpp"
#include "weaver/registry.hpp"
#include "weaver/selection.hpp"

// Drives one process document through extraction, matching, selection, and
// composition, rank by rank. Tasks within a rank resolve against the same
// type pool; the pool grows with bound service outputs only between ranks.
namespace weaver::orchestrator {

struct Config {
    config::Settings settings;
    int threads = 0;  // 0 = library default
};

enum class TaskStatus { Matched, Composed, Failed };

std::string_view task_status_name(TaskStatus s);

struct TaskOutcome {
    std::string taskId;
    TaskStatus status = TaskStatus::Failed;
    std::vector<std::string> services;  // bound services in execution order
    double score = 0.0;
    long long qos = 0;
    std::optional<bpmn::UnresolvedReason> reason;
    keywords::KeywordSet keywords;
    std::optional<compose::Goal> goal;  // set when composition was consulted
};

struct FidelityCounters {
    long long matchCalls = 0;
    long long zeroCandidateResults = 0;
    long long composeCalls = 0;
    long long emptyGoalCount = 0;
    long long searchInvocations = 0;
    long long memoHits = 0;

    bool operator==(const FidelityCounters&) const = default;
};

struct Report {
    std::string processId;
    int tasks = 0;
    int matched = 0;
    int composed = 0;
    int failed = 0;
    config::Settings settings;
    FidelityCounters counters;
    std::vector<TaskOutcome> perTask;  // document order
};

struct ImplementResult {
    bpmn::ProcessGraph implemented;
    Report report;

    bool all_bound() const { return report.failed == 0; }
};

// Resolves every task of the design. The memo is read and extended in place.
// Throws Error("OntologyRegistryMismatch") when the concept graph names a
// service the registry does not contain.
ImplementResult implement_process(const bpmn::ProcessGraph& design,
                                  const registry::Registry& reg,
                                  const ontology::ConceptGraph& graph,
                                  ontology::ProcessMemo& memo,
                                  const keywords::Lexicon& lex,
                                  const Config& cfg);

// Stable JSON rendering of a report; scores carry two decimals.
nlohmann::ordered_json report_to_json(const Report& report);

}  // namespace weaver::orchestrator
