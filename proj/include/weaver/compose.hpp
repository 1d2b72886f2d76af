#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "weaver/bpmn.hpp"
#include "weaver/keywords.hpp"
#include "weaver/ontology.hpp"
#include "weaver/registry.hpp"

namespace weaver::compose {

struct Goal {
    std::set<std::string> available;  // type concepts present before the task
    std::set<std::string> required;   // type concepts the task must produce
};

struct Plan {
    std::vector<std::string> services;  // execution order
    long long totalQos = 0;             // sum of per-service QoS values

    bool operator==(const Plan&) const = default;
};

struct ComposeConfig {
    int maxDepth = 4;   // maximum chain length
    bool useIsa = false;  // let subtype outputs satisfy supertype inputs
};

struct ComposeStats {
    long long searchInvocations = 0;  // breadth-first searches actually run
    long long memoHits = 0;           // memo entries that replayed cleanly
};

// True when `type` is in `have`, or (with cfg.useIsa and a graph) some member
// of `have` reaches `type` through isA edges.
bool satisfied(const std::string& type, const std::set<std::string>& have,
               const ComposeConfig& cfg, const ontology::ConceptGraph* graph);

// Validates a recorded chain against the current registry and goal: every
// service must exist, be invocable in order, and the final state must cover
// the required types.
bool replay(const std::vector<std::string>& services, const Goal& goal,
            const registry::Registry& reg, const ComposeConfig& cfg,
            const ontology::ConceptGraph* graph = nullptr);

// Finds a service chain closing the goal. Checks the memo first (stale
// entries are recomputed and rewritten), answers trivial goals with an empty
// plan, and otherwise runs a level-synchronous breadth-first search over
// reachable type sets. Among all closing chains the shortest wins, then the
// highest total QoS, then the lexicographically smallest service sequence.
// Returns nullopt when no chain within cfg.maxDepth closes the goal.
std::optional<Plan> compose(const Goal& goal,
                            const registry::Registry& reg,
                            ontology::ProcessMemo& memo,
                            const keywords::KeywordSet& keywords,
                            const ComposeConfig& cfg,
                            ComposeStats& stats,
                            const ontology::ConceptGraph* graph = nullptr);

// Goal for one task: explicit io outputs win; otherwise the task's head
// nouns, filtered to types that occur anywhere in the registry's operation
// signatures. Available types are the caller's pool plus the task's declared
// io inputs. An empty required set means composition cannot be attempted.
Goal derive_goal(const bpmn::Node& task, const keywords::KeywordSet& k,
                 const registry::Registry& reg,
                 const std::set<std::string>& availableTypes);

}  // namespace weaver::compose
