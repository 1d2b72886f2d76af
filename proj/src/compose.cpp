#include "weaver/compose.hpp"

#include <algorithm>
#include <map>

#include "weaver/selection.hpp"

namespace weaver::compose {

namespace {

// Order among equal-length plans: higher total QoS first, then the
// lexicographically smaller service sequence.
bool better(const Plan& a, const Plan& b) {
    if (a.totalQos != b.totalQos) return a.totalQos > b.totalQos;
    return a.services < b.services;
}

long long chain_qos(const std::vector<std::string>& services, const registry::Registry& reg) {
    long long total = 0;
    for (const std::string& id : services) total += selection::qos_value(reg.records.at(id).qos);
    return total;
}

bool covers(const std::set<std::string>& required, const std::set<std::string>& have,
            const ComposeConfig& cfg, const ontology::ConceptGraph* graph) {
    for (const std::string& t : required) {
        if (!satisfied(t, have, cfg, graph)) return false;
    }
    return true;
}

// Level-synchronous search over reachable type sets. Every state keeps only
// its best plan; states seen at an earlier (shorter) level are never
// revisited, which is safe because the final ordering prefers shorter chains
// outright and equal-length extensions preserve the per-state order.
std::optional<Plan> search(const Goal& goal, const registry::Registry& reg,
                           const ComposeConfig& cfg, const ontology::ConceptGraph* graph) {
    using State = std::set<std::string>;
    std::map<State, Plan> level;
    level.emplace(goal.available, Plan{});
    std::set<State> visited{goal.available};

    for (int depth = 1; depth <= cfg.maxDepth; ++depth) {
        std::map<State, Plan> next;
        for (const auto& [state, plan] : level) {
            for (const auto& [id, rec] : reg.records) {
                bool invocable = true;
                for (const std::string& in : rec.inputs) {
                    if (!satisfied(in, state, cfg, graph)) {
                        invocable = false;
                        break;
                    }
                }
                if (!invocable) continue;
                State out = state;
                out.insert(rec.outputs.begin(), rec.outputs.end());
                if (visited.count(out) > 0) continue;
                Plan extended;
                extended.services = plan.services;
                extended.services.push_back(id);
                extended.totalQos = plan.totalQos + selection::qos_value(rec.qos);
                auto [slot, inserted] = next.try_emplace(std::move(out), extended);
                if (!inserted && better(extended, slot->second)) slot->second = std::move(extended);
            }
        }
        if (next.empty()) return std::nullopt;

        const Plan* best = nullptr;
        for (const auto& [state, plan] : next) {
            if (!covers(goal.required, state, cfg, graph)) continue;
            if (best == nullptr || better(plan, *best)) best = &plan;
        }
        if (best != nullptr) return *best;

        for (const auto& kv : next) visited.insert(kv.first);
        level = std::move(next);
    }
    return std::nullopt;
}

}  // namespace

bool satisfied(const std::string& type, const std::set<std::string>& have,
               const ComposeConfig& cfg, const ontology::ConceptGraph* graph) {
    if (have.count(type) > 0) return true;
    if (!cfg.useIsa || graph == nullptr) return false;
    // Walk isA upward from each held type; a held subtype satisfies its
    // supertypes.
    for (const std::string& held : have) {
        std::vector<std::string> stack{held};
        std::set<std::string> seen{held};
        while (!stack.empty()) {
            std::string node = std::move(stack.back());
            stack.pop_back();
            auto it = graph->isA.find(node);
            if (it == graph->isA.end()) continue;
            for (const std::string& parent : it->second) {
                if (parent == type) return true;
                if (seen.insert(parent).second) stack.push_back(parent);
            }
        }
    }
    return false;
}

bool replay(const std::vector<std::string>& services, const Goal& goal,
            const registry::Registry& reg, const ComposeConfig& cfg,
            const ontology::ConceptGraph* graph) {
    std::set<std::string> have = goal.available;
    for (const std::string& id : services) {
        auto it = reg.records.find(id);
        if (it == reg.records.end()) return false;
        for (const std::string& in : it->second.inputs) {
            if (!satisfied(in, have, cfg, graph)) return false;
        }
        have.insert(it->second.outputs.begin(), it->second.outputs.end());
    }
    return covers(goal.required, have, cfg, graph);
}

std::optional<Plan> compose(const Goal& goal,
                            const registry::Registry& reg,
                            ontology::ProcessMemo& memo,
                            const keywords::KeywordSet& keywords,
                            const ComposeConfig& cfg,
                            ComposeStats& stats,
                            const ontology::ConceptGraph* graph) {
    if (!keywords.empty()) {
        if (auto recorded = ontology::memo_lookup(memo, keywords)) {
            if (replay(*recorded, goal, reg, cfg, graph)) {
                ++stats.memoHits;
                Plan p;
                p.services = *recorded;
                p.totalQos = chain_qos(p.services, reg);
                return p;
            }
            // Stale entry: drop it and fall through to a fresh search.
            memo.entries.erase(keywords.canonical_key());
        }
    }

    if (covers(goal.required, goal.available, cfg, graph)) return Plan{};

    ++stats.searchInvocations;
    std::optional<Plan> plan = search(goal, reg, cfg, graph);
    if (plan && !plan->services.empty() && !keywords.empty()) {
        ontology::memo_record(memo, keywords, plan->services);
    }
    return plan;
}

Goal derive_goal(const bpmn::Node& task, const keywords::KeywordSet& k,
                 const registry::Registry& reg,
                 const std::set<std::string>& availableTypes) {
    Goal g;
    g.available = availableTypes;
    g.available.insert(task.io.inputs.begin(), task.io.inputs.end());
    if (!task.io.outputs.empty()) {
        g.required = task.io.outputs;
        return g;
    }
    std::set<std::string> vocabulary;
    for (const auto& kv : reg.records) {
        vocabulary.insert(kv.second.inputs.begin(), kv.second.inputs.end());
        vocabulary.insert(kv.second.outputs.begin(), kv.second.outputs.end());
    }
    for (const std::string& head : k.headNouns) {
        if (vocabulary.count(head) > 0) g.required.insert(head);
    }
    return g;
}

}  // namespace weaver::compose
