#include "weaver/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weaver::orchestrator {

namespace {

std::string extraction_text(const bpmn::Node& task, bool useName) {
    std::string text = task.description;
    if (useName && !task.name.empty()) {
        if (!text.empty()) text += ' ';
        text += task.name;
    }
    return text;
}

double rounded2(double v) { return std::round(v * 100.0) / 100.0; }

struct Slot {
    keywords::KeywordSet keywords;
    std::vector<matching::Candidate> candidates;
};

const std::set<std::string>& outputs_of(const registry::Registry& reg, const std::string& id) {
    return reg.records.at(id).outputs;
}

}  // namespace

std::string_view task_status_name(TaskStatus s) {
    switch (s) {
        case TaskStatus::Matched: return "matched";
        case TaskStatus::Composed: return "composed";
        case TaskStatus::Failed: return "failed";
    }
    return "failed";
}

ImplementResult implement_process(const bpmn::ProcessGraph& design,
                                  const registry::Registry& reg,
                                  const ontology::ConceptGraph& graph,
                                  ontology::ProcessMemo& memo,
                                  const keywords::Lexicon& lex,
                                  const Config& cfg) {
    for (const auto& [conceptName, services] : graph.providedBy) {
        for (const std::string& svc : services) {
            if (reg.records.count(svc) == 0) {
                throw Error("OntologyRegistryMismatch",
                            "ontology concept '" + conceptName + "' names unknown service '" + svc + "'");
            }
        }
    }

    const config::Settings& st = cfg.settings;
    matching::MatchConfig matchCfg{st.matchTheta, st.matchDecay, st.matchMaxHops};
    selection::SelectConfig selectCfg{st.selectScoreFirst};
    compose::ComposeConfig composeCfg{st.composeMaxDepth, st.composeUseIsa};
    keywords::ChunkPattern pattern = keywords::ChunkPattern::compile(st.chunkPattern);
    const ontology::ConceptGraph* isaGraph = composeCfg.useIsa ? &graph : nullptr;

    ImplementResult result;
    result.implemented = bpmn::strip_bindings(design);
    Report& rep = result.report;
    rep.processId = design.processId;
    rep.settings = st;

    std::vector<std::vector<std::string>> taskIdsByRank;
    for (const auto& rank : bpmn::topological_ranks(result.implemented)) {
        std::vector<std::string> ids;
        for (const bpmn::Node* n : rank) {
            if (n->kind == bpmn::NodeKind::Task) ids.push_back(n->id);
        }
        if (!ids.empty()) taskIdsByRank.push_back(std::move(ids));
    }

    std::set<std::string> available = design.processInputs;
    compose::ComposeStats stats;
    std::map<std::string, TaskOutcome> outcomeById;

    for (const std::vector<std::string>& rankIds : taskIdsByRank) {
        std::vector<bpmn::Node*> tasks;
        tasks.reserve(rankIds.size());
        for (const std::string& id : rankIds) tasks.push_back(result.implemented.find_node(id));

        // Extraction and matching are independent per task, so the rank runs
        // them in parallel into indexed slots. Selection and composition stay
        // serial in document order: composition reads and writes the memo,
        // and the fixed order keeps every run identical.
        std::vector<Slot> slots(tasks.size());
#ifdef _OPENMP
        int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tasks.size()); ++i) {
            auto idx = static_cast<std::size_t>(i);
            slots[idx].keywords =
                keywords::extract_keywords(extraction_text(*tasks[idx], st.orchestratorUseName), lex, pattern);
            slots[idx].candidates = matching::match_task_serial(slots[idx].keywords, graph, reg, matchCfg);
        }

        std::set<std::string> produced;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            bpmn::Node& task = *tasks[i];
            Slot& slot = slots[i];
            ++rep.counters.matchCalls;
            ++rep.tasks;

            TaskOutcome out;
            out.taskId = task.id;
            out.keywords = slot.keywords;

            if (!slot.candidates.empty()) {
                selection::Selection sel = selection::select_best(slot.candidates, reg, selectCfg);
                bpmn::Binding b;
                b.kind = bpmn::BindingKind::Single;
                b.services = {sel.serviceId};
                b.qosAtSelection = sel.qos;
                b.score = sel.score;
                for (const matching::Candidate& c : slot.candidates) {
                    if (c.serviceId == sel.serviceId) {
                        b.matchedConcepts.insert(c.matchedConcepts.begin(), c.matchedConcepts.end());
                        break;
                    }
                }
                task.binding = b;
                out.status = TaskStatus::Matched;
                out.services = b.services;
                out.score = sel.score;
                out.qos = sel.qos;
                ++rep.matched;
                const std::set<std::string>& outs = outputs_of(reg, sel.serviceId);
                produced.insert(outs.begin(), outs.end());
            } else {
                ++rep.counters.zeroCandidateResults;
                compose::Goal goal = compose::derive_goal(task, slot.keywords, reg, available);
                out.goal = goal;
                if (goal.required.empty()) {
                    ++rep.counters.emptyGoalCount;
                    task.unresolved = bpmn::UnresolvedReason::NoMatch;
                    out.status = TaskStatus::Failed;
                    out.reason = bpmn::UnresolvedReason::NoMatch;
                    ++rep.failed;
                } else {
                    ++rep.counters.composeCalls;
                    std::optional<compose::Plan> plan =
                        compose::compose(goal, reg, memo, slot.keywords, composeCfg, stats, isaGraph);
                    if (plan && !plan->services.empty()) {
                        bpmn::Binding b;
                        b.kind = plan->services.size() == 1 ? bpmn::BindingKind::Single
                                                            : bpmn::BindingKind::Composite;
                        b.services = plan->services;
                        b.qosAtSelection = plan->totalQos;
                        b.score = 0.0;
                        task.binding = b;
                        out.status = TaskStatus::Composed;
                        out.services = plan->services;
                        out.qos = plan->totalQos;
                        ++rep.composed;
                        for (const std::string& svc : plan->services) {
                            const std::set<std::string>& outs = outputs_of(reg, svc);
                            produced.insert(outs.begin(), outs.end());
                        }
                    } else {
                        task.unresolved = bpmn::UnresolvedReason::CompositionFailed;
                        out.status = TaskStatus::Failed;
                        out.reason = bpmn::UnresolvedReason::CompositionFailed;
                        ++rep.failed;
                    }
                }
            }
            outcomeById.emplace(task.id, std::move(out));
        }
        available.insert(produced.begin(), produced.end());
    }

    rep.counters.searchInvocations = stats.searchInvocations;
    rep.counters.memoHits = stats.memoHits;

    for (const bpmn::Node& n : result.implemented.nodes) {
        if (n.kind != bpmn::NodeKind::Task) continue;
        auto it = outcomeById.find(n.id);
        if (it != outcomeById.end()) rep.perTask.push_back(std::move(it->second));
    }
    return result;
}

nlohmann::ordered_json report_to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["process"] = r.processId;
    j["tasks"] = r.tasks;
    j["matched"] = r.matched;
    j["composed"] = r.composed;
    j["failed"] = r.failed;

    nlohmann::ordered_json cfgEcho;
    cfgEcho["match.theta"] = r.settings.matchTheta;
    cfgEcho["match.decay"] = r.settings.matchDecay;
    cfgEcho["match.max_hops"] = r.settings.matchMaxHops;
    cfgEcho["select.score_first"] = r.settings.selectScoreFirst;
    cfgEcho["compose.max_depth"] = r.settings.composeMaxDepth;
    cfgEcho["compose.use_isa"] = r.settings.composeUseIsa;
    cfgEcho["orchestrator.use_name"] = r.settings.orchestratorUseName;
    cfgEcho["chunk_pattern"] = r.settings.chunkPattern;
    j["config"] = cfgEcho;

    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (const TaskOutcome& t : r.perTask) {
        nlohmann::ordered_json e;
        e["id"] = t.taskId;
        e["status"] = std::string(task_status_name(t.status));
        if (t.status == TaskStatus::Failed) {
            e["reason"] = std::string(bpmn::unresolved_reason_name(*t.reason));
        } else {
            e["services"] = t.services;
            e["score"] = rounded2(t.score);
            e["qos"] = t.qos;
        }
        per.push_back(std::move(e));
    }
    j["perTask"] = per;

    nlohmann::ordered_json counters;
    counters["matchCalls"] = r.counters.matchCalls;
    counters["zeroCandidateResults"] = r.counters.zeroCandidateResults;
    counters["composeCalls"] = r.counters.composeCalls;
    counters["emptyGoalCount"] = r.counters.emptyGoalCount;
    counters["searchInvocations"] = r.counters.searchInvocations;
    counters["memoHits"] = r.counters.memoHits;
    j["counters"] = counters;
    return j;
}

}  // namespace weaver::orchestrator
