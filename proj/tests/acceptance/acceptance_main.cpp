// Acceptance gate for the process implementation pipeline. Each check prints
// exactly one PASS/FAIL line with its pinned tolerance; the exit code is the
// number of failed checks.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "weaver/bpmn.hpp"
#include "weaver/compose.hpp"
#include "weaver/keywords.hpp"
#include "weaver/matching.hpp"
#include "weaver/ontology.hpp"
#include "weaver/orchestrator.hpp"
#include "weaver/registry.hpp"
#include "weaver/selection.hpp"

namespace ts = weaver::testsupport;
namespace kw = weaver::keywords;
namespace on = weaver::ontology;
namespace rg = weaver::registry;
namespace cp = weaver::compose;
namespace orch = weaver::orchestrator;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

const on::ConceptGraph& fixture_graph() {
    static on::ConceptGraph g = [] {
        auto pattern = kw::ChunkPattern::compile("(ADJ|N)*N");
        return on::prune_baseline(
            on::build_service_ontology(ts::themed_registry(), ts::lexicon(), pattern));
    }();
    return g;
}

weaver::bpmn::ProcessGraph fixture_design() {
    return weaver::bpmn::parse_design(ts::read_file(ts::fixture_path("order_process.bpmn.xml")));
}

// 1. select_best vs brute-force lexicographic scan, 1000 random sets, < 5 s.
Outcome selection_oracle() {
    auto start = std::chrono::steady_clock::now();
    ts::Rng rng(1001);
    int agree = 0;
    const int total = 1000;
    for (int i = 0; i < total; ++i) {
        ts::QosCase c = ts::random_qos_case(rng);
        weaver::selection::Selection got =
            weaver::selection::select_best(c.candidates, c.registry, {});
        if (got.serviceId == ts::oracle_select(c)) ++agree;
    }
    double el = seconds_since(start);
    return {agree == total && el < 5.0,
            fmt("%d/%d agreements in %.2fs (limit 5s)", agree, total, el)};
}

// 2. compose vs exhaustive sequence enumeration, 200 random registries, < 60 s.
Outcome composition_oracle() {
    auto start = std::chrono::steady_clock::now();
    ts::Rng rng(2002);
    int agree = 0;
    const int total = 200;
    for (int i = 0; i < total; ++i) {
        ts::ComposeCase c = ts::random_compose_case(rng);
        std::optional<cp::Plan> want = ts::oracle_compose(c, 4);
        on::ProcessMemo memo;
        cp::ComposeStats stats;
        std::optional<cp::Plan> got = cp::compose(c.goal, c.registry, memo, {}, {}, stats);
        if (got.has_value() == want.has_value() && (!want || *got == *want)) ++agree;
    }
    double el = seconds_since(start);
    return {agree == total && el < 60.0,
            fmt("%d/%d plans identical in %.2fs (limit 60s)", agree, total, el)};
}

// 3. match_task at theta 0 vs per-service formula, 500 random graphs.
Outcome matching_oracle() {
    ts::Rng rng(3003);
    int agree = 0;
    const int total = 500;
    weaver::matching::MatchConfig cfg;
    cfg.theta = 0.0;
    for (int i = 0; i < total; ++i) {
        ts::MatchCase c = ts::random_match_case(rng);
        auto want = ts::oracle_match(c, cfg);
        auto got = weaver::matching::match_task(c.keywords, c.graph, c.registry, cfg);
        bool same = got.size() == want.size();
        for (std::size_t k = 0; same && k < got.size(); ++k) {
            same = got[k].serviceId == want[k].serviceId && got[k].score == want[k].score &&
                   got[k].matchedConcepts == want[k].matchedConcepts;
        }
        if (same) ++agree;
    }
    return {agree == total, fmt("%d/%d candidate lists identical (theta 0)", agree, total)};
}

// 4. prune_baseline keeps exactly {freq >= mean} plus forced isA parents.
Outcome pruning_invariant() {
    ts::Rng rng(4004);
    int good = 0;
    const int total = 100;
    for (int i = 0; i < total; ++i) {
        on::ConceptGraph g = ts::random_freq_graph(rng);
        on::ConceptGraph pruned = on::prune_baseline(g);
        if (pruned.concepts != ts::oracle_prune_kept(g)) continue;

        long long sum = 0;
        for (const auto& [c, f] : g.freq) sum += f;
        auto count = static_cast<long long>(g.freq.size());
        bool clean = true;
        for (const std::string& c : pruned.concepts) {
            if (g.freq.at(c) * count >= sum) continue;  // at or above the mean
            bool forced = false;
            for (const std::string& child : pruned.concepts) {
                auto it = g.isA.find(child);
                if (it != g.isA.end() && it->second.count(c)) forced = true;
            }
            if (!forced) clean = false;  // below-mean survivor with no kept child
        }
        if (clean) ++good;
    }
    return {good == total, fmt("%d/%d tables pruned to the exact survivor set", good, total)};
}

// 5. 10,000-line QoS log: order-free ingest, exact conservation per service.
Outcome ingest_conservation() {
    ts::Rng rng(5005);
    std::vector<std::string> ids = {"svc-q1", "svc-q2", "svc-q3", "svc-q4", "svc-q5", "svc-q6"};
    rg::Registry base;
    for (const std::string& id : ids) {
        rg::ServiceRecord rec;
        rec.id = id;
        rec.description = "probe";
        rec.outputs = {"thing"};
        base.records[id] = rec;
    }
    std::string log = ts::random_log(rng, ids, 10000);
    rg::IngestResult first = rg::ingest_qos_log(base, log);

    std::vector<std::string> lines;
    std::istringstream in(log);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string reshuffled;
    for (const std::string& l : lines) reshuffled += l + "\n";
    rg::IngestResult second = rg::ingest_qos_log(base, reshuffled);

    bool orderFree = first.registry.records == second.registry.records;
    std::map<std::string, ts::LogTally> tally = ts::tally_log(log);
    bool exact = true;
    for (const std::string& id : ids) {
        const rg::ServiceRecord& rec = first.registry.records.at(id);
        ts::LogTally t = tally.count(id) ? tally.at(id) : ts::LogTally{};
        long long failures = t.lines - t.successes;
        if (rec.qos.a != t.successes || rec.qos.a + failures != rec.qos.n ||
            rec.qos.n != t.lines || rec.qos.responseSumMs != t.responseMs) {
            exact = false;
        }
        if (t.lines > 0 && (!rec.lastUseDate || *rec.lastUseDate != t.maxDate)) exact = false;
    }
    return {orderFree && exact,
            fmt("%zu lines, %zu services: a+failures=n and response sums exact, "
                "shuffle-invariant",
                lines.size(), ids.size())};
}

// 6. Second resolution of the same unmatched task replays the memo.
Outcome memo_observability() {
    const rg::Registry reg = ts::themed_registry();
    on::ProcessMemo memo;
    auto r1 = orch::implement_process(fixture_design(), reg, fixture_graph(), memo, ts::lexicon(), {});
    auto r2 = orch::implement_process(fixture_design(), reg, fixture_graph(), memo, ts::lexicon(), {});

    long long searches = r1.report.counters.searchInvocations + r2.report.counters.searchInvocations;
    const weaver::bpmn::Node* a = r1.implemented.find_node("t5");
    const weaver::bpmn::Node* b = r2.implemented.find_node("t5");
    bool equalPlan = a && b && a->binding.has_value() && b->binding.has_value() &&
                     a->binding->services == b->binding->services &&
                     a->binding->qosAtSelection == b->binding->qosAtSelection;
    bool pass = searches == 1 && r2.report.counters.memoHits == 1 && equalPlan;
    return {pass, fmt("two resolutions, %lld total search (expected 1), memo hits on rerun: %lld",
                      searches, r2.report.counters.memoHits)};
}

// 7. Fixture end-to-end output is byte-identical across 10 runs and thread counts.
Outcome determinism() {
    const rg::Registry reg = ts::themed_registry();
    auto run = [&](int threads) {
        orch::Config cfg;
        cfg.threads = threads;
        on::ProcessMemo memo;
        auto res = orch::implement_process(fixture_design(), reg, fixture_graph(), memo,
                                           ts::lexicon(), cfg);
        return std::pair<std::string, std::string>(
            weaver::bpmn::emit_implemented(res.implemented),
            orch::report_to_json(res.report).dump(2));
    };
    auto [xml0, rep0] = run(0);
    int identical = 0;
    for (int i = 0; i < 10; ++i) {
        auto [xml, rep] = run(0);
        if (xml == xml0 && rep == rep0) ++identical;
    }
    auto [xml1, rep1] = run(1);
    auto [xml4, rep4] = run(4);
    bool threadsSame = xml1 == xml0 && xml4 == xml0 && rep1 == rep0 && rep4 == rep0;
    return {identical == 10 && threadsSame,
            fmt("%d/10 repeat runs and 1 vs 4 thread runs byte-identical", identical)};
}

// 8. Lossless round trips: 500 designs, 500 triple files, 500 descriptors.
Outcome round_trips() {
    ts::Rng rng(8008);
    int designs = 0, triples = 0, descriptors = 0;
    const int total = 500;
    for (int i = 0; i < total; ++i) {
        weaver::bpmn::ProcessGraph p = ts::random_process(rng);
        std::string x1 = weaver::bpmn::emit_design(p);
        if (weaver::bpmn::emit_design(weaver::bpmn::parse_design(x1)) == x1) ++designs;
    }
    for (int i = 0; i < total; ++i) {
        on::ConceptGraph g = ts::random_concept_graph(rng);
        if (on::load_triples(on::save_triples(g)) == g) ++triples;
    }
    for (int i = 0; i < total; ++i) {
        rg::ServiceRecord r = ts::random_descriptor(rng);
        if (rg::parse_descriptor(rg::save_descriptor(r)) == r) ++descriptors;
    }
    bool pass = designs == total && triples == total && descriptors == total;
    return {pass, fmt("designs %d/%d, triple files %d/%d, descriptors %d/%d lossless", designs,
                      total, triples, total, descriptors, total)};
}

// 9. Rule tagger: >= 90% token agreement on the 50-sentence hand-tagged corpus.
Outcome tagger_floor() {
    std::string text = ts::read_file(ts::fixture_path("corpus/tagged_sentences.txt"));
    std::istringstream in(text);
    std::string sentence;
    std::vector<std::pair<std::string, kw::Tag>> expected;
    int sentences = 0;
    long long agree = 0, total = 0;
    bool surfacesOk = true;

    auto flush = [&] {
        if (sentence.empty()) return;
        ++sentences;
        std::vector<kw::Token> tokens = kw::tokenize(sentence);
        kw::pos_tag(tokens, ts::lexicon());
        if (tokens.size() != expected.size()) {
            surfacesOk = false;
        } else {
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                if (tokens[i].surface != expected[i].first) surfacesOk = false;
                ++total;
                if (tokens[i].tag == expected[i].second) ++agree;
            }
        }
        sentence.clear();
        expected.clear();
    };

    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("#S ", 0) == 0) {
            flush();
            sentence = line.substr(3);
            continue;
        }
        if (line.empty() || line[0] == '#') {
            if (line.empty()) flush();
            continue;
        }
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || sentence.empty()) continue;
        auto tag = kw::tag_from_name(line.substr(tab + 1));
        if (!tag) {
            surfacesOk = false;
            continue;
        }
        expected.emplace_back(line.substr(0, tab), *tag);
    }
    flush();

    double acc = total > 0 ? static_cast<double>(agree) / static_cast<double>(total) : 0.0;
    bool pass = surfacesOk && sentences == 50 && acc >= 0.90;
    return {pass, fmt("%lld/%lld tokens (%.1f%%) over %d sentences (floor 90%%)", agree, total,
                      acc * 100.0, sentences)};
}

// 10. Counters prove: composition runs exactly when matching found nothing.
Outcome algorithm_fidelity() {
    const rg::Registry reg = ts::themed_registry();
    ts::Rng rng(10010);

    int good = 0;
    const int total = 101;  // the shipped fixture plus 100 random processes
    for (int i = 0; i < total; ++i) {
        weaver::bpmn::ProcessGraph design = i == 0 ? fixture_design() : ts::random_process(rng);
        on::ProcessMemo memo;
        auto res = orch::implement_process(design, reg, fixture_graph(), memo, ts::lexicon(), {});
        const orch::FidelityCounters& c = res.report.counters;

        long long matched = 0, composed = 0, noMatch = 0, compFailed = 0;
        bool goalsConsistent = true;
        for (const orch::TaskOutcome& t : res.report.perTask) {
            switch (t.status) {
                case orch::TaskStatus::Matched:
                    ++matched;
                    if (t.goal.has_value()) goalsConsistent = false;
                    break;
                case orch::TaskStatus::Composed:
                    ++composed;
                    if (!t.goal.has_value()) goalsConsistent = false;
                    break;
                case orch::TaskStatus::Failed:
                    if (!t.goal.has_value()) goalsConsistent = false;
                    else if (t.goal->required.empty()) ++noMatch;
                    else ++compFailed;
                    break;
            }
        }
        bool ok = goalsConsistent && c.matchCalls == res.report.tasks &&
                  c.zeroCandidateResults == composed + noMatch + compFailed &&
                  c.zeroCandidateResults == c.composeCalls + c.emptyGoalCount &&
                  c.composeCalls == composed + compFailed && c.emptyGoalCount == noMatch &&
                  c.searchInvocations + c.memoHits <= c.composeCalls &&
                  matched + composed + noMatch + compFailed == res.report.tasks;
        if (ok) ++good;
    }
    return {good == total,
            fmt("%d/%d processes: compose ran exactly on zero-candidate tasks", good, total)};
}

}  // namespace

int main() {
    struct Check {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Check> checks = {
        {"selection oracle", selection_oracle},
        {"composition oracle", composition_oracle},
        {"matching oracle", matching_oracle},
        {"pruning invariant", pruning_invariant},
        {"qos ingest conservation", ingest_conservation},
        {"memoization observability", memo_observability},
        {"end-to-end determinism", determinism},
        {"round trips", round_trips},
        {"tagger floor", tagger_floor},
        {"algorithm fidelity", algorithm_fidelity},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Outcome o;
        try {
            o = checks[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("[%2zu/10] %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", checks[i].name,
                    o.detail.c_str());
    }
    if (failures == 0)
        std::printf("acceptance: all 10 checks passed\n");
    else
        std::printf("acceptance: %d check(s) FAILED\n", failures);
    return failures;
}
