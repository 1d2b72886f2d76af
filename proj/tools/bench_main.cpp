// Compares the serial reference implementations against the OpenMP variants
// on synthetic data: ontology construction, task matching, and full process
// implementation. Exits nonzero if any pair disagrees on the result.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weaver/bpmn.hpp"
#include "weaver/config.hpp"
#include "weaver/keywords.hpp"
#include "weaver/matching.hpp"
#include "weaver/ontology.hpp"
#include "weaver/orchestrator.hpp"
#include "weaver/registry.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const std::vector<std::string> kVerbs = {
    "validate", "check", "send",   "create",  "render", "store",    "schedule", "print",
    "notify",   "record", "charge", "update",  "review", "dispatch", "confirm",  "transfer",
};

const std::vector<std::string> kObjects = {
    "customer order",      "stock level",        "credit card payment", "confirmation email",
    "customer invoice",    "pdf file",           "shipping label",      "parcel pickup",
    "crm system",          "sms message",        "storage folder",      "invoice document",
    "courier company",     "payment receipt",    "delivery slot",       "billing summary",
};

std::string make_description(std::mt19937& rng, int sentences) {
    std::uniform_int_distribution<std::size_t> verb(0, kVerbs.size() - 1);
    std::uniform_int_distribution<std::size_t> object(0, kObjects.size() - 1);
    std::string text;
    for (int s = 0; s < sentences; ++s) {
        std::string v = kVerbs[verb(rng)];
        v[0] = static_cast<char>(v[0] - 'a' + 'A');
        if (!text.empty()) text += ' ';
        text += v + " the " + kObjects[object(rng)] + ".";
    }
    return text;
}

weaver::registry::Registry make_registry(int services, unsigned seed) {
    std::mt19937 rng(seed);
    weaver::registry::Registry reg;
    const int typePool = 24;
    for (int i = 0; i < services; ++i) {
        weaver::registry::ServiceRecord rec;
        char id[32];
        std::snprintf(id, sizeof id, "svc-%05d", i);
        rec.id = id;
        rec.publisher = "bench";
        rec.componentType = weaver::registry::ComponentType::CallServiceTask;
        rec.url = "https://services.example/" + rec.id;
        rec.description = make_description(rng, 2);
        rec.operationName = "run";
        rec.inputs = {"type" + std::to_string(i % typePool)};
        rec.outputs = {"type" + std::to_string((i + 1) % typePool)};
        rec.qos.n = 10 + i % 40;
        rec.qos.a = rec.qos.n - (i % 7);
        rec.qos.responseSumMs = 100 * rec.qos.n + i;
        reg.records.emplace(rec.id, std::move(rec));
    }
    return reg;
}

weaver::bpmn::ProcessGraph make_wide_process(int tasks, unsigned seed) {
    std::mt19937 rng(seed);
    weaver::bpmn::ProcessGraph g;
    g.processId = "bench-process";
    g.processInputs = {"type0"};

    weaver::bpmn::Node start;
    start.id = "start";
    start.kind = weaver::bpmn::NodeKind::StartEvent;
    g.nodes.push_back(start);
    for (int i = 0; i < tasks; ++i) {
        weaver::bpmn::Node t;
        t.id = "t" + std::to_string(i);
        t.kind = weaver::bpmn::NodeKind::Task;
        t.name = "Task " + std::to_string(i);
        t.description = make_description(rng, 3);
        g.nodes.push_back(std::move(t));
    }
    weaver::bpmn::Node end;
    end.id = "end";
    end.kind = weaver::bpmn::NodeKind::EndEvent;
    g.nodes.push_back(end);

    int edge = 0;
    for (int i = 0; i < tasks; ++i) {
        std::string tid = "t" + std::to_string(i);
        g.edges.push_back({"f" + std::to_string(edge++), "start", tid});
        g.edges.push_back({"f" + std::to_string(edge++), tid, "end"});
    }
    return g;
}

struct Row {
    const char* name;
    double serialMs;
    double parallelMs;
};

void print_row(const Row& r) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", r.name, r.serialMs, r.parallelMs,
                r.parallelMs > 0 ? r.serialMs / r.parallelMs : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
    int services = 600;
    int tasks = 48;
    int matchIters = 40;
    int repeats = 3;
    CLI::App app{"Serial vs parallel kernel comparison"};
    app.add_option("--services", services, "synthetic registry size")->capture_default_str();
    app.add_option("--tasks", tasks, "tasks in the synthetic process")->capture_default_str();
    app.add_option("--match-iters", matchIters, "matching repetitions per sample")->capture_default_str();
    app.add_option("--repeats", repeats, "samples per kernel, fastest wins")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; parallel variants run serially\n");
#endif
    std::printf("registry %d services, process %d tasks\n\n", services, tasks);

    weaver::config::Settings st;
    weaver::keywords::Lexicon lex = weaver::keywords::Lexicon::load_file(WEAVER_LEXICON_PATH);
    auto pattern = weaver::keywords::ChunkPattern::compile(st.chunkPattern);
    weaver::registry::Registry reg = make_registry(services, 42);

    // Ontology construction.
    weaver::ontology::ConceptGraph serialGraph;
    weaver::ontology::ConceptGraph parallelGraph;
    Row ontologyRow{"ontology build", 1e300, 1e300};
    for (int i = 0; i < repeats; ++i) {
        auto t0 = Clock::now();
        serialGraph = weaver::ontology::build_service_ontology_serial(reg, lex, pattern);
        ontologyRow.serialMs = std::min(ontologyRow.serialMs, ms_since(t0));
        t0 = Clock::now();
        parallelGraph = weaver::ontology::build_service_ontology(reg, lex, pattern);
        ontologyRow.parallelMs = std::min(ontologyRow.parallelMs, ms_since(t0));
    }
    if (!(serialGraph == parallelGraph)) {
        std::fprintf(stderr, "MISMATCH: ontology builds disagree\n");
        return 1;
    }
    print_row(ontologyRow);

    // Matching.
    weaver::matching::MatchConfig mcfg{st.matchTheta, st.matchDecay, st.matchMaxHops};
    std::mt19937 rng(7);
    weaver::keywords::KeywordSet query =
        weaver::keywords::extract_keywords(make_description(rng, 4), lex, pattern);
    std::vector<weaver::matching::Candidate> serialMatch;
    std::vector<weaver::matching::Candidate> parallelMatch;
    Row matchRow{"task matching", 1e300, 1e300};
    for (int i = 0; i < repeats; ++i) {
        auto t0 = Clock::now();
        for (int k = 0; k < matchIters; ++k) {
            serialMatch = weaver::matching::match_task_serial(query, parallelGraph, reg, mcfg);
        }
        matchRow.serialMs = std::min(matchRow.serialMs, ms_since(t0));
        t0 = Clock::now();
        for (int k = 0; k < matchIters; ++k) {
            parallelMatch = weaver::matching::match_task(query, parallelGraph, reg, mcfg);
        }
        matchRow.parallelMs = std::min(matchRow.parallelMs, ms_since(t0));
    }
    bool matchEqual = serialMatch.size() == parallelMatch.size();
    for (std::size_t i = 0; matchEqual && i < serialMatch.size(); ++i) {
        matchEqual = serialMatch[i].serviceId == parallelMatch[i].serviceId &&
                     serialMatch[i].score == parallelMatch[i].score;
    }
    if (!matchEqual) {
        std::fprintf(stderr, "MISMATCH: matching variants disagree\n");
        return 1;
    }
    print_row(matchRow);

    // Whole-process implementation, one thread vs all.
    weaver::bpmn::ProcessGraph process = make_wide_process(tasks, 99);
    weaver::orchestrator::Config oneThread{st, 1};
    weaver::orchestrator::Config allThreads{st, 0};
    std::string serialDoc;
    std::string parallelDoc;
    Row implementRow{"process implementation", 1e300, 1e300};
    for (int i = 0; i < repeats; ++i) {
        weaver::ontology::ProcessMemo memoA;
        auto t0 = Clock::now();
        auto a = weaver::orchestrator::implement_process(process, reg, parallelGraph, memoA, lex, oneThread);
        implementRow.serialMs = std::min(implementRow.serialMs, ms_since(t0));
        serialDoc = weaver::bpmn::emit_implemented(a.implemented);

        weaver::ontology::ProcessMemo memoB;
        t0 = Clock::now();
        auto b = weaver::orchestrator::implement_process(process, reg, parallelGraph, memoB, lex, allThreads);
        implementRow.parallelMs = std::min(implementRow.parallelMs, ms_since(t0));
        parallelDoc = weaver::bpmn::emit_implemented(b.implemented);
    }
    if (serialDoc != parallelDoc) {
        std::fprintf(stderr, "MISMATCH: implementation outputs differ across thread counts\n");
        return 1;
    }
    print_row(implementRow);

    std::printf("\nall parallel kernels agree with their serial references\n");
    return 0;
}
