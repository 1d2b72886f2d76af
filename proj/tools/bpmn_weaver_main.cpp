#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weaver/bpmn.hpp"
#include "weaver/compose.hpp"
#include "weaver/config.hpp"
#include "weaver/errors.hpp"
#include "weaver/keywords.hpp"
#include "weaver/matching.hpp"
#include "weaver/ontology.hpp"
#include "weaver/orchestrator.hpp"
#include "weaver/registry.hpp"
#include "weaver/selection.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw weaver::Error("FileMissing", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw weaver::Error("FileWrite", "cannot write '" + path + "'");
    out << content;
    if (!out.flush()) throw weaver::Error("FileWrite", "cannot write '" + path + "'");
}

weaver::config::Settings settings_for(const std::string& configPath) {
    if (!configPath.empty()) return weaver::config::load_file(configPath);
    return weaver::config::from_env_or_defaults();
}

int run_build_ontology(const std::string& lexiconPath, const std::string& registryDir,
                       const std::string& outPath, bool noPrune, bool dump) {
    weaver::keywords::Lexicon lex = weaver::keywords::Lexicon::load_file(lexiconPath);
    weaver::registry::Registry reg = weaver::registry::load_registry_dir(registryDir);
    weaver::config::Settings st = weaver::config::from_env_or_defaults();
    auto pattern = weaver::keywords::ChunkPattern::compile(st.chunkPattern);
    weaver::ontology::ConceptGraph graph = weaver::ontology::build_service_ontology(reg, lex, pattern);
    if (!noPrune) graph = weaver::ontology::prune_baseline(graph);
    std::string triples = weaver::ontology::save_triples(graph);
    write_file(outPath, triples);
    if (dump) std::cout << triples;
    std::cerr << "wrote " << graph.concepts.size() << " concepts to " << outPath << "\n";
    return 0;
}

int run_implement(const std::string& lexiconPath, const std::string& processPath,
                  const std::string& registryDir, const std::string& ontologyPath,
                  const std::string& outPath, const std::string& reportPath,
                  const std::string& configPath, const std::string& memoPath, int threads) {
    weaver::orchestrator::Config cfg;
    cfg.settings = settings_for(configPath);
    cfg.threads = threads;

    weaver::keywords::Lexicon lex = weaver::keywords::Lexicon::load_file(lexiconPath);
    weaver::registry::Registry reg = weaver::registry::load_registry_dir(registryDir);
    weaver::ontology::ConceptGraph graph = weaver::ontology::load_triples(read_file(ontologyPath));
    weaver::bpmn::ProcessGraph design = weaver::bpmn::parse_design(read_file(processPath));

    weaver::ontology::ProcessMemo memo;
    if (!memoPath.empty() && fs::exists(memoPath)) {
        memo = weaver::ontology::load_memo(read_file(memoPath));
    }

    weaver::orchestrator::ImplementResult result =
        weaver::orchestrator::implement_process(design, reg, graph, memo, lex, cfg);

    write_file(outPath, weaver::bpmn::emit_implemented(result.implemented));
    if (!memoPath.empty()) write_file(memoPath, weaver::ontology::save_memo(memo));
    if (!reportPath.empty()) {
        write_file(reportPath, weaver::orchestrator::report_to_json(result.report).dump(2) + "\n");
    }

    const weaver::orchestrator::Report& rep = result.report;
    std::cerr << rep.processId << ": " << rep.tasks << " tasks, " << rep.matched << " matched, "
              << rep.composed << " composed, " << rep.failed << " unresolved\n";
    return result.all_bound() ? 0 : 2;
}

int run_ingest_log(const std::string& registryDir, const std::string& logPath) {
    if (!fs::is_directory(registryDir)) {
        throw weaver::Error("RegistryDirMissing", "registry directory '" + registryDir + "' not found");
    }
    std::vector<std::pair<std::string, std::string>> files;  // path, service id
    for (const auto& entry : fs::directory_iterator(registryDir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".xml") continue;
        files.emplace_back(entry.path().string(), std::string());
    }
    std::sort(files.begin(), files.end());
    for (auto& [path, id] : files) {
        id = weaver::registry::parse_descriptor(read_file(path)).id;
    }

    weaver::registry::Registry reg = weaver::registry::load_registry_dir(registryDir);
    weaver::registry::IngestResult ingest = weaver::registry::ingest_qos_log(reg, read_file(logPath));
    for (const std::string& warning : ingest.warnings) std::cerr << "warning: " << warning << "\n";

    for (const auto& [path, id] : files) {
        const auto it = ingest.registry.records.find(id);
        if (it == ingest.registry.records.end()) continue;
        write_file(path, weaver::registry::save_descriptor(it->second));
    }
    std::cerr << "updated " << files.size() << " descriptors in " << registryDir << "\n";
    return 0;
}

void print_keywords(std::ostream& os, const weaver::keywords::KeywordSet& k) {
    os << "  verbs:";
    for (const std::string& v : k.verbs) os << " " << v;
    if (k.verbs.empty()) os << " (none)";
    os << "\n  noun phrases:";
    for (const std::string& p : k.nounPhrases) os << " \"" << p << "\"";
    if (k.nounPhrases.empty()) os << " (none)";
    os << "\n";
}

int run_explain(const std::string& lexiconPath, const std::string& processPath,
                const std::string& registryDir, const std::string& ontologyPath,
                const std::string& taskId, const std::string& configPath) {
    weaver::orchestrator::Config cfg;
    cfg.settings = settings_for(configPath);

    weaver::keywords::Lexicon lex = weaver::keywords::Lexicon::load_file(lexiconPath);
    weaver::registry::Registry reg = weaver::registry::load_registry_dir(registryDir);
    weaver::ontology::ConceptGraph graph = weaver::ontology::load_triples(read_file(ontologyPath));
    weaver::bpmn::ProcessGraph design = weaver::bpmn::parse_design(read_file(processPath));

    const weaver::bpmn::Node* node = design.find_node(taskId);
    if (node == nullptr || node->kind != weaver::bpmn::NodeKind::Task) {
        throw weaver::Error("UnknownTask", "process has no task '" + taskId + "'");
    }

    weaver::ontology::ProcessMemo memo;
    weaver::orchestrator::ImplementResult result =
        weaver::orchestrator::implement_process(design, reg, graph, memo, lex, cfg);

    const weaver::orchestrator::TaskOutcome* outcome = nullptr;
    for (const auto& t : result.report.perTask) {
        if (t.taskId == taskId) outcome = &t;
    }
    if (outcome == nullptr) throw weaver::Error("UnknownTask", "process has no task '" + taskId + "'");

    std::ostream& os = std::cout;
    os << "task " << taskId << " (" << weaver::orchestrator::task_status_name(outcome->status) << ")\n";
    print_keywords(os, outcome->keywords);

    weaver::matching::MatchConfig matchCfg{cfg.settings.matchTheta, cfg.settings.matchDecay,
                                           cfg.settings.matchMaxHops};
    auto candidates = weaver::matching::match_task_serial(outcome->keywords, graph, reg, matchCfg);
    if (candidates.empty()) {
        os << "  candidates: none at theta " << cfg.settings.matchTheta << "\n";
    } else {
        os << "  candidates:\n";
        for (const auto& c : candidates) {
            auto ex = weaver::matching::explain_match(outcome->keywords, graph, reg, c.serviceId, matchCfg);
            os << "    " << c.serviceId << " score " << c.score << "\n";
            for (const auto& t : ex.traces) {
                if (!t.matched) continue;
                os << "      '" << t.keyword << "' via '" << t.viaConcept << "' (" << t.hops
                   << " hops, +" << t.contribution << ")\n";
            }
        }
    }

    if (outcome->goal) {
        os << "  goal required:";
        for (const std::string& t : outcome->goal->required) os << " " << t;
        if (outcome->goal->required.empty()) os << " (none)";
        os << "\n  goal available:";
        for (const std::string& t : outcome->goal->available) os << " " << t;
        os << "\n";
    }

    switch (outcome->status) {
        case weaver::orchestrator::TaskStatus::Matched:
            os << "  selected: " << outcome->services.front() << " (qos " << outcome->qos << ")\n";
            break;
        case weaver::orchestrator::TaskStatus::Composed: {
            os << "  composed:";
            for (const std::string& s : outcome->services) os << " " << s;
            os << " (total qos " << outcome->qos << ")\n";
            break;
        }
        case weaver::orchestrator::TaskStatus::Failed:
            os << "  unresolved: " << weaver::bpmn::unresolved_reason_name(*outcome->reason) << "\n";
            break;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resolves design-stage process tasks to registered services"};
    app.require_subcommand(1);

    std::string lexiconPath = "lexicon/en.tsv";
    app.add_option("--lexicon", lexiconPath, "POS lexicon file")->capture_default_str();

    auto* build = app.add_subcommand("build-ontology", "Derive concept triples from a service registry");
    std::string buildRegistry, buildOut;
    bool buildNoPrune = false;
    bool buildDump = false;
    build->add_option("-r,--registry", buildRegistry, "registry directory")->required();
    build->add_option("-o,--output", buildOut, "triples output file")->required();
    build->add_flag("--no-prune", buildNoPrune, "keep below-average concepts");
    build->add_flag("--dump", buildDump, "also print triples to stdout");

    auto* impl = app.add_subcommand("implement", "Bind every task of a design document to services");
    std::string implProcess, implRegistry, implOntology, implOut, implReport, implConfig, implMemo;
    int implThreads = 0;
    impl->add_option("-p,--process", implProcess, "design process document")->required();
    impl->add_option("-r,--registry", implRegistry, "registry directory")->required();
    impl->add_option("-g,--ontology", implOntology, "concept triples file")->required();
    impl->add_option("-o,--output", implOut, "implemented document output")->required();
    impl->add_option("--report", implReport, "write a JSON run report here");
    impl->add_option("--config", implConfig, "settings file (overrides BPMN_WEAVER_CONFIG)");
    impl->add_option("--memo", implMemo, "composition memo file, read and updated");
    impl->add_option("--threads", implThreads, "worker threads (0 = default)");

    auto* ingest = app.add_subcommand("ingest-log", "Fold an execution log into the registry QoS counters");
    std::string ingestRegistry, ingestLog;
    ingest->add_option("-r,--registry", ingestRegistry, "registry directory, rewritten in place")->required();
    ingest->add_option("-l,--log", ingestLog, "CSV execution log")->required();

    auto* explain = app.add_subcommand("explain", "Show how one task resolved");
    std::string explProcess, explRegistry, explOntology, explTask, explConfig;
    explain->add_option("-p,--process", explProcess, "design process document")->required();
    explain->add_option("-r,--registry", explRegistry, "registry directory")->required();
    explain->add_option("-g,--ontology", explOntology, "concept triples file")->required();
    explain->add_option("--task", explTask, "task id to explain")->required();
    explain->add_option("--config", explConfig, "settings file (overrides BPMN_WEAVER_CONFIG)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (build->parsed()) {
            return run_build_ontology(lexiconPath, buildRegistry, buildOut, buildNoPrune, buildDump);
        }
        if (impl->parsed()) {
            return run_implement(lexiconPath, implProcess, implRegistry, implOntology, implOut,
                                 implReport, implConfig, implMemo, implThreads);
        }
        if (ingest->parsed()) {
            return run_ingest_log(ingestRegistry, ingestLog);
        }
        if (explain->parsed()) {
            return run_explain(lexiconPath, explProcess, explRegistry, explOntology, explTask, explConfig);
        }
    } catch (const weaver::Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
