#include "weaver/bpmn.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <queue>
#include <sstream>

#include "weaver/xml.hpp"

namespace weaver::bpmn {
namespace {

std::set<std::string> split_csv_set(std::string_view value) {
    std::set<std::string> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        std::size_t comma = value.find(',', pos);
        std::string_view part = value.substr(pos, comma == std::string_view::npos ? value.size() - pos : comma - pos);
        pos = comma == std::string_view::npos ? value.size() + 1 : comma + 1;
        std::size_t b = 0, e = part.size();
        while (b < e && std::isspace(static_cast<unsigned char>(part[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(part[e - 1]))) --e;
        if (e > b) out.insert(std::string(part.substr(b, e - b)));
    }
    return out;
}

std::string join_sorted(const std::set<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ',';
        out += item;
    }
    return out;
}

std::string require_attr(const xml::Element& el, std::string_view name) {
    auto v = el.attr(name);
    if (!v) throw SchemaError("<" + el.name + "> missing required attribute '" + std::string(name) + "'");
    return *v;
}

void reject_unknown_attrs(const xml::Element& el, std::initializer_list<std::string_view> allowed) {
    for (const auto& [name, value] : el.attrs) {
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
            throw SchemaError("<" + el.name + "> has unknown attribute '" + name + "'");
    }
}

void reject_stray_text(const xml::Element& el) {
    for (char c : el.text) {
        if (!std::isspace(static_cast<unsigned char>(c)))
            throw SchemaError("<" + el.name + "> must not contain character data");
    }
}

Binding parse_binding(const xml::Element& el) {
    reject_unknown_attrs(el, {"kind", "services", "score", "qos"});
    Binding b;
    std::string kind = require_attr(el, "kind");
    if (kind == "single")
        b.kind = BindingKind::Single;
    else if (kind == "composite")
        b.kind = BindingKind::Composite;
    else
        throw SchemaError("<binding> kind must be 'single' or 'composite', got '" + kind + "'");

    std::string services = require_attr(el, "services");
    std::size_t pos = 0;
    while (pos <= services.size()) {
        std::size_t comma = services.find(',', pos);
        std::string part = services.substr(pos, comma == std::string::npos ? services.size() - pos : comma - pos);
        pos = comma == std::string::npos ? services.size() + 1 : comma + 1;
        if (part.empty()) throw SchemaError("<binding> services list has an empty entry");
        b.services.push_back(std::move(part));
    }
    if (b.kind == BindingKind::Single && b.services.size() != 1)
        throw SchemaError("<binding kind=\"single\"> must list exactly one service");
    if (b.kind == BindingKind::Composite && b.services.size() < 2)
        throw SchemaError("<binding kind=\"composite\"> must list at least two services");

    std::string scoreStr = require_attr(el, "score"), qosStr = require_attr(el, "qos");
    try {
        std::size_t end = 0;
        b.score = std::stod(scoreStr, &end);
        if (end != scoreStr.size()) throw std::invalid_argument("");
        b.qosAtSelection = std::stoll(qosStr, &end);
        if (end != qosStr.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw SchemaError("<binding> score/qos must be numeric");
    }
    if (b.score < 0.0 || b.score > 1.0) throw SchemaError("<binding> score out of [0,1]");
    if (!el.children.empty()) throw SchemaError("<binding> must be empty");
    return b;
}

Node parse_task(const xml::Element& el) {
    reject_unknown_attrs(el, {"id", "name"});
    Node node;
    node.kind = NodeKind::Task;
    node.id = require_attr(el, "id");
    node.name = el.attr("name").value_or("");
    reject_stray_text(el);

    bool sawDescription = false, sawIo = false, sawResolution = false;
    for (const xml::Element& child : el.children) {
        if (child.name == "description") {
            if (sawDescription) throw SchemaError("task '" + node.id + "' has multiple <description> elements");
            sawDescription = true;
            if (!child.children.empty()) throw SchemaError("<description> must contain only text");
            node.description = child.text;
        } else if (child.name == "io") {
            if (sawIo) throw SchemaError("task '" + node.id + "' has multiple <io> elements");
            sawIo = true;
            reject_unknown_attrs(child, {"inputs", "outputs"});
            reject_stray_text(child);
            if (!child.children.empty()) throw SchemaError("<io> must be empty");
            node.io.inputs = split_csv_set(child.attr("inputs").value_or(""));
            node.io.outputs = split_csv_set(child.attr("outputs").value_or(""));
        } else if (child.name == "binding") {
            if (sawResolution) throw SchemaError("task '" + node.id + "' has multiple resolution elements");
            sawResolution = true;
            node.binding = parse_binding(child);
        } else if (child.name == "unresolved") {
            if (sawResolution) throw SchemaError("task '" + node.id + "' has multiple resolution elements");
            sawResolution = true;
            reject_unknown_attrs(child, {"reason"});
            if (!child.children.empty()) throw SchemaError("<unresolved> must be empty");
            std::string reason = require_attr(child, "reason");
            if (reason == "NO_MATCH")
                node.unresolved = UnresolvedReason::NoMatch;
            else if (reason == "COMPOSITION_FAILED")
                node.unresolved = UnresolvedReason::CompositionFailed;
            else
                throw SchemaError("<unresolved> has unknown reason '" + reason + "'");
        } else {
            throw SchemaError("task '" + node.id + "' has unknown child <" + child.name + ">");
        }
    }
    return node;
}

void check_graph(const ProcessGraph& g) {
    std::vector<Diagnostic> diags = validate(g);
    if (!diags.empty()) {
        const Diagnostic& d = diags.front();
        throw GraphError(d.message, d.id);
    }
}

const char* kind_element(NodeKind k) {
    switch (k) {
        case NodeKind::Task: return "task";
        case NodeKind::StartEvent: return "startEvent";
        case NodeKind::EndEvent: return "endEvent";
        case NodeKind::ExclusiveGateway: return "exclusiveGateway";
        case NodeKind::ParallelGateway: return "parallelGateway";
    }
    return "task";
}

std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", score);
    return buf;
}

std::string emit(const ProcessGraph& g, bool withResolution) {
    std::ostringstream out;
    out << "<process id=\"" << xml::escape_attr(g.processId) << "\"";
    if (!g.processInputs.empty()) out << " inputs=\"" << xml::escape_attr(join_sorted(g.processInputs)) << "\"";
    out << ">\n";

    for (const Node& n : g.nodes) {
        if (n.kind != NodeKind::Task) {
            out << "  <" << kind_element(n.kind) << " id=\"" << xml::escape_attr(n.id) << "\"/>\n";
            continue;
        }
        out << "  <task id=\"" << xml::escape_attr(n.id) << "\" name=\"" << xml::escape_attr(n.name) << "\">\n";
        out << "    <description>" << xml::escape_text(n.description) << "</description>\n";
        if (!n.io.empty()) {
            out << "    <io";
            if (!n.io.inputs.empty()) out << " inputs=\"" << xml::escape_attr(join_sorted(n.io.inputs)) << "\"";
            if (!n.io.outputs.empty()) out << " outputs=\"" << xml::escape_attr(join_sorted(n.io.outputs)) << "\"";
            out << "/>\n";
        }
        if (withResolution) {
            if (n.binding) {
                const Binding& b = *n.binding;
                std::string services;
                for (const auto& s : b.services) {
                    if (!services.empty()) services += ',';
                    services += s;
                }
                out << "    <binding kind=\"" << (b.kind == BindingKind::Single ? "single" : "composite")
                    << "\" services=\"" << xml::escape_attr(services) << "\" score=\"" << format_score(b.score)
                    << "\" qos=\"" << b.qosAtSelection << "\"/>\n";
            } else if (n.unresolved) {
                out << "    <unresolved reason=\"" << unresolved_reason_name(*n.unresolved) << "\"/>\n";
            }
        }
        out << "  </task>\n";
    }
    for (const FlowEdge& e : g.edges) {
        out << "  <sequenceFlow id=\"" << xml::escape_attr(e.id) << "\" source=\"" << xml::escape_attr(e.source)
            << "\" target=\"" << xml::escape_attr(e.target) << "\"/>\n";
    }
    out << "</process>\n";
    return out.str();
}

}  // namespace

std::string_view unresolved_reason_name(UnresolvedReason r) {
    return r == UnresolvedReason::NoMatch ? "NO_MATCH" : "COMPOSITION_FAILED";
}

std::string_view diag_code_name(DiagCode c) {
    switch (c) {
        case DiagCode::DuplicateId: return "DuplicateId";
        case DiagCode::NoStart: return "NoStart";
        case DiagCode::MultipleStart: return "MultipleStart";
        case DiagCode::NoEnd: return "NoEnd";
        case DiagCode::DanglingEdge: return "DanglingEdge";
        case DiagCode::SelfLoop: return "SelfLoop";
        case DiagCode::Unreachable: return "Unreachable";
        case DiagCode::EmptyDescription: return "EmptyDescription";
    }
    return "";
}

const Node* ProcessGraph::find_node(std::string_view id) const {
    for (const Node& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

Node* ProcessGraph::find_node(std::string_view id) {
    for (Node& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

ProcessGraph parse_design(std::string_view xmlText) {
    xml::Element root = xml::parse(xmlText);
    if (root.name != "process") throw SchemaError("root element must be <process>, got <" + root.name + ">");
    reject_unknown_attrs(root, {"id", "inputs"});
    reject_stray_text(root);

    ProcessGraph g;
    g.processId = require_attr(root, "id");
    g.processInputs = split_csv_set(root.attr("inputs").value_or(""));

    for (const xml::Element& child : root.children) {
        if (child.name == "task") {
            g.nodes.push_back(parse_task(child));
        } else if (child.name == "startEvent" || child.name == "endEvent" || child.name == "exclusiveGateway" ||
                   child.name == "parallelGateway") {
            reject_unknown_attrs(child, {"id"});
            reject_stray_text(child);
            if (!child.children.empty()) throw SchemaError("<" + child.name + "> must be empty");
            Node n;
            n.id = require_attr(child, "id");
            n.kind = child.name == "startEvent"        ? NodeKind::StartEvent
                     : child.name == "endEvent"        ? NodeKind::EndEvent
                     : child.name == "exclusiveGateway" ? NodeKind::ExclusiveGateway
                                                        : NodeKind::ParallelGateway;
            g.nodes.push_back(std::move(n));
        } else if (child.name == "sequenceFlow") {
            reject_unknown_attrs(child, {"id", "source", "target"});
            reject_stray_text(child);
            if (!child.children.empty()) throw SchemaError("<sequenceFlow> must be empty");
            FlowEdge e;
            e.id = require_attr(child, "id");
            e.source = require_attr(child, "source");
            e.target = require_attr(child, "target");
            g.edges.push_back(std::move(e));
        } else {
            throw SchemaError("<process> has unknown child <" + child.name + ">");
        }
    }

    check_graph(g);
    return g;
}

std::vector<Diagnostic> validate(const ProcessGraph& g) {
    std::vector<Diagnostic> diags;
    auto report = [&diags](DiagCode code, const std::string& id, std::string message) {
        diags.push_back(Diagnostic{code, id, std::move(message)});
    };

    std::map<std::string, std::size_t> ids;
    for (const Node& n : g.nodes) {
        if (++ids[n.id] == 2) report(DiagCode::DuplicateId, n.id, "duplicate node id '" + n.id + "'");
    }

    std::size_t starts = 0, ends = 0;
    for (const Node& n : g.nodes) {
        if (n.kind == NodeKind::StartEvent) ++starts;
        if (n.kind == NodeKind::EndEvent) ++ends;
        if (n.kind == NodeKind::Task && n.description.empty())
            report(DiagCode::EmptyDescription, n.id, "task '" + n.id + "' has an empty description");
    }
    if (starts == 0) report(DiagCode::NoStart, "", "process has no start event");
    if (starts > 1) report(DiagCode::MultipleStart, "", "process has " + std::to_string(starts) + " start events");
    if (ends == 0) report(DiagCode::NoEnd, "", "process has no end event");

    for (const FlowEdge& e : g.edges) {
        bool srcOk = ids.count(e.source) > 0, tgtOk = ids.count(e.target) > 0;
        if (!srcOk || !tgtOk) {
            report(DiagCode::DanglingEdge, e.id,
                   "flow '" + e.id + "' references missing node '" + (srcOk ? e.target : e.source) + "'");
            continue;
        }
        if (e.source == e.target) report(DiagCode::SelfLoop, e.id, "flow '" + e.id + "' is a self-loop");
    }

    // Reachability from the start event over intact edges.
    if (starts == 1) {
        std::string startId;
        for (const Node& n : g.nodes)
            if (n.kind == NodeKind::StartEvent) startId = n.id;
        std::set<std::string> seen{startId};
        std::queue<std::string> pending;
        pending.push(startId);
        while (!pending.empty()) {
            std::string cur = std::move(pending.front());
            pending.pop();
            for (const FlowEdge& e : g.edges) {
                if (e.source == cur && ids.count(e.target) && seen.insert(e.target).second) pending.push(e.target);
            }
        }
        for (const Node& n : g.nodes) {
            if (!seen.count(n.id))
                report(DiagCode::Unreachable, n.id, "node '" + n.id + "' is unreachable from the start event");
        }
    }
    return diags;
}

std::string emit_implemented(const ProcessGraph& g) {
    for (const Node& n : g.nodes) {
        if (n.kind == NodeKind::Task && !n.binding && !n.unresolved)
            throw Error("UnboundTask", "task '" + n.id + "' has neither binding nor unresolved annotation");
    }
    return emit(g, true);
}

std::string emit_design(const ProcessGraph& g) { return emit(g, false); }

ProcessGraph strip_bindings(ProcessGraph g) {
    for (Node& n : g.nodes) {
        n.binding.reset();
        n.unresolved.reset();
    }
    return g;
}

std::vector<std::vector<const Node*>> topological_ranks(const ProcessGraph& g) {
    std::map<std::string, std::size_t> indexOf;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) indexOf[g.nodes[i].id] = i;

    std::vector<std::size_t> indegree(g.nodes.size(), 0);
    std::vector<std::vector<std::size_t>> out(g.nodes.size());
    for (const FlowEdge& e : g.edges) {
        auto s = indexOf.find(e.source), t = indexOf.find(e.target);
        if (s == indexOf.end() || t == indexOf.end()) continue;
        out[s->second].push_back(t->second);
        ++indegree[t->second];
    }

    std::vector<std::vector<const Node*>> ranks;
    std::vector<char> placed(g.nodes.size(), 0);
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (indegree[i] == 0) frontier.push_back(i);

    while (!frontier.empty()) {
        std::sort(frontier.begin(), frontier.end());  // document order within a rank
        std::vector<const Node*> rank;
        std::vector<std::size_t> next;
        for (std::size_t i : frontier) {
            placed[i] = 1;
            rank.push_back(&g.nodes[i]);
        }
        for (std::size_t i : frontier) {
            for (std::size_t t : out[i]) {
                if (--indegree[t] == 0 && !placed[t]) next.push_back(t);
            }
        }
        ranks.push_back(std::move(rank));
        frontier = std::move(next);
    }

    // Anything still unplaced sits on a cycle; give those nodes one trailing
    // rank in document order so resolution still visits them.
    std::vector<const Node*> leftovers;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (!placed[i]) leftovers.push_back(&g.nodes[i]);
    if (!leftovers.empty()) ranks.push_back(std::move(leftovers));
    return ranks;
}

}  // namespace weaver::bpmn
