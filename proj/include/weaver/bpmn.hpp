#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/errors.hpp"

// Process documents: a minimal BPMN-like dialect with tasks, events,
// gateways, and sequence flows. Parsing validates the graph shape; emission
// is deterministic (fixed attribute order, two-space indent, LF, nodes in
// document order followed by edges in document order).
namespace weaver::bpmn {

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& message) : Error("SchemaViolation", message) {}
};

class GraphError : public Error {
public:
    GraphError(const std::string& what, std::string offendingId)
        : Error("GraphInvalid", what), offendingId_(std::move(offendingId)) {}

    const std::string& offending_id() const noexcept { return offendingId_; }

private:
    std::string offendingId_;
};

enum class NodeKind { Task, StartEvent, EndEvent, ExclusiveGateway, ParallelGateway };

enum class BindingKind { Single, Composite };

enum class UnresolvedReason { NoMatch, CompositionFailed };

std::string_view unresolved_reason_name(UnresolvedReason r);  // NO_MATCH / COMPOSITION_FAILED

struct Binding {
    BindingKind kind = BindingKind::Single;
    std::vector<std::string> services;       // execution order; size 1 when single
    std::set<std::string> matchedConcepts;   // in-memory only, not serialized
    long long qosAtSelection = 0;
    double score = 0.0;
};

struct IoSpec {
    std::set<std::string> inputs;
    std::set<std::string> outputs;

    bool empty() const { return inputs.empty() && outputs.empty(); }
    bool operator==(const IoSpec&) const = default;
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Task;
    std::string name;         // tasks only
    std::string description;  // tasks only
    IoSpec io;                // tasks only
    std::optional<Binding> binding;
    std::optional<UnresolvedReason> unresolved;
};

struct FlowEdge {
    std::string id;
    std::string source;
    std::string target;
};

struct ProcessGraph {
    std::string processId;
    std::set<std::string> processInputs;
    std::vector<Node> nodes;  // document order
    std::vector<FlowEdge> edges;

    const Node* find_node(std::string_view id) const;
    Node* find_node(std::string_view id);
};

enum class DiagCode {
    DuplicateId,
    NoStart,
    MultipleStart,
    NoEnd,
    DanglingEdge,
    SelfLoop,
    Unreachable,
    EmptyDescription,
};

std::string_view diag_code_name(DiagCode c);

struct Diagnostic {
    DiagCode code;
    std::string id;  // offending node or edge id ("" for graph-level)
    std::string message;
};

// Parses a design or implemented document (binding/unresolved children are
// accepted) and enforces the graph invariants. Throws XmlError, SchemaError,
// or GraphError.
ProcessGraph parse_design(std::string_view xmlText);

// Non-throwing invariant check for graphs built in memory.
std::vector<Diagnostic> validate(const ProcessGraph& graph);

// Every task must carry a binding or an unresolved annotation.
std::string emit_implemented(const ProcessGraph& graph);

// Same emitter without the resolution children.
std::string emit_design(const ProcessGraph& graph);

// Copy with bindings and unresolved annotations removed.
ProcessGraph strip_bindings(ProcessGraph graph);

// Kahn layering: rank 0 holds the start event; ties within a rank keep
// document order. Nodes on cycles (valid graphs may contain them as long as
// they stay reachable) are appended as one final rank in document order.
std::vector<std::vector<const Node*>> topological_ranks(const ProcessGraph& graph);

}  // namespace weaver::bpmn
