#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/errors.hpp"

// Service registry: descriptor parsing, QoS log ingestion, snapshots.
// Registries are plain values; ingest returns a new registry with a bumped
// snapshot version, so any copy a reader holds stays stable by construction.
namespace weaver::registry {

class DescriptorError : public Error {
public:
    explicit DescriptorError(const std::string& message) : Error("MalformedDescriptor", message) {}
};

class DuplicateServiceIdError : public Error {
public:
    explicit DuplicateServiceIdError(const std::string& id)
        : Error("DuplicateServiceId", "duplicate service id '" + id + "'") {}
};

class LogLineError : public Error {
public:
    LogLineError(std::size_t lineNo, const std::string& message)
        : Error("MalformedLogLine", "log line " + std::to_string(lineNo) + ": " + message), lineNo_(lineNo) {}

    std::size_t line() const noexcept { return lineNo_; }

private:
    std::size_t lineNo_;
};

enum class ComponentType { HumanTask, BpmnProcess, CallServiceTask };

std::string_view component_type_name(ComponentType t);
std::optional<ComponentType> component_type_from(std::string_view name);

struct QosRecord {
    long long a = 0;             // successful executions
    long long n = 0;             // total calls
    long long responseSumMs = 0;

    // Average response time; only defined after at least one call.
    bool has_avg() const { return n > 0; }
    double avg_response_ms() const { return static_cast<double>(responseSumMs) / static_cast<double>(n); }

    bool operator==(const QosRecord&) const = default;
};

struct ServiceRecord {
    std::string id;
    std::string publisher;
    ComponentType componentType = ComponentType::CallServiceTask;
    std::string url;
    std::string description;
    std::string operationName;
    std::set<std::string> inputs;   // type-concept identifiers
    std::set<std::string> outputs;  // non-empty
    QosRecord qos;
    std::optional<std::string> lastUseDate;  // YYYY-MM-DD

    bool operator==(const ServiceRecord&) const = default;
};

struct Registry {
    std::map<std::string, ServiceRecord> records;  // keyed by id
    std::uint64_t snapshotVersion = 0;
};

// Throws DescriptorError on schema problems (also wraps XML errors).
ServiceRecord parse_descriptor(std::string_view xmlText);

// Deterministic inverse of parse_descriptor (sets emitted sorted).
std::string save_descriptor(const ServiceRecord& record);

Registry load_registry(const std::vector<std::string>& descriptorTexts);

// Reads every *.xml file in sorted filename order.
Registry load_registry_dir(const std::string& dirPath);

struct IngestResult {
    Registry registry;                  // new snapshot, version + 1
    std::vector<std::string> warnings;  // unknown service ids, one per line hit
};

// CSV lines `date,serviceId,success|failure,responseTimeMs`. Counter updates
// commute, and lastUseDate takes the maximum date seen, so ingest is
// permutation-invariant. Unknown ids warn; malformed lines throw.
IngestResult ingest_qos_log(const Registry& reg, std::string_view logText);

// Registries are values; a snapshot is simply a copy taken at call time.
inline Registry get_snapshot(const Registry& reg) { return reg; }

bool valid_date(std::string_view date);

}  // namespace weaver::registry
