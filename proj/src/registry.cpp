#include "weaver/registry.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "weaver/xml.hpp"

namespace weaver::registry {
namespace {

long long parse_count(std::string_view value, std::string_view what) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || out < 0)
        throw DescriptorError("qos attribute '" + std::string(what) + "' must be a nonnegative integer, got '" +
                              std::string(value) + "'");
    return out;
}

void check_service_id(const std::string& id) {
    if (id.empty()) throw DescriptorError("service id must not be empty");
    for (char c : id) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',')
            throw DescriptorError("service id '" + id + "' must not contain whitespace or commas");
    }
}

std::string require_attr(const xml::Element& el, std::string_view name) {
    auto v = el.attr(name);
    if (!v) throw DescriptorError("<" + el.name + "> missing required attribute '" + std::string(name) + "'");
    return *v;
}

}  // namespace

std::string_view component_type_name(ComponentType t) {
    switch (t) {
        case ComponentType::HumanTask: return "humanTask";
        case ComponentType::BpmnProcess: return "bpmnProcess";
        case ComponentType::CallServiceTask: return "callServiceTask";
    }
    return "callServiceTask";
}

std::optional<ComponentType> component_type_from(std::string_view name) {
    if (name == "humanTask") return ComponentType::HumanTask;
    if (name == "bpmnProcess") return ComponentType::BpmnProcess;
    if (name == "callServiceTask") return ComponentType::CallServiceTask;
    return std::nullopt;
}

bool valid_date(std::string_view date) {
    if (date.size() != 10 || date[4] != '-' || date[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(date[i]))) return false;
    int month = (date[5] - '0') * 10 + (date[6] - '0');
    int day = (date[8] - '0') * 10 + (date[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

ServiceRecord parse_descriptor(std::string_view xmlText) {
    xml::Element root;
    try {
        root = xml::parse(xmlText);
    } catch (const xml::XmlError& e) {
        throw DescriptorError(std::string("descriptor XML: ") + e.what());
    }
    if (root.name != "service") throw DescriptorError("root element must be <service>, got <" + root.name + ">");
    for (const auto& [name, value] : root.attrs) {
        if (name != "id" && name != "publisher" && name != "componentType" && name != "url")
            throw DescriptorError("<service> has unknown attribute '" + name + "'");
    }

    ServiceRecord rec;
    rec.id = require_attr(root, "id");
    check_service_id(rec.id);
    rec.publisher = require_attr(root, "publisher");
    rec.url = require_attr(root, "url");
    std::string ct = require_attr(root, "componentType");
    auto parsed = component_type_from(ct);
    if (!parsed)
        throw DescriptorError("service '" + rec.id + "': componentType must be humanTask, bpmnProcess, or callServiceTask, got '" + ct + "'");
    rec.componentType = *parsed;

    bool sawDescription = false, sawOperation = false, sawQos = false;
    for (const xml::Element& child : root.children) {
        if (child.name == "description") {
            if (sawDescription) throw DescriptorError("service '" + rec.id + "' has multiple <description> elements");
            sawDescription = true;
            if (!child.children.empty()) throw DescriptorError("<description> must contain only text");
            rec.description = child.text;
        } else if (child.name == "operation") {
            if (sawOperation) throw DescriptorError("service '" + rec.id + "' has multiple <operation> elements");
            sawOperation = true;
            rec.operationName = require_attr(child, "name");
            for (const xml::Element& io : child.children) {
                if (io.name != "input" && io.name != "output")
                    throw DescriptorError("service '" + rec.id + "': <operation> has unknown child <" + io.name + ">");
                std::string type = require_attr(io, "type");
                if (type.empty()) throw DescriptorError("service '" + rec.id + "': empty IO type");
                (io.name == "input" ? rec.inputs : rec.outputs).insert(type);
            }
        } else if (child.name == "qos") {
            if (sawQos) throw DescriptorError("service '" + rec.id + "' has multiple <qos> elements");
            sawQos = true;
            for (const auto& [name, value] : child.attrs) {
                if (name != "available" && name != "calls" && name != "responseSumMs" && name != "lastUse")
                    throw DescriptorError("<qos> has unknown attribute '" + name + "'");
            }
            rec.qos.a = parse_count(child.attr("available").value_or("0"), "available");
            rec.qos.n = parse_count(child.attr("calls").value_or("0"), "calls");
            rec.qos.responseSumMs = parse_count(child.attr("responseSumMs").value_or("0"), "responseSumMs");
            if (auto lastUse = child.attr("lastUse")) {
                if (!valid_date(*lastUse))
                    throw DescriptorError("service '" + rec.id + "': lastUse '" + *lastUse + "' is not YYYY-MM-DD");
                rec.lastUseDate = *lastUse;
            }
        } else {
            throw DescriptorError("service '" + rec.id + "' has unknown child <" + child.name + ">");
        }
    }

    if (rec.description.empty()) throw DescriptorError("service '" + rec.id + "' needs a non-empty description");
    if (rec.outputs.empty()) throw DescriptorError("service '" + rec.id + "' needs at least one output type");
    if (rec.qos.a > rec.qos.n)
        throw DescriptorError("service '" + rec.id + "': available exceeds calls (" + std::to_string(rec.qos.a) +
                              " > " + std::to_string(rec.qos.n) + ")");
    return rec;
}

std::string save_descriptor(const ServiceRecord& rec) {
    std::ostringstream out;
    out << "<service id=\"" << xml::escape_attr(rec.id) << "\" publisher=\"" << xml::escape_attr(rec.publisher)
        << "\" componentType=\"" << component_type_name(rec.componentType) << "\" url=\""
        << xml::escape_attr(rec.url) << "\">\n";
    out << "  <description>" << xml::escape_text(rec.description) << "</description>\n";
    out << "  <operation name=\"" << xml::escape_attr(rec.operationName) << "\">";
    for (const auto& in : rec.inputs) out << "<input type=\"" << xml::escape_attr(in) << "\"/>";
    for (const auto& o : rec.outputs) out << "<output type=\"" << xml::escape_attr(o) << "\"/>";
    out << "</operation>\n";
    out << "  <qos available=\"" << rec.qos.a << "\" calls=\"" << rec.qos.n << "\" responseSumMs=\""
        << rec.qos.responseSumMs << "\"";
    if (rec.lastUseDate) out << " lastUse=\"" << *rec.lastUseDate << "\"";
    out << "/>\n</service>\n";
    return out.str();
}

Registry load_registry(const std::vector<std::string>& descriptorTexts) {
    Registry reg;
    for (std::size_t i = 0; i < descriptorTexts.size(); ++i) {
        ServiceRecord rec;
        try {
            rec = parse_descriptor(descriptorTexts[i]);
        } catch (const DescriptorError& e) {
            throw DescriptorError("descriptor " + std::to_string(i) + ": " + e.what());
        }
        if (!reg.records.emplace(rec.id, rec).second) throw DuplicateServiceIdError(rec.id);
    }
    return reg;
}

Registry load_registry_dir(const std::string& dirPath) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dirPath)) throw Error("RegistryDirMissing", "'" + dirPath + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dirPath)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    Registry reg;
    for (const fs::path& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw Error("RegistryDirMissing", "cannot read '" + file.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        ServiceRecord rec;
        try {
            rec = parse_descriptor(buf.str());
        } catch (const DescriptorError& e) {
            throw DescriptorError(file.filename().string() + ": " + e.what());
        }
        if (!reg.records.emplace(rec.id, rec).second) throw DuplicateServiceIdError(rec.id);
    }
    return reg;
}

IngestResult ingest_qos_log(const Registry& reg, std::string_view logText) {
    IngestResult result;
    result.registry = reg;
    result.registry.snapshotVersion = reg.snapshotVersion + 1;

    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos < logText.size()) {
        std::size_t nl = logText.find('\n', pos);
        std::string_view line = logText.substr(pos, nl == std::string_view::npos ? logText.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? logText.size() : nl + 1;
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::array<std::string_view, 4> fields;
        std::size_t fieldCount = 0, fieldPos = 0;
        while (fieldCount < 4) {
            std::size_t comma = line.find(',', fieldPos);
            if (comma == std::string_view::npos) {
                fields[fieldCount++] = line.substr(fieldPos);
                fieldPos = line.size() + 1;
                break;
            }
            fields[fieldCount++] = line.substr(fieldPos, comma - fieldPos);
            fieldPos = comma + 1;
        }
        if (fieldCount != 4 || fieldPos <= line.size())
            throw LogLineError(lineNo, "expected 'date,serviceId,success|failure,responseTimeMs'");

        auto [date, serviceId, outcome, msText] = fields;
        if (!valid_date(date)) throw LogLineError(lineNo, "bad date '" + std::string(date) + "'");
        if (outcome != "success" && outcome != "failure")
            throw LogLineError(lineNo, "outcome must be success or failure, got '" + std::string(outcome) + "'");
        long long ms = 0;
        auto [ptr, ec] = std::from_chars(msText.data(), msText.data() + msText.size(), ms);
        if (ec != std::errc{} || ptr != msText.data() + msText.size() || ms < 0)
            throw LogLineError(lineNo, "bad response time '" + std::string(msText) + "'");

        auto it = result.registry.records.find(std::string(serviceId));
        if (it == result.registry.records.end()) {
            result.warnings.push_back("line " + std::to_string(lineNo) + ": unknown service id '" +
                                      std::string(serviceId) + "'");
            continue;
        }
        ServiceRecord& rec = it->second;
        rec.qos.n += 1;
        if (outcome == "success") rec.qos.a += 1;
        rec.qos.responseSumMs += ms;
        std::string d(date);
        if (!rec.lastUseDate || *rec.lastUseDate < d) rec.lastUseDate = d;  // max date wins
    }
    return result;
}

}  // namespace weaver::registry
