#include "weaver/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace weaver::config {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& v, std::size_t line) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, std::size_t line) {
  try {
    std::size_t pos = 0;
    int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError(line, "expected true/false, got '" + v + "'");
}

}  // namespace

Settings parse(std::string_view text) {
  Settings s;
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineNo;

    std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineNo, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineNo, "empty key");

    if (key == "match.theta") {
      s.matchTheta = parse_double(value, lineNo);
      if (s.matchTheta < 0.0 || s.matchTheta > 1.0) throw ConfigError(lineNo, "match.theta must be in [0,1]");
    } else if (key == "match.decay") {
      s.matchDecay = parse_double(value, lineNo);
      if (s.matchDecay <= 0.0 || s.matchDecay > 1.0) throw ConfigError(lineNo, "match.decay must be in (0,1]");
    } else if (key == "match.max_hops") {
      s.matchMaxHops = parse_int(value, lineNo);
      if (s.matchMaxHops < 0) throw ConfigError(lineNo, "match.max_hops must be >= 0");
    } else if (key == "select.score_first") {
      s.selectScoreFirst = parse_bool(value, lineNo);
    } else if (key == "compose.max_depth") {
      s.composeMaxDepth = parse_int(value, lineNo);
      if (s.composeMaxDepth < 1) throw ConfigError(lineNo, "compose.max_depth must be >= 1");
    } else if (key == "compose.use_isa") {
      s.composeUseIsa = parse_bool(value, lineNo);
    } else if (key == "orchestrator.use_name") {
      s.orchestratorUseName = parse_bool(value, lineNo);
    } else if (key == "chunk_pattern") {
      if (value.empty()) throw ConfigError(lineNo, "chunk_pattern must not be empty");
      s.chunkPattern = value;
    } else {
      throw ConfigError(lineNo, "unknown key '" + key + "'");
    }
  }
  return s;
}

Settings load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("ConfigError", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Settings from_env_or_defaults() {
  const char* p = std::getenv("BPMN_WEAVER_CONFIG");
  if (p == nullptr || *p == '\0') return Settings{};
  return load_file(p);
}

}  // namespace weaver::config
