#pragma once

#include <string>
#include <vector>

#include "weaver/errors.hpp"
#include "weaver/matching.hpp"
#include "weaver/registry.hpp"

namespace weaver::selection {

struct SelectConfig {
    // When true, candidates tied for the best match score are preferred over
    // lower-scored ones before QoS is consulted. Off by default: QoS decides
    // across the whole candidate list.
    bool scoreFirst = false;
};

struct Selection {
    std::string serviceId;
    long long qos = 0;     // a - n at selection time
    double score = 0.0;    // match score of the chosen candidate
};

// QoS value of a service: successes minus total calls. Never positive.
long long qos_value(const registry::QosRecord& q);

// Picks one service from a non-empty candidate list. A single candidate is
// returned as-is. Otherwise: highest QoS value wins; ties fall to the lowest
// average response time (services never called rank last); a residual tie
// picks the smallest service id. Throws Error("EmptyCandidates") on an empty
// list and Error("UnknownServiceId") when a candidate is not in the registry.
Selection select_best(const std::vector<matching::Candidate>& candidates,
                      const registry::Registry& reg,
                      const SelectConfig& cfg = {});

}  // namespace weaver::selection
