#include "weaver/selection.hpp"

#include <algorithm>

namespace weaver::selection {

namespace {

const registry::ServiceRecord& record_for(const registry::Registry& reg, const std::string& id) {
    auto it = reg.records.find(id);
    if (it == reg.records.end()) throw Error("UnknownServiceId", "unknown service id '" + id + "'");
    return it->second;
}

// Strict "lower average response" comparison without division. Services with
// no calls count as infinitely slow. Cross-multiplying in 128 bits keeps the
// comparison exact where sum/n would round.
bool faster(const registry::QosRecord& x, const registry::QosRecord& y) {
    if (x.n == 0) return false;
    if (y.n == 0) return true;
    return static_cast<__int128>(x.responseSumMs) * y.n <
           static_cast<__int128>(y.responseSumMs) * x.n;
}

Selection to_selection(const matching::Candidate& c, const registry::Registry& reg) {
    return Selection{c.serviceId, qos_value(record_for(reg, c.serviceId).qos), c.score};
}

const matching::Candidate* pick(const std::vector<const matching::Candidate*>& pool,
                                const registry::Registry& reg) {
    const matching::Candidate* best = pool.front();
    const registry::QosRecord* bestQos = &record_for(reg, best->serviceId).qos;
    for (std::size_t i = 1; i < pool.size(); ++i) {
        const matching::Candidate* c = pool[i];
        const registry::QosRecord& q = record_for(reg, c->serviceId).qos;
        long long challenger = qos_value(q);
        long long incumbent = qos_value(*bestQos);
        bool better = challenger > incumbent ||
                      (challenger == incumbent &&
                       (faster(q, *bestQos) ||
                        (!faster(*bestQos, q) && c->serviceId < best->serviceId)));
        if (better) {
            best = c;
            bestQos = &q;
        }
    }
    return best;
}

}  // namespace

long long qos_value(const registry::QosRecord& q) { return q.a - q.n; }

Selection select_best(const std::vector<matching::Candidate>& candidates,
                      const registry::Registry& reg,
                      const SelectConfig& cfg) {
    if (candidates.empty()) throw Error("EmptyCandidates", "no candidates to select from");
    if (candidates.size() == 1) return to_selection(candidates.front(), reg);

    std::vector<const matching::Candidate*> pool;
    pool.reserve(candidates.size());
    if (cfg.scoreFirst) {
        double top = candidates.front().score;
        for (const matching::Candidate& c : candidates) top = std::max(top, c.score);
        for (const matching::Candidate& c : candidates) {
            if (c.score == top) pool.push_back(&c);
        }
    } else {
        for (const matching::Candidate& c : candidates) pool.push_back(&c);
    }
    return to_selection(*pick(pool, reg), reg);
}

}  // namespace weaver::selection
