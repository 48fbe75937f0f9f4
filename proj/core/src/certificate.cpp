#include "flexfn/certificate.hpp"

namespace flexfn {

std::string to_string(Claim c) {
    switch (c) {
        case Claim::DeterministicAsymptotic: return "det-asymptotic";
        case Claim::StochasticBounded: return "stoch-bounded";
        case Claim::StochasticStable: return "stoch-stable";
    }
    return "unknown";
}

nlohmann::json to_json(const StabilityCertificate& c) {
    nlohmann::json j{{"claim", to_string(c.claim)},
                     {"params_hash", c.params_hash},
                     {"region", {c.region.lo, c.region.hi}},
                     {"threshold", c.threshold},
                     {"margin", c.margin},
                     {"pass", c.pass},
                     {"degenerate", c.degenerate},
                     {"points_checked", c.points_checked}};
    if (c.failed_region) {
        j["failed_region"] = {c.failed_region->lo, c.failed_region->hi};
    } else {
        j["failed_region"] = nullptr;
    }
    return j;
}

}  // namespace flexfn
