#pragma once

#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace flexfn {

enum class Claim {
    DeterministicAsymptotic,  // Lyapunov decrease of V = (x-x*)^2/2 along the ODE
    StochasticBounded,        // LV <= 0 outside the boundedness threshold
    StochasticStable,         // LV <= 0 within the stability radius
};

std::string to_string(Claim c);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Record of a Lyapunov condition checked on a sampled region.
struct StabilityCertificate {
    Claim claim = Claim::DeterministicAsymptotic;
    std::string params_hash;
    Interval region;         // hull of the sampled points that were checked
    double threshold = 0.0;  // boundedness threshold or stability radius
    double margin = 0.0;     // worst (largest) sampled value of dV/dt or LV
    bool pass = false;
    bool degenerate = false;  // nothing left to check; passes vacuously
    std::optional<Interval> failed_region;
    std::size_t points_checked = 0;
};

nlohmann::json to_json(const StabilityCertificate& c);

}  // namespace flexfn
