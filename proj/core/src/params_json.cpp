#include "flexfn/params_json.hpp"

#include <cstdio>
#include <set>

#include "flexfn/error.hpp"

namespace flexfn {
namespace {

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("parameter '") + key + "': " + e.what());
    }
}

}  // namespace

nlohmann::json to_json(const FlexParams& p) {
    nlohmann::json basis{{"order", p.basis.order()},
                         {"knots", std::vector<double>(p.basis.knots().begin(), p.basis.knots().end())}};
    return {{"C", p.capacity},   {"lambda", p.lambda}, {"k", p.steepness},     {"alpha", p.alpha},
            {"beta", p.beta},    {"g0", p.g0},         {"sigma_x", p.sigma_x}, {"basis", basis}};
}

FlexParams params_from_json(const nlohmann::json& j) { return params_from_json(j, FlexParams::reference()); }

FlexParams params_from_json(const nlohmann::json& j, FlexParams p) {
    if (!j.is_object()) throw ConfigError("parameters must be a JSON object");
    static const std::set<std::string> known{"C", "lambda", "k", "alpha", "beta", "g0", "sigma_x", "basis"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown parameter key '" + key + "'");
    }
    if (j.contains("C")) p.capacity = get_as<double>(j, "C");
    if (j.contains("lambda")) p.lambda = get_as<double>(j, "lambda");
    if (j.contains("k")) p.steepness = get_as<double>(j, "k");
    if (j.contains("alpha")) p.alpha = get_as<std::array<double, 4>>(j, "alpha");
    if (j.contains("beta")) p.beta = get_as<std::vector<double>>(j, "beta");
    if (j.contains("g0")) p.g0 = get_as<double>(j, "g0");
    if (j.contains("sigma_x")) p.sigma_x = get_as<double>(j, "sigma_x");
    if (j.contains("basis")) {
        const auto& b = j.at("basis");
        if (!b.is_object()) throw ConfigError("'basis' must be an object");
        for (const auto& [key, _] : b.items()) {
            if (key != "order" && key != "knots" && key != "count") {
                throw ConfigError("unknown basis key '" + key + "'");
            }
        }
        const int order = b.contains("order") ? get_as<int>(b, "order") : 3;
        if (b.contains("knots")) {
            p.basis = ISplineBasis(order, get_as<std::vector<double>>(b, "knots"));
        } else {
            p.basis = ISplineBasis::uniform(order, b.contains("count") ? get_as<std::size_t>(b, "count") : 7);
        }
    }
    return p;
}

std::string params_hash(const FlexParams& p) {
    const std::string text = to_json(p).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace flexfn
