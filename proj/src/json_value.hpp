#pragma once

#include "ibp/value.hpp"
#include "json.hpp"

namespace ibp {

inline nlohmann::json to_json(const Value& v) {
    switch (v.kind) {
    case Value::Kind::Int: return v.i;
    case Value::Kind::Bool: return v.b;
    case Value::Kind::Vector: return v.v;
    }
    return nullptr;
}

inline nlohmann::json to_json(const Store& s) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : s) j[k] = to_json(v);
    return j;
}

}  // namespace ibp
