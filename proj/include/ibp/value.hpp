#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ibp/expr.hpp"

namespace ibp {

/// Runtime value: an integer, a boolean, or a vector of integers.
struct Value {
    enum class Kind { Int, Bool, Vector };
    Kind kind = Kind::Int;
    std::int64_t i = 0;
    bool b = false;
    std::vector<std::int64_t> v;

    static Value of_int(std::int64_t x) { return {Kind::Int, x, false, {}}; }
    static Value of_bool(bool x) { return {Kind::Bool, 0, x, {}}; }
    static Value of_vector(std::vector<std::int64_t> x) { return {Kind::Vector, 0, false, std::move(x)}; }

    bool operator==(const Value& o) const;
    bool operator!=(const Value& o) const { return !(*this == o); }
};

/// `3`, `true`, `[1, 2, 3]`
std::string to_string(const Value& v);

using Store = std::map<std::string, Value>;

/// `a=[3,1,2]; n=3` (semicolons or commas between bindings). Throws Error on malformed text.
Store parse_store(const std::string& text);
std::string to_string(const Store& s);

}  // namespace ibp
