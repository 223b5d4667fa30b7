#include "ibp/value.hpp"

#include <cctype>
#include <sstream>

#include "ibp/diagnostics.hpp"

namespace ibp {

bool Value::operator==(const Value& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
    case Kind::Int: return i == o.i;
    case Kind::Bool: return b == o.b;
    case Kind::Vector: return v == o.v;
    }
    return false;
}

std::string to_string(const Value& v) {
    switch (v.kind) {
    case Value::Kind::Int: return std::to_string(v.i);
    case Value::Kind::Bool: return v.b ? "true" : "false";
    case Value::Kind::Vector: {
        std::string s = "[";
        for (std::size_t k = 0; k < v.v.size(); ++k) s += (k ? ", " : "") + std::to_string(v.v[k]);
        return s + "]";
    }
    }
    return "?";
}

std::string to_string(const Store& s) {
    std::string out;
    for (const auto& [k, v] : s) out += (out.empty() ? "" : "; ") + k + "=" + to_string(v);
    return out;
}

namespace {

class StoreParser {
public:
    explicit StoreParser(const std::string& t) : t_(t) {}

    Store parse() {
        Store out;
        skip();
        while (pos_ < t_.size()) {
            std::string name = ident();
            skip();
            expect('=');
            out[name] = value();
            skip();
            if (pos_ < t_.size() && (t_[pos_] == ';' || t_[pos_] == ',')) {
                ++pos_;
                skip();
            } else if (pos_ < t_.size()) {
                fail("expected ';' between bindings");
            }
        }
        return out;
    }

private:
    const std::string& t_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw Error("input store, column " + std::to_string(pos_ + 1) + ": " + msg);
    }

    void skip() {
        while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip();
        if (pos_ >= t_.size() || t_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string ident() {
        std::size_t start = pos_;
        while (pos_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected a variable name");
        return t_.substr(start, pos_ - start);
    }

    std::int64_t integer() {
        skip();
        std::size_t start = pos_;
        if (pos_ < t_.size() && t_[pos_] == '-') ++pos_;
        while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) ++pos_;
        if (start == pos_ || (pos_ == start + 1 && t_[start] == '-')) fail("expected an integer");
        try {
            return std::stoll(t_.substr(start, pos_ - start));
        } catch (const std::out_of_range&) {
            fail("integer out of range");
        }
    }

    Value value() {
        skip();
        if (t_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            return Value::of_bool(true);
        }
        if (t_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            return Value::of_bool(false);
        }
        if (pos_ < t_.size() && t_[pos_] == '[') {
            ++pos_;
            std::vector<std::int64_t> xs;
            skip();
            if (pos_ < t_.size() && t_[pos_] == ']') {
                ++pos_;
                return Value::of_vector(xs);
            }
            for (;;) {
                xs.push_back(integer());
                skip();
                if (pos_ < t_.size() && t_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                expect(']');
                return Value::of_vector(xs);
            }
        }
        return Value::of_int(integer());
    }
};

}  // namespace

Store parse_store(const std::string& text) { return StoreParser(text).parse(); }

}  // namespace ibp
