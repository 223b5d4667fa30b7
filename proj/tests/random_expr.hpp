#pragma once

#include <random>
#include <string>
#include <vector>

#include "ibp/expr.hpp"
#include "ibp/model.hpp"

namespace testutil {

/// Random well-typed expressions over int variables k, n, m, i and a vector a.
/// Quantifiers are bounded by `j < <int expr>` so the evaluator can run them.
class ExprGen {
public:
    explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

    std::vector<std::string> int_vars = {"k", "n", "m", "i"};

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    ibp::ExprPtr int_var() { return ibp::ex::var(int_vars[pick(static_cast<int>(int_vars.size()))], ibp::SemType::Int); }
    ibp::ExprPtr vec() { return ibp::ex::var("a", ibp::SemType::Vector); }

    ibp::ExprPtr int_expr(int depth) {
        int choice = depth <= 0 ? pick(3) : pick(7);
        switch (choice) {
        case 0: return ibp::ex::int_lit(pick(7) - 3);
        case 1: return int_var();
        case 2: return ibp::ex::len(vec());
        case 3: return ibp::ex::add(int_expr(depth - 1), int_expr(depth - 1));
        case 4: return ibp::ex::sub(int_expr(depth - 1), int_expr(depth - 1));
        case 5: return ibp::ex::get(vec(), int_expr(depth - 1));
        default: return ibp::ex::ite(bool_expr(depth - 1), int_expr(depth - 1), int_expr(depth - 1));
        }
    }

    ibp::ExprPtr bool_expr(int depth) {
        int choice = depth <= 0 ? pick(2) : pick(8);
        switch (choice) {
        case 0: return ibp::ex::le(int_expr(0), int_expr(0));
        case 1: return ibp::ex::eq(int_expr(0), int_expr(0));
        case 2: return ibp::ex::and_(bool_expr(depth - 1), bool_expr(depth - 1));
        case 3: return ibp::ex::or_(bool_expr(depth - 1), bool_expr(depth - 1));
        case 4: return ibp::ex::not_(bool_expr(depth - 1));
        case 5: return ibp::ex::implies(bool_expr(depth - 1), bool_expr(depth - 1));
        case 6: return ibp::ex::lt(int_expr(depth - 1), int_expr(depth - 1));
        default: {
            auto j = ibp::ex::var("j", ibp::SemType::Nat);
            auto body = ibp::ex::implies(ibp::ex::lt(j, int_expr(0)),
                                         ibp::ex::le(ibp::ex::get(vec(), j), int_expr(depth - 1)));
            return ibp::ex::forall("j", ibp::SemType::Nat, body);
        }
        }
    }

    /// One guard, assertion or assignment.
    ibp::Statement statement(int depth) {
        ibp::Statement s;
        switch (pick(4)) {
        case 0:
            s.kind = ibp::Statement::Kind::Guard;
            s.expr = bool_expr(depth);
            break;
        case 1:
            s.kind = ibp::Statement::Kind::Assert;
            s.expr = bool_expr(depth);
            break;
        default:
            s.kind = ibp::Statement::Kind::Assign;
            s.target = int_vars[pick(static_cast<int>(int_vars.size()))];
            s.target_type = ibp::SemType::Int;
            s.expr = int_expr(depth);
            break;
        }
        return s;
    }

    std::vector<ibp::Statement> statements(int count, int depth) {
        std::vector<ibp::Statement> out;
        for (int c = 0; c < count; ++c) out.push_back(statement(depth));
        return out;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Procedure fixture declaring the generator's variables.
inline const char* kExprFixture = R"(
context fixture {
  procedure p(k: int, n: int, m: int, i: int, valres a: vector) {
    post { true; }
    transition to Post { }
  }
}
)";

}  // namespace testutil
