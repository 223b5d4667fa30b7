#pragma once

#include <string>

#include "ibp/model.hpp"

namespace ibp {

/// Graphviz digraph of every procedure. Situations with nested situations
/// become clusters (with an anchor node for edges); other situations are
/// rounded nodes, preconditions bold and postconditions double-outlined.
std::string export_dot(const VerificationContext& ctx);

}  // namespace ibp
