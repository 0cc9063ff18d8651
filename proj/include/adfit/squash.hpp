#pragma once

#include "adfit/graph.hpp"
#include "adfit/ir.hpp"

#include <string>

namespace adfit {

/// Lowers a scalar-rooted graph to a flat single-assignment program.
/// Vector-shaped nodes are unrolled into one scalar statement per element;
/// every reachable graph node is lowered exactly once, so sharing in the
/// graph becomes sharing in the program. Throws InvalidModelError for a
/// vector-shaped root or a malformed graph.
Program squash(const ModelGraph& graph, NodeId root);

/// Deterministic function-like rendering of a program: a header naming the
/// parameters, one line per statement, and an explicit return of the
/// outputs. Debugging artifact only; there is no parser for it.
std::string emit_source(const Program& program, const std::string& name);

} // namespace adfit
