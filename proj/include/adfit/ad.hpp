#pragma once

#include "adfit/ir.hpp"

namespace adfit {

/// Reverse accumulation over a single-output program. The result keeps the
/// forward sweep verbatim, appends adjoint statements in reverse statement
/// order, and outputs [value, d value/d p0, ..., d value/d p(n-1)]. Adjoints
/// are merged into per-temp accumulators in a fixed order, so results are
/// deterministic. Emission is demand-driven: adjoints are only materialized
/// for temps that transitively depend on a parameter, which leaves no dead
/// adjoint code behind.
Program reverse_grad(const Program& program);

/// Forward accumulation: one tangent sweep with seed d p_wrt = 1 and all
/// other parameter tangents zero. Outputs [value, d value/d p_wrt].
Program forward_derivative(const Program& program, std::size_t wrt);

} // namespace adfit
