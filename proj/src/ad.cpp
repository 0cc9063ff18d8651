#include "adfit/ad.hpp"

#include "adfit/errors.hpp"

#include <optional>

namespace adfit {

namespace {

// Appends statements to a program that already contains a verbatim copy of
// the forward sweep.
Operand emit(Program& p, Op op, Operand a, Operand b = Operand{}) {
    const std::size_t dest = p.statements.size();
    p.statements.push_back({dest, op, {a, b}});
    return Operand::temp(dest);
}

// Temps that transitively depend on a parameter. Constant-only chains carry
// no derivative and get no adjoints or tangents.
std::vector<char> active_temps(const Program& program) {
    std::vector<char> active(program.statements.size(), 0);
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        const Statement& s = program.statements[i];
        for (std::size_t a = 0; a < s.arity(); ++a) {
            const Operand& o = s.args[a];
            if (o.is_param() || (o.is_temp() && active[o.index])) {
                active[i] = 1;
                break;
            }
        }
    }
    return active;
}

} // namespace

Program reverse_grad(const Program& program) {
    if (program.outputs.size() != 1)
        throw InvalidModelError("reverse_grad: program must have exactly one output, got " +
                                std::to_string(program.outputs.size()));

    const std::size_t n_forward = program.statements.size();
    const std::vector<char> active = active_temps(program);

    Program out;
    out.n_params = program.n_params;
    out.statements = program.statements; // forward sweep preserved verbatim

    // Current adjoint operand per temp / per parameter; unset means zero.
    std::vector<std::optional<Operand>> adj_temp(n_forward);
    std::vector<std::optional<Operand>> adj_param(program.n_params);

    auto differentiable = [&](const Operand& o) {
        return o.is_param() || (o.is_temp() && active[o.index]);
    };

    auto accumulate = [&](const Operand& target, const Operand& contribution) {
        std::optional<Operand>* slot = nullptr;
        if (target.is_param())
            slot = &adj_param[target.index];
        else if (target.is_temp() && active[target.index])
            slot = &adj_temp[target.index];
        else
            return;
        *slot = *slot ? emit(out, Op::Add, **slot, contribution) : contribution;
    };

    const Operand& y = program.outputs[0];
    if (y.is_temp() && active[y.index])
        adj_temp[y.index] = Operand::constant(1.0);
    else if (y.is_param())
        adj_param[y.index] = Operand::constant(1.0);
    // A constant output has an identically-zero gradient.

    for (std::size_t i = n_forward; i-- > 0;) {
        if (!adj_temp[i])
            continue;
        const Operand adj = *adj_temp[i];
        const Statement& s = program.statements[i];
        const Operand& a = s.args[0];
        const Operand& b = s.args[1];

        switch (s.op) {
        case Op::Add:
            accumulate(a, adj);
            accumulate(b, adj);
            break;
        case Op::Sub:
            accumulate(a, adj);
            if (differentiable(b))
                accumulate(b, emit(out, Op::Neg, adj));
            break;
        case Op::Mul:
            if (differentiable(a))
                accumulate(a, emit(out, Op::Mul, adj, b));
            if (differentiable(b))
                accumulate(b, emit(out, Op::Mul, adj, a));
            break;
        case Op::Div: {
            // d/da = 1/b, d/db = -a/b^2; one reciprocal feeds both, and
            // a/b^2 reuses the forward quotient t_i = a/b.
            if (!differentiable(a) && !differentiable(b))
                break;
            const Operand recip = emit(out, Op::Div, Operand::constant(1.0), b);
            if (differentiable(a))
                accumulate(a, emit(out, Op::Mul, adj, recip));
            if (differentiable(b)) {
                const Operand adj_t = emit(out, Op::Mul, adj, Operand::temp(i));
                accumulate(b, emit(out, Op::Neg, emit(out, Op::Mul, adj_t, recip)));
            }
            break;
        }
        case Op::Neg:
            if (differentiable(a))
                accumulate(a, emit(out, Op::Neg, adj));
            break;
        case Op::Log:
            if (differentiable(a))
                accumulate(a, emit(out, Op::Div, adj, a));
            break;
        case Op::Exp:
            if (differentiable(a))
                accumulate(a, emit(out, Op::Mul, adj, Operand::temp(i)));
            break;
        }
    }

    out.outputs.push_back(y);
    for (std::size_t p = 0; p < program.n_params; ++p)
        out.outputs.push_back(adj_param[p].value_or(Operand::constant(0.0)));
    return out;
}

Program forward_derivative(const Program& program, std::size_t wrt) {
    if (program.outputs.size() != 1)
        throw InvalidModelError("forward_derivative: program must have exactly one output");
    if (wrt >= program.n_params)
        throw InvalidModelError("forward_derivative: parameter index " + std::to_string(wrt) +
                                " out of range (n_params = " +
                                std::to_string(program.n_params) + ")");

    const std::size_t n_forward = program.statements.size();

    Program out;
    out.n_params = program.n_params;
    out.statements = program.statements;

    // Tangent operand per temp; unset means zero.
    std::vector<std::optional<Operand>> tan(n_forward);

    auto tangent = [&](const Operand& o) -> std::optional<Operand> {
        if (o.is_param())
            return o.index == wrt ? std::optional(Operand::constant(1.0)) : std::nullopt;
        if (o.is_temp())
            return tan[o.index];
        return std::nullopt;
    };

    // Products with a seed tangent of exactly 1 collapse to the other factor.
    auto mul1 = [&](const Operand& x, const Operand& dx) -> Operand {
        if (dx.is_const() && dx.value == 1.0)
            return x;
        return emit(out, Op::Mul, x, dx);
    };

    for (std::size_t i = 0; i < n_forward; ++i) {
        const Statement& s = program.statements[i];
        const Operand& a = s.args[0];
        const Operand& b = s.args[1];
        const auto da = tangent(a);
        const auto db = s.arity() == 2 ? tangent(b) : std::nullopt;

        switch (s.op) {
        case Op::Add:
            if (da && db)
                tan[i] = emit(out, Op::Add, *da, *db);
            else if (da || db)
                tan[i] = da ? *da : *db;
            break;
        case Op::Sub:
            if (da && db)
                tan[i] = emit(out, Op::Sub, *da, *db);
            else if (da)
                tan[i] = *da;
            else if (db)
                tan[i] = emit(out, Op::Neg, *db);
            break;
        case Op::Mul:
            if (da && db) {
                const Operand lhs = mul1(b, *da);
                const Operand rhs = mul1(a, *db);
                tan[i] = emit(out, Op::Add, lhs, rhs);
            } else if (da) {
                tan[i] = mul1(b, *da);
            } else if (db) {
                tan[i] = mul1(a, *db);
            }
            break;
        case Op::Div:
            // d(a/b) = (da - t_i * db) / b with t_i = a/b.
            if (da && db) {
                const Operand num =
                    emit(out, Op::Sub, *da, mul1(Operand::temp(i), *db));
                tan[i] = emit(out, Op::Div, num, b);
            } else if (da) {
                tan[i] = emit(out, Op::Div, *da, b);
            } else if (db) {
                const Operand q = emit(out, Op::Div, mul1(Operand::temp(i), *db), b);
                tan[i] = emit(out, Op::Neg, q);
            }
            break;
        case Op::Neg:
            if (da)
                tan[i] = emit(out, Op::Neg, *da);
            break;
        case Op::Log:
            if (da)
                tan[i] = emit(out, Op::Div, *da, a);
            break;
        case Op::Exp:
            if (da)
                tan[i] = mul1(Operand::temp(i), *da);
            break;
        }
    }

    const Operand& y = program.outputs[0];
    out.outputs.push_back(y);
    out.outputs.push_back(tangent(y).value_or(Operand::constant(0.0)));
    return out;
}

} // namespace adfit
