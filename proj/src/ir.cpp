#include "adfit/ir.hpp"

#include "adfit/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <tuple>
#include <unordered_map>

namespace adfit {

const char* op_name(Op op) {
    switch (op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::Log: return "log";
    case Op::Exp: return "exp";
    }
    return "?";
}

std::vector<std::string> validate(const Program& program) {
    std::vector<std::string> violations;

    auto check_operand = [&](const Operand& o, std::size_t limit, const std::string& where) {
        switch (o.kind) {
        case Operand::Kind::Temp:
            if (o.index >= limit)
                violations.push_back(where + ": use of t" + std::to_string(o.index) +
                                     " before its definition");
            break;
        case Operand::Kind::Param:
            if (o.index >= program.n_params)
                violations.push_back(where + ": parameter index " + std::to_string(o.index) +
                                     " out of range (n_params = " +
                                     std::to_string(program.n_params) + ")");
            break;
        case Operand::Kind::Const:
            break;
        }
    };

    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        const Statement& s = program.statements[i];
        const std::string where = "statement " + std::to_string(i);
        if (s.dest != i)
            violations.push_back(where + ": dest t" + std::to_string(s.dest) +
                                 " breaks dense single-assignment numbering");
        for (std::size_t a = 0; a < s.arity(); ++a)
            check_operand(s.args[a], i, where);
    }

    if (program.outputs.empty())
        violations.push_back("program has no outputs");
    for (std::size_t i = 0; i < program.outputs.size(); ++i)
        check_operand(program.outputs[i], program.statements.size(),
                      "output " + std::to_string(i));

    return violations;
}

void interpret(const Program& program, std::span<const double> params,
               std::vector<double>& temps, std::vector<double>& outputs) {
    if (params.size() != program.n_params)
        throw Error("interpret: expected " + std::to_string(program.n_params) +
                    " parameters, got " + std::to_string(params.size()));

    temps.resize(program.statements.size());

    auto load = [&](const Operand& o) -> double {
        switch (o.kind) {
        case Operand::Kind::Temp: return temps[o.index];
        case Operand::Kind::Param: return params[o.index];
        default: return o.value;
        }
    };

    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        const Statement& s = program.statements[i];
        const double a = load(s.args[0]);
        double r = 0.0;
        switch (s.op) {
        case Op::Add: r = a + load(s.args[1]); break;
        case Op::Sub: r = a - load(s.args[1]); break;
        case Op::Mul: r = a * load(s.args[1]); break;
        case Op::Div: {
            const double b = load(s.args[1]);
            if (b == 0.0)
                throw NumericalDomainError(
                    "division by zero at statement " + std::to_string(i), i);
            r = a / b;
            break;
        }
        case Op::Neg: r = -a; break;
        case Op::Log:
            if (a <= 0.0)
                throw NumericalDomainError(
                    "log of non-positive value at statement " + std::to_string(i), i);
            r = std::log(a);
            break;
        case Op::Exp: r = std::exp(a); break;
        }
        temps[i] = r;
    }

    outputs.clear();
    outputs.reserve(program.outputs.size());
    for (const Operand& o : program.outputs)
        outputs.push_back(load(o));
}

std::vector<double> interpret(const Program& program, std::span<const double> params) {
    std::vector<double> temps;
    std::vector<double> outputs;
    interpret(program, params, temps, outputs);
    return outputs;
}

namespace {

// Evaluates one statement whose operands are all constants. Domain checks
// mirror interpret so that folding surfaces the same errors, just earlier.
double eval_const_statement(Op op, const Operand& a, const Operand& b, std::size_t index) {
    const double x = a.value;
    switch (op) {
    case Op::Add: return x + b.value;
    case Op::Sub: return x - b.value;
    case Op::Mul: return x * b.value;
    case Op::Div:
        if (b.value == 0.0)
            throw NumericalDomainError(
                "constant division by zero at statement " + std::to_string(index), index);
        return x / b.value;
    case Op::Neg: return -x;
    case Op::Log:
        if (x <= 0.0)
            throw NumericalDomainError(
                "constant log of non-positive value at statement " + std::to_string(index),
                index);
        return std::log(x);
    case Op::Exp: return std::exp(x);
    }
    return 0.0;
}

Operand substitute(const Operand& o, const std::vector<Operand>& remap) {
    return o.is_temp() ? remap[o.index] : o;
}

} // namespace

Program fold_constants(const Program& program) {
    Program out;
    out.n_params = program.n_params;
    out.statements.reserve(program.statements.size());

    // Old temp index -> operand in the new program (a renumbered temp, or
    // the folded constant).
    std::vector<Operand> remap(program.statements.size());

    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        Statement s = program.statements[i];
        for (std::size_t a = 0; a < s.arity(); ++a)
            s.args[a] = substitute(s.args[a], remap);

        bool all_const = true;
        for (std::size_t a = 0; a < s.arity(); ++a)
            all_const = all_const && s.args[a].is_const();

        if (all_const) {
            remap[i] = Operand::constant(eval_const_statement(s.op, s.args[0], s.args[1], i));
        } else {
            s.dest = out.statements.size();
            remap[i] = Operand::temp(s.dest);
            out.statements.push_back(s);
        }
    }

    out.outputs.reserve(program.outputs.size());
    for (const Operand& o : program.outputs)
        out.outputs.push_back(substitute(o, remap));
    return out;
}

namespace {

struct StatementKey {
    Op op;
    Operand a;
    Operand b;

    friend bool operator==(const StatementKey&, const StatementKey&) = default;
};

// Total order on operands used only for commutative canonicalization.
bool operand_less(const Operand& x, const Operand& y) {
    if (x.kind != y.kind)
        return static_cast<int>(x.kind) < static_cast<int>(y.kind);
    if (x.is_const())
        return std::bit_cast<std::uint64_t>(x.value) < std::bit_cast<std::uint64_t>(y.value);
    return x.index < y.index;
}

struct StatementKeyHash {
    static std::size_t mix(std::size_t h, std::size_t v) {
        return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
    static std::size_t operand_hash(const Operand& o) {
        std::size_t h = static_cast<std::size_t>(o.kind);
        h = mix(h, o.index);
        h = mix(h, std::bit_cast<std::uint64_t>(o.value));
        return h;
    }
    std::size_t operator()(const StatementKey& k) const {
        std::size_t h = static_cast<std::size_t>(k.op);
        h = mix(h, operand_hash(k.a));
        h = mix(h, operand_hash(k.b));
        return h;
    }
};

} // namespace

Program eliminate_common_subexpressions(const Program& program) {
    Program out;
    out.n_params = program.n_params;
    out.statements.reserve(program.statements.size());

    std::vector<Operand> remap(program.statements.size());
    std::unordered_map<StatementKey, std::size_t, StatementKeyHash> seen;
    seen.reserve(program.statements.size());

    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        Statement s = program.statements[i];
        for (std::size_t a = 0; a < s.arity(); ++a)
            s.args[a] = substitute(s.args[a], remap);

        StatementKey key{s.op, s.args[0], s.arity() == 2 ? s.args[1] : Operand{}};
        if ((s.op == Op::Add || s.op == Op::Mul) && operand_less(key.b, key.a))
            std::swap(key.a, key.b);

        if (auto it = seen.find(key); it != seen.end()) {
            remap[i] = Operand::temp(it->second);
        } else {
            s.dest = out.statements.size();
            seen.emplace(key, s.dest);
            remap[i] = Operand::temp(s.dest);
            out.statements.push_back(s);
        }
    }

    out.outputs.reserve(program.outputs.size());
    for (const Operand& o : program.outputs)
        out.outputs.push_back(substitute(o, remap));
    return out;
}

Program eliminate_dead_code(const Program& program) {
    std::vector<char> live(program.statements.size(), 0);
    for (const Operand& o : program.outputs)
        if (o.is_temp())
            live[o.index] = 1;

    // Temps only reference earlier statements, so one backward scan settles
    // the reachability.
    for (std::size_t i = program.statements.size(); i-- > 0;) {
        if (!live[i])
            continue;
        const Statement& s = program.statements[i];
        for (std::size_t a = 0; a < s.arity(); ++a)
            if (s.args[a].is_temp())
                live[s.args[a].index] = 1;
    }

    Program out;
    out.n_params = program.n_params;
    std::vector<Operand> remap(program.statements.size());
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        if (!live[i])
            continue;
        Statement s = program.statements[i];
        for (std::size_t a = 0; a < s.arity(); ++a)
            s.args[a] = substitute(s.args[a], remap);
        s.dest = out.statements.size();
        remap[i] = Operand::temp(s.dest);
        out.statements.push_back(s);
    }

    out.outputs.reserve(program.outputs.size());
    for (const Operand& o : program.outputs)
        out.outputs.push_back(substitute(o, remap));
    return out;
}

Program optimize(const Program& program) {
    return eliminate_dead_code(eliminate_common_subexpressions(fold_constants(program)));
}

ProgramStats program_stats(const Program& program) {
    ProgramStats stats;
    stats.n_statements = program.statements.size();
    for (const Statement& s : program.statements)
        ++stats.per_op[static_cast<std::size_t>(s.op)];
    return stats;
}

namespace {

std::string double_text(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

} // namespace

std::string operand_text(const Operand& operand) {
    switch (operand.kind) {
    case Operand::Kind::Temp: return "t" + std::to_string(operand.index);
    case Operand::Kind::Param: return "p" + std::to_string(operand.index);
    default: return double_text(operand.value);
    }
}

std::string to_text(const Program& program) {
    std::string text;
    for (const Statement& s : program.statements) {
        text += "t" + std::to_string(s.dest) + " = " + op_name(s.op);
        for (std::size_t a = 0; a < s.arity(); ++a)
            text += " " + operand_text(s.args[a]);
        text += "\n";
    }
    return text;
}

} // namespace adfit
