#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adfit {

enum class Op : std::uint8_t { Add, Sub, Mul, Div, Neg, Log, Exp };

constexpr std::size_t kNumOps = 7;

constexpr bool is_unary(Op op) {
    return op == Op::Neg || op == Op::Log || op == Op::Exp;
}

const char* op_name(Op op); // "add", "sub", ...

/// One argument of a statement: a temporary defined earlier in the program,
/// one of the program's parameters, or an embedded constant.
struct Operand {
    enum class Kind : std::uint8_t { Temp, Param, Const };

    Kind kind = Kind::Const;
    std::size_t index = 0; // Temp / Param
    double value = 0.0;    // Const

    static Operand temp(std::size_t i) { return {Kind::Temp, i, 0.0}; }
    static Operand param(std::size_t i) { return {Kind::Param, i, 0.0}; }
    static Operand constant(double v) { return {Kind::Const, 0, v}; }

    bool is_temp() const { return kind == Kind::Temp; }
    bool is_param() const { return kind == Kind::Param; }
    bool is_const() const { return kind == Kind::Const; }

    friend bool operator==(const Operand&, const Operand&) = default;
};

/// A single-assignment statement `t<dest> = op(args...)`. Unary ops leave
/// args[1] at its default (zero constant).
struct Statement {
    std::size_t dest = 0;
    Op op = Op::Add;
    std::array<Operand, 2> args{};

    std::size_t arity() const { return is_unary(op) ? 1 : 2; }

    friend bool operator==(const Statement&, const Statement&) = default;
};

/// Flat straight-line program over scalars. Temps are numbered densely:
/// statement i defines temp i.
struct Program {
    std::size_t n_params = 0;
    std::vector<Statement> statements;
    std::vector<Operand> outputs;

    friend bool operator==(const Program&, const Program&) = default;
};

/// Incremental construction helper used by the lowering and the derivative
/// transforms. Keeps the dense temp numbering invariant by construction.
class ProgramBuilder {
public:
    explicit ProgramBuilder(std::size_t n_params) { prog_.n_params = n_params; }

    Operand emit(Op op, Operand a) {
        const std::size_t dest = prog_.statements.size();
        prog_.statements.push_back({dest, op, {a, Operand{}}});
        return Operand::temp(dest);
    }

    Operand emit(Op op, Operand a, Operand b) {
        const std::size_t dest = prog_.statements.size();
        prog_.statements.push_back({dest, op, {a, b}});
        return Operand::temp(dest);
    }

    void add_output(Operand o) { prog_.outputs.push_back(o); }

    std::size_t size() const { return prog_.statements.size(); }

    Program take() { return std::move(prog_); }

private:
    Program prog_;
};

/// Structural validation: returns every violation of the dense-SSA,
/// use-after-define and non-empty-output rules. Empty result means ok.
std::vector<std::string> validate(const Program& program);

/// Executes the program. Pure; a fresh temp buffer is used per call.
/// Throws NumericalDomainError (carrying the statement index) on log of a
/// non-positive value or division by zero.
std::vector<double> interpret(const Program& program, std::span<const double> params);

/// Scratch-reusing variant for hot loops; same semantics as above.
void interpret(const Program& program, std::span<const double> params,
               std::vector<double>& temps, std::vector<double>& outputs);

/// Replaces every statement whose operands are all constants by its value,
/// propagated into later uses. Throws NumericalDomainError at transform time
/// if a folded statement violates a numerical domain (e.g. log(0)).
Program fold_constants(const Program& program);

/// Merges structurally identical statements. add/mul operands are compared
/// commutatively; no reassociation is performed, so interpretation results
/// are bit-identical.
Program eliminate_common_subexpressions(const Program& program);

/// Removes statements not transitively reachable from the outputs and
/// renumbers temps densely.
Program eliminate_dead_code(const Program& program);

/// The standard pass pipeline: fold_constants, CSE, DCE, in that order.
Program optimize(const Program& program);

struct ProgramStats {
    std::size_t n_statements = 0;
    std::array<std::size_t, kNumOps> per_op{};

    std::size_t count(Op op) const { return per_op[static_cast<std::size_t>(op)]; }
};

ProgramStats program_stats(const Program& program);

std::string operand_text(const Operand& operand); // "t3", "p0", "2.5"

/// One statement per line, e.g. `t3 = mul t1 p0`. Stable debugging format,
/// not a parse-back interface.
std::string to_text(const Program& program);

} // namespace adfit
