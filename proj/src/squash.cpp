#include "adfit/squash.hpp"

#include "adfit/errors.hpp"

namespace adfit {

namespace {

Op lower_op(NodeKind kind) {
    switch (kind) {
    case NodeKind::Add: return Op::Add;
    case NodeKind::Sub: return Op::Sub;
    case NodeKind::Mul: return Op::Mul;
    case NodeKind::Div: return Op::Div;
    case NodeKind::Neg: return Op::Neg;
    case NodeKind::Log: return Op::Log;
    default: return Op::Exp;
    }
}

} // namespace

Program squash(const ModelGraph& graph, NodeId root) {
    if (!graph.contains(root))
        throw InvalidModelError("squash: root id out of range");
    if (!graph.node(root).shape.is_scalar())
        throw InvalidModelError("squash: root must be scalar-shaped");

    ProgramBuilder builder(graph.n_params());

    // Per-node lowered operands, one per element. Filled in topological
    // order, so children are always available before their parents.
    std::vector<std::vector<Operand>> lowered(graph.size());

    for (NodeId id : topo_order(graph, root)) {
        const Node& n = graph.node(id);
        std::vector<Operand>& out = lowered[id.index];

        switch (n.kind) {
        case NodeKind::Param:
            out = {Operand::param(n.param_index)};
            break;
        case NodeKind::ParamVector:
            out.reserve(n.param_indices.size());
            for (std::size_t p : n.param_indices)
                out.push_back(Operand::param(p));
            break;
        case NodeKind::ConstScalar:
            out = {Operand::constant(n.scalar_value)};
            break;
        case NodeKind::ConstVector:
            out.reserve(n.vector_values.size());
            for (double v : n.vector_values)
                out.push_back(Operand::constant(v));
            break;
        case NodeKind::Sum: {
            const std::vector<Operand>& v = lowered[n.children[0].index];
            Operand acc = v[0];
            for (std::size_t k = 1; k < v.size(); ++k)
                acc = builder.emit(Op::Add, acc, v[k]);
            out = {acc};
            break;
        }
        case NodeKind::Neg:
        case NodeKind::Log:
        case NodeKind::Exp: {
            const std::vector<Operand>& v = lowered[n.children[0].index];
            out.reserve(v.size());
            for (const Operand& o : v)
                out.push_back(builder.emit(lower_op(n.kind), o));
            break;
        }
        default: {
            const std::vector<Operand>& a = lowered[n.children[0].index];
            const std::vector<Operand>& b = lowered[n.children[1].index];
            out.reserve(n.shape.len);
            for (std::size_t k = 0; k < n.shape.len; ++k)
                out.push_back(builder.emit(lower_op(n.kind), a[a.size() == 1 ? 0 : k],
                                           b[b.size() == 1 ? 0 : k]));
            break;
        }
        }
    }

    builder.add_output(lowered[root.index][0]);
    return builder.take();
}

std::string emit_source(const Program& program, const std::string& name) {
    std::string text = "fn " + name + "(";
    for (std::size_t i = 0; i < program.n_params; ++i) {
        if (i > 0)
            text += ", ";
        text += "p" + std::to_string(i);
    }
    text += ") {\n";

    for (const Statement& s : program.statements) {
        text += "  t" + std::to_string(s.dest) + " = " + op_name(s.op);
        for (std::size_t a = 0; a < s.arity(); ++a)
            text += " " + operand_text(s.args[a]);
        text += "\n";
    }

    text += "  return";
    for (std::size_t i = 0; i < program.outputs.size(); ++i)
        text += (i == 0 ? " " : ", ") + operand_text(program.outputs[i]);
    text += "\n}\n";
    return text;
}

} // namespace adfit
