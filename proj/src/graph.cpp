#include "adfit/graph.hpp"

#include "adfit/errors.hpp"

#include <cmath>
#include <utility>

namespace adfit {

const char* node_kind_name(NodeKind kind) {
    switch (kind) {
    case NodeKind::Param: return "param";
    case NodeKind::ParamVector: return "param_vector";
    case NodeKind::ConstScalar: return "const_scalar";
    case NodeKind::ConstVector: return "const_vector";
    case NodeKind::Add: return "add";
    case NodeKind::Sub: return "sub";
    case NodeKind::Mul: return "mul";
    case NodeKind::Div: return "div";
    case NodeKind::Neg: return "neg";
    case NodeKind::Log: return "log";
    case NodeKind::Exp: return "exp";
    case NodeKind::Sum: return "sum";
    }
    return "?";
}

namespace {

std::size_t kind_arity(NodeKind kind) {
    switch (kind) {
    case NodeKind::Param:
    case NodeKind::ParamVector:
    case NodeKind::ConstScalar:
    case NodeKind::ConstVector:
        return 0;
    case NodeKind::Neg:
    case NodeKind::Log:
    case NodeKind::Exp:
    case NodeKind::Sum:
        return 1;
    default:
        return 2;
    }
}

} // namespace

const Node& ModelGraph::node(NodeId id) const {
    if (!contains(id))
        throw InvalidModelError("node id " + std::to_string(id.index) + " out of range");
    return nodes_[id.index];
}

NodeId ModelGraph::append(Node node) {
    nodes_.push_back(std::move(node));
    return NodeId{nodes_.size() - 1};
}

std::size_t ModelGraph::add_param(std::string name, double initial) {
    param_names_.push_back(std::move(name));
    param_initial_.push_back(initial);
    return param_names_.size() - 1;
}

NodeId ModelGraph::param(std::size_t param_index) {
    if (param_index >= n_params())
        throw InvalidModelError("param node references unregistered parameter index " +
                                std::to_string(param_index));
    Node n;
    n.kind = NodeKind::Param;
    n.shape = Shape::scalar();
    n.param_index = param_index;
    return append(std::move(n));
}

NodeId ModelGraph::param_vector(std::vector<std::size_t> param_indices) {
    if (param_indices.empty())
        throw InvalidModelError("param_vector must be non-empty");
    for (std::size_t i : param_indices)
        if (i >= n_params())
            throw InvalidModelError("param_vector references unregistered parameter index " +
                                    std::to_string(i));
    Node n;
    n.kind = NodeKind::ParamVector;
    n.shape = Shape::vector(param_indices.size());
    n.param_indices = std::move(param_indices);
    return append(std::move(n));
}

NodeId ModelGraph::constant(double value) {
    Node n;
    n.kind = NodeKind::ConstScalar;
    n.shape = Shape::scalar();
    n.scalar_value = value;
    return append(std::move(n));
}

NodeId ModelGraph::constant_vector(std::vector<double> values) {
    if (values.empty())
        throw InvalidModelError("constant_vector must be non-empty");
    Node n;
    n.kind = NodeKind::ConstVector;
    n.shape = Shape::vector(values.size());
    n.vector_values = std::move(values);
    return append(std::move(n));
}

NodeId ModelGraph::add_node(NodeKind kind, std::vector<NodeId> children) {
    const std::size_t arity = kind_arity(kind);
    if (arity == 0)
        throw InvalidModelError(std::string(node_kind_name(kind)) +
                                " nodes carry payloads; use the leaf constructors");
    if (children.size() != arity)
        throw InvalidModelError(std::string("arity mismatch: ") + node_kind_name(kind) +
                                " takes " + std::to_string(arity) + " children, got " +
                                std::to_string(children.size()));
    for (NodeId c : children)
        if (!contains(c))
            throw InvalidModelError("child node id " + std::to_string(c.index) +
                                    " out of range");

    Node n;
    n.kind = kind;

    if (kind == NodeKind::Sum) {
        const Shape s = nodes_[children[0].index].shape;
        if (s.is_scalar())
            throw InvalidModelError("sum takes a vector operand");
        n.shape = Shape::scalar();
    } else if (arity == 1) {
        n.shape = nodes_[children[0].index].shape;
    } else {
        const Shape a = nodes_[children[0].index].shape;
        const Shape b = nodes_[children[1].index].shape;
        if (a.is_scalar() && b.is_scalar()) {
            n.shape = Shape::scalar();
        } else if (a.is_scalar()) {
            n.shape = b;
        } else if (b.is_scalar()) {
            n.shape = a;
        } else if (a.len == b.len) {
            n.shape = a;
        } else {
            throw InvalidModelError(std::string("shape mismatch: ") + node_kind_name(kind) +
                                    " of vectors with lengths " + std::to_string(a.len) +
                                    " and " + std::to_string(b.len));
        }
    }

    n.children = std::move(children);
    return append(std::move(n));
}

std::vector<std::size_t> ModelGraph::unreferenced_params() const {
    std::vector<char> seen(n_params(), 0);
    for (const Node& n : nodes_) {
        if (n.kind == NodeKind::Param)
            seen[n.param_index] = 1;
        else if (n.kind == NodeKind::ParamVector)
            for (std::size_t i : n.param_indices)
                seen[i] = 1;
    }
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            missing.push_back(i);
    return missing;
}

std::vector<NodeId> topo_order(const ModelGraph& graph, NodeId root) {
    if (!graph.contains(root))
        throw InvalidModelError("topo_order: root id " + std::to_string(root.index) +
                                " out of range");

    std::vector<NodeId> order;
    std::vector<char> visited(graph.size(), 0);

    struct Frame {
        NodeId id;
        std::size_t next_child = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({root});
    visited[root.index] = 1;

    while (!stack.empty()) {
        Frame& frame = stack.back();
        const Node& n = graph.node(frame.id);
        if (frame.next_child < n.children.size()) {
            const NodeId child = n.children[frame.next_child++];
            if (!visited[child.index]) {
                visited[child.index] = 1;
                stack.push_back({child});
            }
        } else {
            order.push_back(frame.id);
            stack.pop_back();
        }
    }
    return order;
}

double Value::scalar() const {
    if (!shape.is_scalar())
        throw Error("Value::scalar() called on a vector value");
    return data[0];
}

namespace {

Value eval_node(const ModelGraph& graph, NodeId id, std::span<const double> params) {
    const Node& n = graph.node(id);
    switch (n.kind) {
    case NodeKind::Param:
        return {n.shape, {params[n.param_index]}};
    case NodeKind::ParamVector: {
        Value v{n.shape, {}};
        v.data.reserve(n.param_indices.size());
        for (std::size_t i : n.param_indices)
            v.data.push_back(params[i]);
        return v;
    }
    case NodeKind::ConstScalar:
        return {n.shape, {n.scalar_value}};
    case NodeKind::ConstVector:
        return {n.shape, n.vector_values};
    case NodeKind::Sum: {
        const Value v = eval_node(graph, n.children[0], params);
        double acc = v.data[0];
        for (std::size_t k = 1; k < v.data.size(); ++k)
            acc += v.data[k];
        return {Shape::scalar(), {acc}};
    }
    case NodeKind::Neg:
    case NodeKind::Log:
    case NodeKind::Exp: {
        Value v = eval_node(graph, n.children[0], params);
        for (double& x : v.data) {
            if (n.kind == NodeKind::Neg) {
                x = -x;
            } else if (n.kind == NodeKind::Log) {
                if (x <= 0.0)
                    throw NumericalDomainError(
                        "log of non-positive value at node " + std::to_string(id.index),
                        id.index);
                x = std::log(x);
            } else {
                x = std::exp(x);
            }
        }
        v.shape = n.shape;
        return v;
    }
    default: {
        const Value a = eval_node(graph, n.children[0], params);
        const Value b = eval_node(graph, n.children[1], params);
        Value r{n.shape, std::vector<double>(n.shape.len)};
        for (std::size_t k = 0; k < n.shape.len; ++k) {
            const double x = a.data[a.shape.is_scalar() ? 0 : k];
            const double y = b.data[b.shape.is_scalar() ? 0 : k];
            switch (n.kind) {
            case NodeKind::Add: r.data[k] = x + y; break;
            case NodeKind::Sub: r.data[k] = x - y; break;
            case NodeKind::Mul: r.data[k] = x * y; break;
            default:
                if (y == 0.0)
                    throw NumericalDomainError(
                        "division by zero at node " + std::to_string(id.index), id.index);
                r.data[k] = x / y;
                break;
            }
        }
        return r;
    }
    }
}

} // namespace

Value eval_graph(const ModelGraph& graph, NodeId root, std::span<const double> params) {
    if (!graph.contains(root))
        throw InvalidModelError("eval_graph: root id " + std::to_string(root.index) +
                                " out of range");
    if (params.size() != graph.n_params())
        throw InvalidModelError("eval_graph: expected " + std::to_string(graph.n_params()) +
                                " parameters, got " + std::to_string(params.size()));
    return eval_node(graph, root, params);
}

} // namespace adfit
