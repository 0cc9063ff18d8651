#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adfit {

enum class NodeKind : std::uint8_t {
    Param,
    ParamVector,
    ConstScalar,
    ConstVector,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Log,
    Exp,
    Sum,
};

const char* node_kind_name(NodeKind kind);

/// Dense handle into a ModelGraph's node table.
struct NodeId {
    std::size_t index = 0;

    friend bool operator==(NodeId, NodeId) = default;
};

/// Scalar or fixed-length vector. Elementwise arithmetic broadcasts scalars
/// against vectors; vectors must agree in length.
struct Shape {
    bool vec = false;
    std::size_t len = 1;

    static Shape scalar() { return {false, 1}; }
    static Shape vector(std::size_t n) { return {true, n}; }
    bool is_scalar() const { return !vec; }

    friend bool operator==(Shape, Shape) = default;
};

struct Node {
    NodeKind kind = NodeKind::ConstScalar;
    Shape shape;
    std::vector<NodeId> children;

    // Kind-specific payload; unused members stay empty.
    std::size_t param_index = 0;             // Param
    std::vector<std::size_t> param_indices;  // ParamVector
    double scalar_value = 0.0;               // ConstScalar
    std::vector<double> vector_values;       // ConstVector
};

/// Directed acyclic computation graph over typed nodes. Append-only: child
/// ids are always smaller than their parent's id, which makes acyclicity a
/// construction invariant. Immutable once built; all read operations are
/// safe to call concurrently.
class ModelGraph {
public:
    /// Registers a scalar parameter and returns its dense index.
    std::size_t add_param(std::string name, double initial = 1.0);

    /// Appends an operation node (Add..Sum). Throws InvalidModelError on
    /// arity or shape violations or out-of-range children.
    NodeId add_node(NodeKind kind, std::vector<NodeId> children);

    // Leaf constructors.
    NodeId param(std::size_t param_index);
    NodeId param_vector(std::vector<std::size_t> param_indices);
    NodeId constant(double value);
    NodeId constant_vector(std::vector<double> values);

    // Arithmetic shorthands.
    NodeId add(NodeId a, NodeId b) { return add_node(NodeKind::Add, {a, b}); }
    NodeId sub(NodeId a, NodeId b) { return add_node(NodeKind::Sub, {a, b}); }
    NodeId mul(NodeId a, NodeId b) { return add_node(NodeKind::Mul, {a, b}); }
    NodeId div(NodeId a, NodeId b) { return add_node(NodeKind::Div, {a, b}); }
    NodeId neg(NodeId a) { return add_node(NodeKind::Neg, {a}); }
    NodeId log(NodeId a) { return add_node(NodeKind::Log, {a}); }
    NodeId exp(NodeId a) { return add_node(NodeKind::Exp, {a}); }
    NodeId sum(NodeId a) { return add_node(NodeKind::Sum, {a}); }

    std::size_t size() const { return nodes_.size(); }
    bool contains(NodeId id) const { return id.index < nodes_.size(); }
    const Node& node(NodeId id) const;

    std::size_t n_params() const { return param_names_.size(); }
    const std::vector<std::string>& param_names() const { return param_names_; }
    const std::vector<double>& param_initial() const { return param_initial_; }

    /// Parameter indices in [0, n_params) not referenced by any Param or
    /// ParamVector node. Empty for a well-formed model.
    std::vector<std::size_t> unreferenced_params() const;

private:
    NodeId append(Node node);

    std::vector<Node> nodes_;
    std::vector<std::string> param_names_;
    std::vector<double> param_initial_;
};

/// Post-order depth-first traversal from root with duplicate suppression:
/// every reachable node appears exactly once, after all of its children.
/// Children are visited in stored order and the first visit wins, so the
/// result is deterministic for a given graph.
std::vector<NodeId> topo_order(const ModelGraph& graph, NodeId root);

/// Scalar-or-vector result of evaluating a subgraph.
struct Value {
    Shape shape;
    std::vector<double> data; // size == shape.len

    double scalar() const;
};

/// Reference recursive evaluator. Deliberately naive (no caching); used as
/// the correctness oracle for the lowered program, not as a performance
/// path. Throws NumericalDomainError carrying the offending NodeId.
Value eval_graph(const ModelGraph& graph, NodeId root, std::span<const double> params);

} // namespace adfit
