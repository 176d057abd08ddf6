#pragma once

// Polynomial/rational scalar fields over named phase-space coordinates.
//
// An Expression is an immutable AST shared by pointer; copies are cheap and
// safe to hand to other threads. Derivatives are AST transformations
// (differentiate) and evaluate_jet2 propagates value, gradient and Hessian
// in one post-order pass.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ihs {

/// Names that may appear in an expression. Coordinates are differentiable
/// variables; parameters are fixed reals supplied at evaluation time.
struct SymbolTable {
    std::vector<std::string> coordinates;
    std::vector<std::string> parameters;

    std::optional<std::size_t> coordinate_index(std::string_view name) const;
    std::optional<std::size_t> parameter_index(std::string_view name) const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Op { Constant, Coordinate, Parameter, Add, Sub, Mul, Div, Neg, Pow };

struct Node;

class Expression {
public:
    /// The constant zero.
    Expression();

    static Expression constant(double value);
    static Expression coordinate(std::size_t index);
    static Expression parameter(std::size_t index);

    /// Raw node construction without any folding; the parser uses these so
    /// that printing reproduces the source structure.
    static Expression raw_binary(Op op, Expression lhs, Expression rhs);
    static Expression raw_negate(Expression operand);
    static Expression raw_power(Expression base, int exponent);

    Op op() const;
    double constant_value() const;   // Op::Constant
    std::size_t symbol_index() const; // Op::Coordinate / Op::Parameter
    int exponent() const;             // Op::Pow
    Expression lhs() const;           // binary ops, Neg operand, Pow base
    Expression rhs() const;

    bool is_constant() const { return op() == Op::Constant; }
    bool is_constant(double value) const;

    /// Identity of the underlying node (not structural equality).
    bool same_node(const Expression& other) const { return node_ == other.node_; }
    const Node& node() const { return *node_; }

private:
    explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Node {
    Op op = Op::Constant;
    double value = 0.0;
    std::size_t index = 0;
    int exponent = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

// Folding builders: constant folding and the 0/1 identities only.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression operator*(double s, const Expression& a);
Expression pow(const Expression& base, int exponent);

/// Parses `source` against `symbols`. Throws ParseError carrying the byte
/// offset of the offending token (syntax errors and unknown symbols).
Expression parse(std::string_view source, const SymbolTable& symbols);

/// Text form accepted by parse(); parse(to_string(e)) reproduces e's tree.
std::string to_string(const Expression& e, const SymbolTable& symbols);

/// Exact partial derivative with respect to coordinate `var`.
Expression differentiate(const Expression& e, std::size_t var);
Expression differentiate(const Expression& e, std::string_view var, const SymbolTable& symbols);

/// Replace coordinate k by images[k]. Parameters are left alone.
Expression substitute(const Expression& e, std::span<const Expression> images);

/// Replace parameters by numeric constants.
Expression bind_parameters(const Expression& e, std::span<const double> params);

double evaluate(const Expression& e, std::span<const double> point, std::span<const double> params = {});

struct Jet2 {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

/// Value, gradient and Hessian with respect to all coordinates of `point`.
Jet2 evaluate_jet2(const Expression& e, std::span<const double> point, std::span<const double> params = {});

/// Sparse polynomial in coordinates then parameters: exponent vector -> coefficient.
using Polynomial = std::map<std::vector<int>, double>;

/// Expands `e` into a Polynomial; nullopt when a non-constant divisor or
/// negative power occurs.
std::optional<Polynomial> to_polynomial(const Expression& e, std::size_t coordinate_count,
                                        std::size_t parameter_count);

/// Structural equality after normalization: both sides expand to the same
/// polynomial (coefficients within `rel_tol`), or, for non-polynomial
/// expressions, print identically.
bool equivalent(const Expression& a, const Expression& b, const SymbolTable& symbols,
                double rel_tol = 1e-14);

/// True when coordinate `var` occurs in `e`.
bool depends_on(const Expression& e, std::size_t var);

/// Largest polynomial degree in the coordinates (rational expressions: an
/// upper bound of the numerator degree plus denominator degree).
int degree(const Expression& e);

}  // namespace ihs
