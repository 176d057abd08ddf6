#include "ihs/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

namespace ihs {

std::optional<std::size_t> SymbolTable::coordinate_index(std::string_view name) const
{
    for (std::size_t i = 0; i < coordinates.size(); ++i)
        if (coordinates[i] == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> SymbolTable::parameter_index(std::string_view name) const
{
    for (std::size_t i = 0; i < parameters.size(); ++i)
        if (parameters[i] == name) return i;
    return std::nullopt;
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)), position_(position)
{
}

// ------------------------------------------------------------------ nodes

namespace {

std::shared_ptr<const Node> make_node(Op op, double value, std::size_t index, int exponent,
                                      std::shared_ptr<const Node> a, std::shared_ptr<const Node> b)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->index = index;
    n->exponent = exponent;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

const std::shared_ptr<const Node>& zero_node()
{
    static const std::shared_ptr<const Node> zero = make_node(Op::Constant, 0.0, 0, 0, nullptr, nullptr);
    return zero;
}

}  // namespace

Expression::Expression() : node_(zero_node()) {}

Expression Expression::constant(double value)
{
    if (!std::isfinite(value)) throw EvaluationError("non-finite constant");
    return Expression(make_node(Op::Constant, value, 0, 0, nullptr, nullptr));
}

Expression Expression::coordinate(std::size_t index)
{
    return Expression(make_node(Op::Coordinate, 0.0, index, 0, nullptr, nullptr));
}

Expression Expression::parameter(std::size_t index)
{
    return Expression(make_node(Op::Parameter, 0.0, index, 0, nullptr, nullptr));
}

Expression Expression::raw_binary(Op op, Expression lhs, Expression rhs)
{
    return Expression(make_node(op, 0.0, 0, 0, lhs.node_, rhs.node_));
}

Expression Expression::raw_negate(Expression operand)
{
    return Expression(make_node(Op::Neg, 0.0, 0, 0, operand.node_, nullptr));
}

Expression Expression::raw_power(Expression base, int exponent)
{
    return Expression(make_node(Op::Pow, 0.0, 0, exponent, base.node_, nullptr));
}

Op Expression::op() const { return node_->op; }
double Expression::constant_value() const { return node_->value; }
std::size_t Expression::symbol_index() const { return node_->index; }
int Expression::exponent() const { return node_->exponent; }
Expression Expression::lhs() const { return Expression(node_->a); }
Expression Expression::rhs() const { return Expression(node_->b); }

bool Expression::is_constant(double value) const
{
    return node_->op == Op::Constant && node_->value == value;
}

// --------------------------------------------------------------- builders

Expression operator+(const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() + b.constant_value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return Expression::raw_binary(Op::Add, a, b);
}

Expression operator-(const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() - b.constant_value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return Expression::raw_binary(Op::Sub, a, b);
}

Expression operator*(const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() * b.constant_value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    return Expression::raw_binary(Op::Mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b)
{
    if (b.is_constant(0.0)) throw EvaluationError("division by zero");
    if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() / b.constant_value());
    if (a.is_constant(0.0)) return a;
    if (b.is_constant(1.0)) return a;
    return Expression::raw_binary(Op::Div, a, b);
}

Expression operator-(const Expression& a)
{
    if (a.is_constant()) return Expression::constant(-a.constant_value());
    if (a.op() == Op::Neg) return a.lhs();
    return Expression::raw_negate(a);
}

Expression operator*(double s, const Expression& a) { return Expression::constant(s) * a; }

Expression pow(const Expression& base, int exponent)
{
    if (exponent == 0) return Expression::constant(1.0);
    if (exponent == 1) return base;
    if (base.is_constant()) {
        if (exponent < 0 && base.constant_value() == 0.0) throw EvaluationError("division by zero");
        return Expression::constant(std::pow(base.constant_value(), exponent));
    }
    return Expression::raw_power(base, exponent);
}

// ----------------------------------------------------------------- parser
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?
//   exponent:= ['-'] integer | '(' ['-'] integer ')'
//   primary := number | identifier | '(' expr ')'

namespace {

class Parser {
public:
    Parser(std::string_view src, const SymbolTable& symbols) : src_(src), symbols_(symbols) {}

    Expression parse_all()
    {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        Expression e = expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression expr()
    {
        Expression lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = Expression::raw_binary(Op::Add, lhs, term());
            else if (accept('-'))
                lhs = Expression::raw_binary(Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    Expression term()
    {
        Expression lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = Expression::raw_binary(Op::Mul, lhs, unary());
            else if (accept('/'))
                lhs = Expression::raw_binary(Op::Div, lhs, unary());
            else
                return lhs;
        }
    }

    Expression unary()
    {
        if (accept('-')) {
            Expression operand = unary();
            // A negated literal is a negative constant so that printing
            // negative constants round-trips.
            if (operand.is_constant() && operand.constant_value() != 0.0 && last_was_literal_)
                return Expression::constant(-operand.constant_value());
            last_was_literal_ = false;
            return Expression::raw_negate(operand);
        }
        return power();
    }

    Expression power()
    {
        Expression base = primary();
        if (accept('^')) {
            last_was_literal_ = false;
            return Expression::raw_power(base, exponent_literal());
        }
        return base;
    }

    int exponent_literal()
    {
        skip_ws();
        bool paren = accept('(');
        bool negative = accept('-');
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("expected integer exponent", start);
        int value = 0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("exponent out of range", start);
        if (paren && !accept(')')) throw ParseError("expected ')'", pos_);
        return negative ? -value : value;
    }

    Expression primary()
    {
        skip_ws();
        last_was_literal_ = false;
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expression inner = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            // A parenthesized negative constant stays a constant.
            last_was_literal_ = inner.is_constant();
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return symbol();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expression number()
    {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(value))
            throw ParseError("malformed number", start);
        last_was_literal_ = true;
        return Expression::constant(value);
    }

    Expression symbol()
    {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);
        if (auto i = symbols_.coordinate_index(name)) return Expression::coordinate(*i);
        if (auto i = symbols_.parameter_index(name)) return Expression::parameter(*i);
        throw ParseError("unknown symbol '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    const SymbolTable& symbols_;
    std::size_t pos_ = 0;
    bool last_was_literal_ = false;
};

}  // namespace

Expression parse(std::string_view source, const SymbolTable& symbols)
{
    return Parser(source, symbols).parse_all();
}

// ---------------------------------------------------------------- printer

namespace {

int precedence(const Expression& e)
{
    switch (e.op()) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Constant: return e.constant_value() < 0.0 ? 3 : 5;
    default: return 5;
    }
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void print(const Expression& e, const SymbolTable& symbols, std::string& out);

void print_operand(const Expression& e, const SymbolTable& symbols, std::string& out, bool parens)
{
    if (parens) out += '(';
    print(e, symbols, out);
    if (parens) out += ')';
}

void print(const Expression& e, const SymbolTable& symbols, std::string& out)
{
    switch (e.op()) {
    case Op::Constant: out += format_double(e.constant_value()); return;
    case Op::Coordinate: out += symbols.coordinates.at(e.symbol_index()); return;
    case Op::Parameter: out += symbols.parameters.at(e.symbol_index()); return;
    case Op::Neg: {
        Expression x = e.lhs();
        out += '-';
        // A negated literal would reparse as a negative constant.
        print_operand(x, symbols, out, precedence(x) < 3 || x.is_constant() || x.op() == Op::Neg);
        return;
    }
    case Op::Pow: {
        Expression b = e.lhs();
        print_operand(b, symbols, out, precedence(b) < 5);
        out += '^';
        if (e.exponent() < 0)
            out += "(" + std::to_string(e.exponent()) + ")";
        else
            out += std::to_string(e.exponent());
        return;
    }
    default: break;
    }
    const int p = precedence(e);
    Expression a = e.lhs();
    Expression b = e.rhs();
    // Left-associative: the left operand needs parens only when it binds
    // looser; the right operand also when it binds equally. Negative
    // constants on the right are always wrapped.
    const bool left_parens = precedence(a) < p;
    const bool right_parens =
        precedence(b) <= p || (b.is_constant() && b.constant_value() < 0.0) || b.op() == Op::Neg;
    print_operand(a, symbols, out, left_parens);
    switch (e.op()) {
    case Op::Add: out += '+'; break;
    case Op::Sub: out += '-'; break;
    case Op::Mul: out += '*'; break;
    case Op::Div: out += '/'; break;
    default: break;
    }
    print_operand(b, symbols, out, right_parens);
}

}  // namespace

std::string to_string(const Expression& e, const SymbolTable& symbols)
{
    std::string out;
    print(e, symbols, out);
    return out;
}

// ------------------------------------------------------ symbolic calculus

Expression differentiate(const Expression& e, std::size_t var)
{
    switch (e.op()) {
    case Op::Constant:
    case Op::Parameter: return Expression::constant(0.0);
    case Op::Coordinate: return Expression::constant(e.symbol_index() == var ? 1.0 : 0.0);
    case Op::Add: return differentiate(e.lhs(), var) + differentiate(e.rhs(), var);
    case Op::Sub: return differentiate(e.lhs(), var) - differentiate(e.rhs(), var);
    case Op::Neg: return -differentiate(e.lhs(), var);
    case Op::Mul: {
        Expression a = e.lhs(), b = e.rhs();
        return differentiate(a, var) * b + a * differentiate(b, var);
    }
    case Op::Div: {
        Expression a = e.lhs(), b = e.rhs();
        Expression da = differentiate(a, var), db = differentiate(b, var);
        if (db.is_constant(0.0)) return da / b;
        return (da * b - a * db) / pow(b, 2);
    }
    case Op::Pow: {
        Expression base = e.lhs();
        const int n = e.exponent();
        Expression db = differentiate(base, var);
        if (db.is_constant(0.0)) return Expression::constant(0.0);
        return Expression::constant(n) * pow(base, n - 1) * db;
    }
    }
    return Expression::constant(0.0);
}

Expression differentiate(const Expression& e, std::string_view var, const SymbolTable& symbols)
{
    auto i = symbols.coordinate_index(var);
    if (!i) throw ParseError("undeclared variable '" + std::string(var) + "'", 0);
    return differentiate(e, *i);
}

Expression substitute(const Expression& e, std::span<const Expression> images)
{
    switch (e.op()) {
    case Op::Constant:
    case Op::Parameter: return e;
    case Op::Coordinate: return images[e.symbol_index()];
    case Op::Add: return substitute(e.lhs(), images) + substitute(e.rhs(), images);
    case Op::Sub: return substitute(e.lhs(), images) - substitute(e.rhs(), images);
    case Op::Mul: return substitute(e.lhs(), images) * substitute(e.rhs(), images);
    case Op::Div: return substitute(e.lhs(), images) / substitute(e.rhs(), images);
    case Op::Neg: return -substitute(e.lhs(), images);
    case Op::Pow: return pow(substitute(e.lhs(), images), e.exponent());
    }
    return e;
}

Expression bind_parameters(const Expression& e, std::span<const double> params)
{
    switch (e.op()) {
    case Op::Constant:
    case Op::Coordinate: return e;
    case Op::Parameter: return Expression::constant(params[e.symbol_index()]);
    case Op::Add: return bind_parameters(e.lhs(), params) + bind_parameters(e.rhs(), params);
    case Op::Sub: return bind_parameters(e.lhs(), params) - bind_parameters(e.rhs(), params);
    case Op::Mul: return bind_parameters(e.lhs(), params) * bind_parameters(e.rhs(), params);
    case Op::Div: return bind_parameters(e.lhs(), params) / bind_parameters(e.rhs(), params);
    case Op::Neg: return -bind_parameters(e.lhs(), params);
    case Op::Pow: return pow(bind_parameters(e.lhs(), params), e.exponent());
    }
    return e;
}

bool depends_on(const Expression& e, std::size_t var)
{
    switch (e.op()) {
    case Op::Constant:
    case Op::Parameter: return false;
    case Op::Coordinate: return e.symbol_index() == var;
    case Op::Neg:
    case Op::Pow: return depends_on(e.lhs(), var);
    default: return depends_on(e.lhs(), var) || depends_on(e.rhs(), var);
    }
}

int degree(const Expression& e)
{
    switch (e.op()) {
    case Op::Constant:
    case Op::Parameter: return 0;
    case Op::Coordinate: return 1;
    case Op::Add:
    case Op::Sub: return std::max(degree(e.lhs()), degree(e.rhs()));
    case Op::Mul:
    case Op::Div: return degree(e.lhs()) + degree(e.rhs());
    case Op::Neg: return degree(e.lhs());
    case Op::Pow: return degree(e.lhs()) * std::abs(e.exponent());
    }
    return 0;
}

// ------------------------------------------------------------- evaluation

namespace {

double eval_node(const Node& n, std::span<const double> x, std::span<const double> p)
{
    switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Coordinate: return x[n.index];
    case Op::Parameter: return p[n.index];
    case Op::Add: return eval_node(*n.a, x, p) + eval_node(*n.b, x, p);
    case Op::Sub: return eval_node(*n.a, x, p) - eval_node(*n.b, x, p);
    case Op::Mul: return eval_node(*n.a, x, p) * eval_node(*n.b, x, p);
    case Op::Div: {
        const double num = eval_node(*n.a, x, p);
        const double den = eval_node(*n.b, x, p);
        if (den == 0.0) throw EvaluationError("division by zero");
        return num / den;
    }
    case Op::Neg: return -eval_node(*n.a, x, p);
    case Op::Pow: {
        const double b = eval_node(*n.a, x, p);
        if (n.exponent < 0 && b == 0.0) throw EvaluationError("division by zero");
        return std::pow(b, n.exponent);
    }
    }
    return 0.0;
}

void check_symbols(const Node& n, std::size_t nx, std::size_t np)
{
    switch (n.op) {
    case Op::Constant: return;
    case Op::Coordinate:
        if (n.index >= nx) throw EvaluationError("coordinate not assigned");
        return;
    case Op::Parameter:
        if (n.index >= np) throw EvaluationError("parameter not assigned");
        return;
    case Op::Neg:
    case Op::Pow: check_symbols(*n.a, nx, np); return;
    default:
        check_symbols(*n.a, nx, np);
        check_symbols(*n.b, nx, np);
    }
}

void jet_node(const Node& n, std::span<const double> x, std::span<const double> p, Jet2& out)
{
    const Eigen::Index dim = static_cast<Eigen::Index>(x.size());
    switch (n.op) {
    case Op::Constant:
    case Op::Parameter:
        out.value = n.op == Op::Constant ? n.value : p[n.index];
        out.gradient.setZero(dim);
        out.hessian.setZero(dim, dim);
        return;
    case Op::Coordinate:
        out.value = x[n.index];
        out.gradient.setZero(dim);
        out.gradient[static_cast<Eigen::Index>(n.index)] = 1.0;
        out.hessian.setZero(dim, dim);
        return;
    case Op::Neg:
        jet_node(*n.a, x, p, out);
        out.value = -out.value;
        out.gradient = -out.gradient;
        out.hessian = -out.hessian;
        return;
    case Op::Pow: {
        jet_node(*n.a, x, p, out);
        const int k = n.exponent;
        const double v = out.value;
        if (k < 0 && v == 0.0) throw EvaluationError("division by zero");
        if (k == 0) {
            out.value = 1.0;
            out.gradient.setZero();
            out.hessian.setZero();
            return;
        }
        const double vk1 = std::pow(v, k - 1);
        const double vk2 = k == 1 ? 0.0 : std::pow(v, k - 2);
        out.hessian = k * vk1 * out.hessian + double(k) * (k - 1) * vk2 * (out.gradient * out.gradient.transpose());
        out.gradient *= k * vk1;
        out.value = std::pow(v, k);
        return;
    }
    default: break;
    }
    Jet2 b;
    jet_node(*n.a, x, p, out);
    jet_node(*n.b, x, p, b);
    switch (n.op) {
    case Op::Add:
        out.value += b.value;
        out.gradient += b.gradient;
        out.hessian += b.hessian;
        return;
    case Op::Sub:
        out.value -= b.value;
        out.gradient -= b.gradient;
        out.hessian -= b.hessian;
        return;
    case Op::Mul: {
        Eigen::MatrixXd cross = out.gradient * b.gradient.transpose();
        out.hessian = out.hessian * b.value + b.hessian * out.value + cross + cross.transpose();
        out.gradient = out.gradient * b.value + b.gradient * out.value;
        out.value *= b.value;
        return;
    }
    case Op::Div: {
        if (b.value == 0.0) throw EvaluationError("division by zero");
        const double q = out.value / b.value;
        Eigen::VectorXd gq = (out.gradient - q * b.gradient) / b.value;
        Eigen::MatrixXd cross = b.gradient * gq.transpose();
        out.hessian = (out.hessian - q * b.hessian - cross - cross.transpose()) / b.value;
        out.gradient = gq;
        out.value = q;
        return;
    }
    default: return;
    }
}

}  // namespace

double evaluate(const Expression& e, std::span<const double> point, std::span<const double> params)
{
    check_symbols(e.node(), point.size(), params.size());
    return eval_node(e.node(), point, params);
}

Jet2 evaluate_jet2(const Expression& e, std::span<const double> point, std::span<const double> params)
{
    check_symbols(e.node(), point.size(), params.size());
    Jet2 out;
    jet_node(e.node(), point, params, out);
    return out;
}

// ----------------------------------------------------------- polynomials

namespace {

void poly_add(Polynomial& acc, const Polynomial& b, double scale)
{
    for (const auto& [k, c] : b) acc[k] += scale * c;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b)
{
    Polynomial out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            std::vector<int> k(ka.size());
            for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
            out[k] += ca * cb;
        }
    return out;
}

std::optional<Polynomial> poly_of(const Expression& e, std::size_t nvars, std::size_t offset_params)
{
    const std::vector<int> zero(nvars, 0);
    switch (e.op()) {
    case Op::Constant: return Polynomial{{zero, e.constant_value()}};
    case Op::Coordinate:
    case Op::Parameter: {
        std::vector<int> k = zero;
        const std::size_t slot = e.symbol_index() + (e.op() == Op::Parameter ? offset_params : 0);
        if (slot >= nvars) return std::nullopt;
        k[slot] = 1;
        return Polynomial{{k, 1.0}};
    }
    case Op::Add:
    case Op::Sub: {
        auto a = poly_of(e.lhs(), nvars, offset_params);
        auto b = poly_of(e.rhs(), nvars, offset_params);
        if (!a || !b) return std::nullopt;
        poly_add(*a, *b, e.op() == Op::Add ? 1.0 : -1.0);
        return a;
    }
    case Op::Neg: {
        auto a = poly_of(e.lhs(), nvars, offset_params);
        if (!a) return std::nullopt;
        for (auto& [k, c] : *a) c = -c;
        return a;
    }
    case Op::Mul: {
        auto a = poly_of(e.lhs(), nvars, offset_params);
        auto b = poly_of(e.rhs(), nvars, offset_params);
        if (!a || !b) return std::nullopt;
        return poly_mul(*a, *b);
    }
    case Op::Div: {
        auto a = poly_of(e.lhs(), nvars, offset_params);
        auto b = poly_of(e.rhs(), nvars, offset_params);
        if (!a || !b) return std::nullopt;
        double den = 0.0;
        for (const auto& [k, c] : *b) {
            if (c == 0.0) continue;
            if (k != zero) return std::nullopt;
            den = c;
        }
        if (den == 0.0) return std::nullopt;
        for (auto& [k, c] : *a) c /= den;
        return a;
    }
    case Op::Pow: {
        if (e.exponent() < 0) return std::nullopt;
        auto base = poly_of(e.lhs(), nvars, offset_params);
        if (!base) return std::nullopt;
        Polynomial out{{zero, 1.0}};
        for (int i = 0; i < e.exponent(); ++i) out = poly_mul(out, *base);
        return out;
    }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Polynomial> to_polynomial(const Expression& e, std::size_t coordinate_count,
                                        std::size_t parameter_count)
{
    auto p = poly_of(e, coordinate_count + parameter_count, coordinate_count);
    if (!p) return p;
    std::erase_if(*p, [](const auto& kv) { return kv.second == 0.0; });
    return p;
}

bool equivalent(const Expression& a, const Expression& b, const SymbolTable& symbols, double rel_tol)
{
    const std::size_t nc = symbols.coordinates.size(), np = symbols.parameters.size();
    auto pa = to_polynomial(a, nc, np);
    auto pb = to_polynomial(b, nc, np);
    if (pa && pb) {
        Polynomial diff = *pa;
        poly_add(diff, *pb, -1.0);
        for (const auto& [k, c] : diff) {
            double scale = 1.0;
            if (auto it = pa->find(k); it != pa->end()) scale = std::max(scale, std::abs(it->second));
            if (auto it = pb->find(k); it != pb->end()) scale = std::max(scale, std::abs(it->second));
            if (std::abs(c) > rel_tol * scale) return false;
        }
        return true;
    }
    return to_string(a, symbols) == to_string(b, symbols);
}

}  // namespace ihs
